import json

import numpy as np
import pytest

from gsextract.graphs import (
    Family,
    FamilySpec,
    Graph,
    WeightedGraph,
    build_family,
    enumerate_edge_defects,
    generator,
    random_subgraph,
)

from conftest import cycle

ALL_KINDS = ["path", "crazy", "twisted", "ghz_path", "ghz_crazy"]


def _specs():
    for kind in ALL_KINDS:
        for n in range(1, 9):
            if kind == "twisted" and n % 2 == 0:
                continue
            yield FamilySpec(kind, n)


class TestFamilies:
    @pytest.mark.parametrize("spec", list(_specs()), ids=lambda s: f"{s.kind.value}-{s.n}")
    def test_structure(self, spec):
        g = build_family(spec)
        for i in range(g.n):
            assert not (g.adjacency[i] >> i) & 1
            for j in g.neighbors(i):
                assert g.has_edge(j, i)
                assert abs(g.layers[i] - g.layers[j]) == 1
        expected_terms = spec.arms if spec.kind.is_ghz else 2
        assert len(g.terminals) == expected_terms

    def test_path_two(self, path4):
        assert path4.n == 4
        assert path4.edges == ((0, 1), (1, 2), (2, 3))
        assert path4.terminals == (0, 3)

    def test_crazy_three(self):
        g = build_family(FamilySpec("crazy", 3))
        assert g.n == 8
        assert g.num_edges == 12
        assert sorted(g.layers) == [0, 1, 1, 2, 2, 3, 3, 4]

    @pytest.mark.parametrize("n", range(1, 9))
    def test_crazy_edge_count(self, n):
        assert build_family(FamilySpec("crazy", n)).num_edges == 4 * n

    def test_twisted_one_is_square(self, square):
        assert square.n == 4
        assert square.num_edges == 4
        assert all(len(square.neighbors(v)) == 2 for v in range(4))
        t0, t1 = square.terminals
        assert not square.has_edge(t0, t1)

    def test_ghz_star_counts(self):
        g = build_family(FamilySpec("ghz_crazy", 2))
        assert (g.n, g.num_edges) == (16, 24)
        g = build_family(FamilySpec("ghz_path", 2))
        assert (g.n, g.num_edges) == (10, 9)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            FamilySpec("path", 0)
        with pytest.raises(ValueError):
            FamilySpec("twisted", 2)
        with pytest.raises(ValueError):
            FamilySpec("ghz_path", 2, arms=1)
        with pytest.raises(ValueError):
            FamilySpec("hexagon", 2)

    def test_aliases(self):
        assert Family.parse("Twisted-Pair") is Family.TWISTED
        assert Family.parse("GHZ_CRAZY_STAR") is Family.GHZ_CRAZY


class TestGenerator:
    def test_square(self):
        # 1-indexed labels 1..4 on the cycle 1-2-3-4 are 0..3 here
        g = cycle(4)
        assert generator(g, 0).letters() == "XZIZ"
        assert [generator(g, i).letters() for i in range(4)] == ["XZIZ", "ZXZI", "IZXZ", "ZIZX"]

    def test_isolated(self):
        g = Graph.from_edges(3, [(0, 1)])
        assert generator(g, 2).letters() == "IIX"

    def test_crazy_internal(self):
        g = build_family(FamilySpec("crazy", 3))
        for v in g.internal:
            p = generator(g, v)
            assert p.letter(v) == "X"
            assert (p.z).bit_count() in (3, 4)
            assert p.z == g.adjacency[v]

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            generator(cycle(3), 3)


class TestRandomSubgraph:
    def test_extremes(self, square):
        rng = np.random.default_rng(0)
        assert random_subgraph(square, 0.0, rng) == square
        assert random_subgraph(square, 1.0, rng).num_edges == 0

    def test_removal_frequency(self):
        g = build_family(FamilySpec("path", 1))  # 2 edges
        rng = np.random.default_rng(12345)
        draws = 100_000
        lost = np.zeros(len(g.edges))
        for _ in range(draws):
            sub = random_subgraph(g, 0.3, rng)
            lost += [not sub.has_edge(*e) for e in g.edges]
        np.testing.assert_allclose(lost / draws, 0.3, atol=0.005)

    def test_bad_p(self, square):
        with pytest.raises(ValueError):
            random_subgraph(square, 1.5, np.random.default_rng(0))


class TestEdgeDefects:
    def test_square_single(self, square):
        subs = enumerate_edge_defects(square, 1)
        assert len(subs) == 4
        for g, mult in subs:
            assert mult == 1
            assert g.num_edges == 3
            degrees = sorted(len(g.neighbors(v)) for v in range(4))
            assert degrees == [1, 1, 2, 2]

    def test_path_single(self, path4):
        assert len(enumerate_edge_defects(path4, 1)) == 3

    def test_crazy_counts(self):
        g = build_family(FamilySpec("crazy", 2))
        assert len(enumerate_edge_defects(g, 1)) == g.num_edges == 8
        assert len(enumerate_edge_defects(g, 2)) == 28

    def test_bad_order(self, path4):
        with pytest.raises(ValueError):
            enumerate_edge_defects(path4, 0)
        with pytest.raises(ValueError):
            enumerate_edge_defects(path4, 4)


class TestSerialization:
    @pytest.mark.parametrize("spec", [FamilySpec("crazy", 3), FamilySpec("ghz_path", 2), FamilySpec("twisted", 3)])
    def test_json_roundtrip(self, spec):
        g = build_family(spec)
        back = Graph.from_json(g.to_json())
        assert back == g
        assert json.loads(g.to_json())["n"] == g.n

    def test_adjacency_text(self):
        text = """
        # 4-cycle
        0: 1 3
        1: 2
        2 3
        """
        g = Graph.from_adjacency_text(text, terminals=(0, 2))
        assert g.edges == cycle(4).edges
        assert g.terminals == (0, 2)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            Graph(2, (0b10, 0b00))

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(1, 1)])

    def test_rejects_bad_layers(self):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 2)], layers=[0, 1, 2])


class TestWeightedGraph:
    def test_uniform_pi_is_ideal(self, square):
        assert WeightedGraph.uniform(square, np.pi).is_ideal
        assert not WeightedGraph.uniform(square, np.pi + 0.1).is_ideal

    def test_phases_must_match_edges(self, square):
        with pytest.raises(ValueError):
            WeightedGraph(square, {(0, 1): np.pi})

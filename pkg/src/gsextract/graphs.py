"""Graphs, weighted graphs, the extraction template families and edge sampling.

Vertex numbering for the layered families is layer-major, then within-layer.
For Bell templates layer 0 and the last layer each hold one terminal, so the
terminals are always vertex 0 and vertex ``n_vertices - 1``.

GHZ templates are ``arms`` linear sections hung from one central vertex
(vertex 0, layer 0, measured).  Each arm is numbered outward from the centre
and ends in its terminal.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliString

Edge = tuple[int, int]


def _edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[int, ...]
    terminals: tuple[int, ...] = ()
    layers: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must have one row per vertex")
        for i, row in enumerate(self.adjacency):
            if row >> self.n or row < 0:
                raise ValueError(f"row {i} references vertices outside the graph")
            if (row >> i) & 1:
                raise ValueError(f"self-loop at vertex {i}")
            for j in _bits(row):
                if not (self.adjacency[j] >> i) & 1:
                    raise ValueError(f"adjacency not symmetric at ({i}, {j})")
        if len(set(self.terminals)) != len(self.terminals):
            raise ValueError("duplicate terminal")
        for t in self.terminals:
            if not 0 <= t < self.n:
                raise ValueError(f"terminal {t} out of range")
        if self.layers is not None:
            if len(self.layers) != self.n:
                raise ValueError("layer map must cover every vertex")
            for i, j in self.edges:
                if abs(self.layers[i] - self.layers[j]) != 1:
                    raise ValueError(f"edge {(i, j)} does not join adjacent layers")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[int]],
        terminals: Sequence[int] = (),
        layers: Sequence[int] | None = None,
    ) -> Graph:
        rows = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge {(i, j)} out of range")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, tuple(rows), tuple(terminals), None if layers is None else tuple(layers))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple((i, j) for i in range(self.n) for j in _bits(self.adjacency[i]) if i < j)

    @property
    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.adjacency) // 2

    @property
    def internal(self) -> tuple[int, ...]:
        term = set(self.terminals)
        return tuple(v for v in range(self.n) if v not in term)

    def neighbors(self, i: int) -> list[int]:
        if not 0 <= i < self.n:
            raise IndexError(f"vertex {i} out of range")
        return list(_bits(self.adjacency[i]))

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adjacency[i] >> j) & 1)

    def without_edges(self, edges: Iterable[Edge]) -> Graph:
        rows = list(self.adjacency)
        for i, j in edges:
            if not self.has_edge(i, j):
                raise ValueError(f"edge {(i, j)} not in graph")
            rows[i] &= ~(1 << j)
            rows[j] &= ~(1 << i)
        return Graph(self.n, tuple(rows), self.terminals, self.layers)

    def edge_subgraph(self, keep_mask: int) -> Graph:
        """Subgraph keeping edge ``k`` of :attr:`edges` iff bit ``k`` is set."""
        edges = self.edges
        return Graph.from_edges(
            self.n,
            (e for k, e in enumerate(edges) if (keep_mask >> k) & 1),
            self.terminals,
            self.layers,
        )

    def induced(self, vertices: Sequence[int], terminals: Sequence[int] = ()) -> Graph:
        """Induced subgraph on ``vertices``, relabelled in the given order."""
        index = {v: k for k, v in enumerate(vertices)}
        edges = [(index[i], index[j]) for i, j in self.edges if i in index and j in index]
        return Graph.from_edges(len(vertices), edges, [index[t] for t in terminals])

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        out = {"n": self.n, "edges": [list(e) for e in self.edges], "terminals": list(self.terminals)}
        if self.layers is not None:
            out["layers"] = list(self.layers)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> Graph:
        layers = data.get("layers")
        return cls.from_edges(int(data["n"]), data.get("edges", []), data.get("terminals", []), layers)

    @classmethod
    def from_json(cls, text: str) -> Graph:
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_adjacency_text(cls, text: str, terminals: Sequence[int] = ()) -> Graph:
        """Parse lines ``"v: u w ..."`` (or ``"v u w ..."``); ``#`` starts a comment."""
        neigh: dict[int, list[int]] = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].replace(":", " ").split()
            if not line:
                continue
            v, *rest = (int(tok) for tok in line)
            neigh.setdefault(v, []).extend(rest)
            for u in rest:
                neigh.setdefault(u, [])
        n = max(neigh) + 1 if neigh else 0
        edges = {_edge(v, u) for v, us in neigh.items() for u in us}
        return cls.from_edges(n, sorted(edges), terminals)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class WeightedGraph:
    """A graph with a controlled-phase angle (radians) on every edge."""

    base: Graph
    phases: dict[Edge, float] = field(default_factory=dict)

    def __post_init__(self):
        edges = set(self.base.edges)
        keys = {_edge(*e) for e in self.phases}
        if keys != edges:
            raise ValueError("phases must be defined exactly on the base graph's edges")
        object.__setattr__(self, "phases", {_edge(*e): float(v) for e, v in self.phases.items()})

    @classmethod
    def uniform(cls, base: Graph, phi: float) -> WeightedGraph:
        return cls(base, {e: phi for e in base.edges})

    @property
    def is_ideal(self) -> bool:
        return all(math.isclose(v % (2 * math.pi), math.pi) for v in self.phases.values())


class Family(str, Enum):
    PATH = "path"
    TWISTED = "twisted"
    CRAZY = "crazy"
    GHZ_PATH = "ghz_path"
    GHZ_CRAZY = "ghz_crazy"

    @classmethod
    def parse(cls, value: str | Family) -> Family:
        if isinstance(value, Family):
            return value
        key = value.strip().lower().replace("-", "_")
        aliases = {
            "twist": "twisted",
            "twistedpair": "twisted",
            "twisted_pair": "twisted",
            "ghzpathstar": "ghz_path",
            "ghz_path_star": "ghz_path",
            "ghzcrazystar": "ghz_crazy",
            "ghz_crazy_star": "ghz_crazy",
        }
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown family {value!r}") from None

    @property
    def is_ghz(self) -> bool:
        return self in (Family.GHZ_PATH, Family.GHZ_CRAZY)


@dataclass(frozen=True)
class FamilySpec:
    kind: Family
    n: int
    arms: int = 3

    def __post_init__(self):
        object.__setattr__(self, "kind", Family.parse(self.kind))
        if self.n < 1:
            raise ValueError(f"internal length must be >= 1, got {self.n}")
        if self.kind is Family.TWISTED and self.n % 2 == 0:
            raise ValueError(
                f"twisted pair needs an odd number of layers; n={self.n} internal layers gives {self.n + 2}"
            )
        if self.kind.is_ghz and self.arms < 2:
            raise ValueError("GHZ templates need at least two arms")


def _layered(sizes: Sequence[int]) -> Graph:
    """Fully connect every pair of adjacent layers."""
    starts = list(itertools.accumulate(sizes, initial=0))
    layers = [k for k, m in enumerate(sizes) for _ in range(m)]
    edges = []
    for k in range(len(sizes) - 1):
        for a in range(starts[k], starts[k + 1]):
            for b in range(starts[k + 1], starts[k + 2]):
                edges.append((a, b))
    n = starts[-1]
    return Graph.from_edges(n, edges, (0, n - 1), layers)


def _star(arms: int, inner_sizes: Sequence[int]) -> Graph:
    edges = []
    layers = [0]
    terminals = []
    n = 1
    for _ in range(arms):
        prev = [0]
        for depth, m in enumerate(list(inner_sizes) + [1], start=1):
            cur = list(range(n, n + m))
            n += m
            layers.extend([depth] * m)
            edges.extend((a, b) for a in prev for b in cur)
            prev = cur
        terminals.append(prev[0])
    return Graph.from_edges(n, edges, terminals, layers)


def build_family(spec: FamilySpec) -> Graph:
    kind, n = spec.kind, spec.n
    if kind is Family.PATH:
        return _layered([1] * (n + 2))
    if kind is Family.CRAZY:
        return _layered([1] + [2] * n + [1])
    if kind is Family.TWISTED:
        return _layered([1 if k % 2 == 0 else 2 for k in range(n + 2)])
    if kind is Family.GHZ_PATH:
        return _star(spec.arms, [1] * n)
    if kind is Family.GHZ_CRAZY:
        return _star(spec.arms, [2] * n)
    raise ValueError(f"unhandled family {kind}")


def generator(g: Graph, i: int) -> PauliString:
    """Graph-state stabilizer generator: X on ``i``, Z on each neighbour."""
    if not 0 <= i < g.n:
        raise IndexError(f"vertex {i} out of range")
    return PauliString(g.n, 1 << i, g.adjacency[i], 0)


def random_subgraph(g: Graph, p: float, rng: np.random.Generator) -> Graph:
    """Drop each edge independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    edges = g.edges
    lost = rng.random(len(edges)) < p
    return g.without_edges(e for e, gone in zip(edges, lost) if gone)


def enumerate_edge_defects(g: Graph, k: int) -> list[tuple[Graph, int]]:
    """Every subgraph with exactly ``k`` edges removed, each with multiplicity 1.

    Noise weights ``p**k * (1-p)**(|E|-k)`` are left to the caller.
    """
    edges = g.edges
    if k < 1:
        raise ValueError("defect order must be >= 1")
    if k > len(edges):
        raise ValueError(f"cannot remove {k} of {len(edges)} edges")
    return [(g.without_edges(combo), 1) for combo in itertools.combinations(edges, k)]

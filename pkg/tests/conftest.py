import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gsextract.graphs import FamilySpec, Graph, build_family
from gsextract.stabilizer import MeasurementPattern

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_pauli(p):
    """Dense matrix of a PauliString; qubit q is bit q of the basis index."""
    out = np.eye(1, dtype=complex)
    for q in reversed(range(p.n)):
        out = np.kron(out, _MATS[p.letter(q)])
    return (1j**p.phase) * out


def dense_graph_state(g):
    """Graph state from scratch: CZ phases on |+>^n, no library code."""
    n = g.n
    amps = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
    for k in range(1 << n):
        sign = 1
        for i, j in g.edges:
            if (k >> i) & 1 and (k >> j) & 1:
                sign = -sign
        amps[k] *= sign
    return amps


def dense_stabilizer_state(t):
    """Normalized projector onto the +1 eigenspace of every generator, as a vector."""
    dim = 1 << t.n
    proj = np.eye(dim, dtype=complex)
    for g in t.generators:
        proj = proj @ (np.eye(dim) + dense_pauli(g)) / 2
    rng = np.random.default_rng(1)
    v = proj @ (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    return v / np.linalg.norm(v)


@pytest.fixture
def square():
    """Twisted n=1: the 4-cycle 0-1-3-2-0, terminals 0 and 3 at opposite corners."""
    return build_family(FamilySpec("twisted", 1))


@pytest.fixture
def path4():
    return build_family(FamilySpec("path", 2))


@functools.lru_cache(maxsize=None)
def family(kind, n, arms=3):
    return build_family(FamilySpec(kind, n, arms))


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def apply_pauli_vec(p, v):
    """P v by index arithmetic: P = i^(phase + #Y) X^x Z^z."""
    k = np.arange(1 << p.n)
    zsign = np.array([1 - 2 * (bin(int(i) & p.z).count("1") & 1) for i in k])
    coef = 1j ** ((p.phase + (p.x & p.z).bit_count()) % 4)
    out = np.empty_like(v)
    out[k ^ p.x] = coef * zsign * v
    return out


def vec_stabilizer_state(t, seed=1):
    """Stabilizer state as a vector: random start projected by every (1 + g)/2."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << t.n) + 1j * rng.standard_normal(1 << t.n)
    for g in t.generators:
        v = 0.5 * (v + apply_pauli_vec(g, v))
    nrm = np.linalg.norm(v)
    assert nrm > 1e-6, "tableau has no +1 common eigenstate"
    return v / nrm


def dense_branch(v, n, outcomes):
    """Unnormalized state of the unmeasured qubits after measuring ``outcomes``.

    ``outcomes`` maps qubit -> (basis letter, sign); the measured qubits are
    contracted with the matching eigenvector of the dense 2x2 Pauli.
    """
    tensor = v.reshape((2,) * n)
    alive = list(reversed(range(n)))  # axis k holds qubit alive[k]
    for q in sorted(outcomes):
        basis, sign = outcomes[q]
        vals, vecs = np.linalg.eigh(_MATS[basis])
        e = vecs[:, int(np.argmin(np.abs(vals - sign)))]
        axis = alive.index(q)
        tensor = np.tensordot(e.conj(), tensor, axes=([0], [axis]))
        alive.pop(axis)
    return tensor.reshape(-1)


def overlap(a, b):
    return abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real)


# fusion embeddings: (host graph, in, out, pattern) --------------------------


def chained_paths():
    """Two 4-paths 0-1-2 and 5-6-7 joined through the fusion block 2-3-4-5."""
    g = Graph.from_edges(8, [(i, i + 1) for i in range(7)])
    return g, 2, 5, MeasurementPattern.uniform([3, 4], "X")


def crazy_host(in_neighbours=1):
    """Crazy n=2 (vertices 0..5) inside a 12-vertex host."""
    c = family("crazy", 2)
    if in_neighbours == 1:
        host = [(0, 6), (5, 7), (5, 8), (6, 9), (6, 10), (7, 11), (8, 11), (9, 11), (10, 11), (9, 10)]
    else:
        host = [(0, 6), (0, 7), (5, 9), (5, 10), (6, 8), (7, 8), (9, 11), (10, 11), (8, 11)]
    return Graph.from_edges(12, list(c.edges) + host)


def grid_embedding():
    """3x4 grid, V(r, c) = 4r + c; the path V(1,0)-V(1,1)-V(1,2) is cut out by Z on V(0,1), V(2,1)."""
    edges = []
    for r in range(3):
        for c in range(4):
            v = 4 * r + c
            if c < 3:
                edges.append((v, v + 1))
            if r < 2:
                edges.append((v, v + 4))
    g = Graph.from_edges(12, edges)
    pattern = MeasurementPattern(((1, "Z"), (9, "Z"), (5, "X")))
    return g, 4, 6, pattern

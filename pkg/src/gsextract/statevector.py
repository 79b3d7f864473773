"""Dense amplitude simulation of weighted graph states.

Qubit ``q`` is bit ``q`` of the amplitude index (little-endian), the same
convention as the Pauli bitsets.  States may be unnormalized: projections keep
the branch weight in the squared norm, and expectation values are returned raw
so callers can divide by the norm themselves.

Amplitude dump format: the ``2**n`` amplitudes in index order, each written as
two little-endian IEEE-754 float64 values (real part, then imaginary part).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .graphs import Graph, WeightedGraph
from .pauli import DimensionError, PauliString
from .stabilizer import (
    MeasurementPattern,
    Postselect,
    PostMeasurement,
    StabilizerTableau,
    acceptance_conditions,
    from_graph,
    post_measurement,
)

DEFAULT_CAP = 22
DEFAULT_NODES = 41


class CapacityError(ValueError):
    """Register too large for the dense simulator."""


def _check_cap(n: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds the dense-simulation cap of {cap}")


@lru_cache(maxsize=32)
def _indices(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.uint64)
    idx.setflags(write=False)
    return idx


def _popcount_parity(a: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(a) & 1).astype(np.int64)


@dataclass
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n,):
            raise DimensionError(f"expected {1 << self.n} amplitudes, got {self.amps.shape}")

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self) -> StateVector:
        nrm = math.sqrt(self.norm2)
        if nrm == 0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVector(self.n, self.amps / nrm)

    def copy(self) -> StateVector:
        return StateVector(self.n, self.amps.copy())

    def dump(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.amps.astype("<c16").tobytes())

    @classmethod
    def load(cls, path, n: int | None = None) -> StateVector:
        with open(path, "rb") as fh:
            amps = np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
        size = amps.size
        if size == 0 or size & (size - 1):
            raise ValueError("dump length is not a power of two")
        nq = size.bit_length() - 1
        if n is not None and n != nq:
            raise DimensionError(f"dump holds {nq} qubits, expected {n}")
        return cls(nq, amps)


def plus_state(n: int, cap: int | None = None) -> StateVector:
    _check_cap(n, cap)
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def build_weighted(wg: WeightedGraph, cap: int | None = None) -> StateVector:
    """``prod CP(phi_e) |+>^n`` with ``CP(phi) = diag(1, 1, 1, e^{i phi})``."""
    g = wg.base
    _check_cap(g.n, cap)
    idx = _indices(g.n)
    theta = np.zeros(1 << g.n)
    for (i, j), phi in wg.phases.items():
        both = ((idx >> np.uint64(i)) & (idx >> np.uint64(j)) & np.uint64(1)).astype(bool)
        theta[both] += phi
    return StateVector(g.n, np.exp(1j * theta) * 2.0 ** (-g.n / 2))


def build_graph(g: Graph, cap: int | None = None) -> StateVector:
    return build_weighted(WeightedGraph.uniform(g, math.pi), cap)


def _apply_pauli_array(arr: np.ndarray, p: PauliString) -> np.ndarray:
    """Apply ``p`` along the last axis of ``arr`` (a batch of amplitude vectors)."""
    idx = _indices(p.n)
    src = idx ^ np.uint64(p.x)
    signs = 1 - 2 * _popcount_parity(src & np.uint64(p.z))
    coef = 1j ** ((p.phase + (p.x & p.z).bit_count()) % 4)
    return coef * (arr[..., src] * signs)


def apply_pauli(s: StateVector, p: PauliString) -> StateVector:
    if p.n != s.n:
        raise DimensionError("operator and state sizes differ")
    return StateVector(s.n, _apply_pauli_array(s.amps, p))


def project(s: StateVector, q: int, basis: str, sign: int) -> tuple[float, StateVector]:
    """Apply ``(1 + sign * P_q) / 2``; returns the squared norm and the state."""
    if not 0 <= q < s.n:
        raise IndexError(f"qubit {q} out of range")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    op = PauliString.single(s.n, q, basis)
    out = StateVector(s.n, 0.5 * (s.amps + sign * _apply_pauli_array(s.amps, op)))
    return out.norm2, out


def expval(s: StateVector, p: PauliString) -> float:
    """Raw ``<s|P|s>`` (divide by ``s.norm2`` for an unnormalized state)."""
    if p.n != s.n:
        raise DimensionError("operator and state sizes differ")
    return float(np.vdot(s.amps, _apply_pauli_array(s.amps, p)).real)


def fidelity_to_tableau(s: StateVector, t: StabilizerTableau) -> float:
    """Overlap of the (normalized) state with the pure stabilizer state of ``t``."""
    if t.n != s.n:
        raise DimensionError("tableau and state sizes differ")
    phi = s.amps
    for g in t.generators:
        phi = 0.5 * (phi + _apply_pauli_array(phi, g))
    return float(np.vdot(phi, phi).real) / s.norm2


def from_tableau(t: StabilizerTableau, cap: int | None = None) -> StateVector:
    """Dense state of a stabilizer tableau (global phase arbitrary)."""
    _check_cap(t.n, cap)
    rng = np.random.default_rng(0)
    phi = rng.standard_normal(1 << t.n) + 1j * rng.standard_normal(1 << t.n)
    for g in t.generators:
        phi = 0.5 * (phi + _apply_pauli_array(phi, g))
    nrm = np.linalg.norm(phi)
    if nrm < 1e-9:
        raise ValueError("tableau does not describe a state")
    return StateVector(t.n, phi / nrm)


# -- all outcome branches at once --------------------------------------------

_ROTATIONS = {
    "X": np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2),
    "Y": np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / math.sqrt(2),
    "Z": np.eye(2, dtype=np.complex128),
}


def branch_states(s: StateVector, pattern: MeasurementPattern) -> tuple[tuple[int, ...], np.ndarray]:
    """Unnormalized post-measurement states on the unmeasured qubits.

    Returns ``(remaining, arr)`` where row ``k`` of ``arr`` (shape
    ``(2**|I|, 2**|R|)``) is the state for packed outcome ``k``; its squared
    norm is the branch probability times ``s.norm2``.
    """
    n = s.n
    measured = pattern.qubits
    mset = set(measured)
    remaining = tuple(q for q in range(n) if q not in mset)
    tensor = s.amps.reshape((2,) * n) if n else s.amps.reshape(())
    for q, basis in pattern.assignments:
        axis = n - 1 - q
        tensor = np.moveaxis(np.tensordot(_ROTATIONS[basis], tensor, axes=([1], [axis])), 0, axis)
    order = [n - 1 - q for q in reversed(measured)] + [n - 1 - q for q in reversed(remaining)]
    arr = np.transpose(tensor, order).reshape(1 << len(measured), 1 << len(remaining))
    return remaining, np.ascontiguousarray(arr)


def _signs_for(mask: int, nbranch: int) -> np.ndarray:
    k = np.arange(nbranch, dtype=np.uint64)
    return (1 - 2 * _popcount_parity(k & np.uint64(mask))).astype(np.float64)


def branch_fidelities(arr: np.ndarray, target: PostMeasurement) -> np.ndarray:
    """Fidelity of each (unnormalized) branch row with the outcome-indexed target.

    Rows with zero weight get fidelity 0; checks of the target are not applied
    here.
    """
    nb = arr.shape[0]
    phi = arr
    for p, mask in target.generators:
        sg = _signs_for(mask, nb)[:, None]
        phi = 0.5 * (phi + sg * _apply_pauli_array(phi, p))
    num = np.einsum("ij,ij->i", phi.conj(), phi).real
    den = np.einsum("ij,ij->i", arr.conj(), arr).real
    out = np.zeros(nb)
    nz = den > 1e-300
    out[nz] = num[nz] / den[nz]
    return out


def branch_expvals(arr: np.ndarray, p: PauliString) -> np.ndarray:
    """Raw ``<psi_k|P|psi_k>`` for every branch row."""
    return np.einsum("ij,ij->i", arr.conj(), _apply_pauli_array(arr, p)).real


def _mask_ok(nb: int, conds: Sequence[tuple[int, int]]) -> np.ndarray:
    k = np.arange(nb, dtype=np.uint64)
    ok = np.ones(nb, dtype=bool)
    for mask, bit in conds:
        ok &= _popcount_parity(k & np.uint64(mask)) == bit
    return ok


@dataclass
class BranchAnalysis:
    """Per-branch data of one pure state measured with a pattern.

    ``accept_weight`` is the acceptance probability and ``fidelity_weight`` the
    accepted probability mass times fidelity (so the conditional mean fidelity
    is their ratio).
    """

    remaining: tuple[int, ...]
    probabilities: np.ndarray
    fidelities: np.ndarray
    accepted: np.ndarray
    accept_weight: float
    fidelity_weight: float
    observables: dict

    @property
    def mean_fidelity(self) -> float:
        return self.fidelity_weight / self.accept_weight if self.accept_weight > 0 else float("nan")


def analyze_branches(
    s: StateVector,
    ideal: Graph,
    pattern: MeasurementPattern,
    postselect: Postselect | str = Postselect.CHECKS,
    observables: Mapping[str, PauliString] | None = None,
) -> BranchAnalysis:
    """Evaluate every outcome branch of ``s`` against the ideal target.

    Branches violating the ideal checks have no defined target and count with
    fidelity 0; unless postselection is ``NONE`` they are rejected anyway.
    ``observables`` act on the remaining qubits; their values are
    acceptance-weighted raw expectations summed over accepted branches.
    """
    ideal_post = post_measurement(from_graph(ideal), pattern)
    conds = acceptance_conditions(postselect, ideal_post)
    remaining, arr = branch_states(s, pattern)
    nb = arr.shape[0]
    norm2 = s.norm2
    probs = np.einsum("ij,ij->i", arr.conj(), arr).real / norm2
    fids = branch_fidelities(arr, ideal_post)
    fids[~_mask_ok(nb, ideal_post.checks)] = 0.0
    acc = _mask_ok(nb, conds)
    obs = {}
    for name, p in (observables or {}).items():
        obs[name] = float(np.sum(branch_expvals(arr[acc], p))) / norm2
    return BranchAnalysis(
        remaining,
        probs,
        fids,
        acc,
        float(np.sum(probs[acc])),
        float(np.sum(probs[acc] * fids[acc])),
        obs,
    )


def shared_phase_state(g: Graph, eps: float, cap: int | None = None) -> StateVector:
    """Every edge carries phase ``pi + eps`` (one correlated noise realization)."""
    return build_weighted(WeightedGraph.uniform(g, math.pi + eps), cap)


@dataclass
class GaussianAverage:
    sigma: float
    acceptance: float
    mean_fidelity: float
    observables: dict
    nodes: int


def gaussian_phase_average(
    g: Graph,
    sigma: float,
    pattern: MeasurementPattern | None = None,
    postselect: Postselect | str = Postselect.CHECKS,
    observables: Mapping[str, PauliString] | None = None,
    nodes: int = DEFAULT_NODES,
    cap: int | None = None,
) -> GaussianAverage:
    """Average over one shared Gaussian phase error by Gauss-Hermite quadrature.

    ``mean_fidelity`` is acceptance-conditioned; ``observables`` are
    acceptance-conditioned averages of the normalized branch expectations.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    pattern = MeasurementPattern.all_x(g) if pattern is None else pattern
    if sigma == 0:
        xs, ws = np.array([0.0]), np.array([1.0])
    else:
        xs, ws = hermegauss(nodes)
        ws = ws / math.sqrt(2 * math.pi)
    acc = fid = 0.0
    obs = {k: 0.0 for k in (observables or {})}
    for x, w in zip(xs, ws):
        b = analyze_branches(shared_phase_state(g, sigma * x, cap), g, pattern, postselect, observables)
        acc += w * b.accept_weight
        fid += w * b.fidelity_weight
        for k, v in b.observables.items():
            obs[k] += w * v
    if acc <= 0:
        return GaussianAverage(sigma, 0.0, float("nan"), {k: float("nan") for k in obs}, len(xs))
    return GaussianAverage(sigma, acc, fid / acc, {k: v / acc for k, v in obs.items()}, len(xs))


# -- signed low-order density decomposition -----------------------------------


class DensityAccumulator:
    """Dense (possibly non-positive) Hermitian operator built from weighted projectors."""

    def __init__(self, n: int, cap: int = 10):
        _check_cap(n, cap)
        self.n = n
        self.matrix = np.zeros((1 << n, 1 << n), dtype=np.complex128)
        self.total_weight = 0.0

    def add(self, weight: float, vec: np.ndarray) -> None:
        self.matrix += weight * np.outer(vec, vec.conj())
        self.total_weight += weight * float(np.vdot(vec, vec).real)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def expval(self, p: PauliString) -> float:
        """``Tr(rho P)``."""
        if p.n != self.n:
            raise DimensionError("operator and density sizes differ")
        # P acts on the row index: apply it to every column.
        prho = _apply_pauli_array(self.matrix.T, p)
        return float(np.trace(prho).real)

    def project(self, q: int, basis: str, sign: int) -> DensityAccumulator:
        op = PauliString.single(self.n, q, basis)
        proj = np.eye(1 << self.n, dtype=np.complex128)
        proj = 0.5 * (proj + sign * _apply_pauli_array(proj.T, op).T)
        out = DensityAccumulator(self.n, cap=self.n)
        out.matrix = proj @ self.matrix @ proj
        out.total_weight = out.trace
        return out


def correlated_loworder_density(g: Graph, p: float, cap: int = 10) -> DensityAccumulator:
    """Low-order signed decomposition of the shared-phase-noise ensemble.

    ``rho = (1 - p|E|) G + p sum_e G_{-e}
    + p/2 sum_{e != e'} sum_{s,s'} s s' G[sqrt(CZ)^s on e, sqrt(CZ)^{s'} on e']``
    where ``G[...]`` is the pure graph state with the listed edges replaced by
    ``diag(1, 1, 1, +-i)`` and the outer sum runs over ordered edge pairs.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    acc = DensityAccumulator(g.n, cap)
    edges = g.edges
    acc.add(1 - p * len(edges), build_graph(g).amps)
    if p == 0:
        return acc
    for e in edges:
        acc.add(p, build_graph(g.without_edges([e])).amps)
    for e in edges:
        for f in edges:
            if e == f:
                continue
            for s1 in (1, -1):
                for s2 in (1, -1):
                    phases = {k: math.pi for k in edges}
                    phases[e] = s1 * math.pi / 2
                    phases[f] = s2 * math.pi / 2
                    vec = build_weighted(WeightedGraph(g, phases)).amps
                    acc.add(0.5 * p * s1 * s2, vec)
    return acc

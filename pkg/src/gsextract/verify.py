"""Built-in self checks run by ``gsextract verify``.

Each check returns a :class:`CheckResult`; the CLI prints one line per check
and exits nonzero if any fails.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .experiment import ExtractionProtocol, tableau_weights
from .graphs import FamilySpec, Graph, build_family
from .noise import FlippedQubits, LostEdges, realize_state
from .pauli import PauliString
from .stabilizer import (
    MeasurementPattern,
    from_graph,
    lemma_state,
    measure_and_reduce,
    post_measurement,
    stab_fidelity,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    rows: list = field(default_factory=list)


# Leading value and eps^2 coefficient of twice the unnormalized branch quantities
# on the square graph (terminals 0 and 3, measured 1 and 2, shared phase pi+eps).
SQUARE_SERIES = {
    "+": {"norm": (1.0, -1.0), "ZZ": (1.0, -1.0), "XX": (1.0, -3.0), "YY": (-1.0, 3.0)},
    "-": {"norm": (1.0, -0.5), "ZZ": (-1.0, 0.5), "XX": (1.0, -0.5), "YY": (1.0, -0.5)},
}


def square_branch_values(eps: float) -> dict:
    """Twice the squared norm and raw terminal correlators of both ``X1 = X2`` branches."""
    g = build_family(FamilySpec("twisted", 1))
    state = sv.shared_phase_state(g, eps)
    ops = {k: PauliString.from_letters({0: k[0], 3: k[1]}, 4) for k in ("ZZ", "XX", "YY")}
    out = {}
    for label, sign in (("+", 1), ("-", -1)):
        _, a = sv.project(state, 1, "X", sign)
        _, b = sv.project(a, 2, "X", sign)
        vals = {"norm": 2 * b.norm2}
        for k, op in ops.items():
            vals[k] = 2 * sv.expval(b, op)
        out[label] = vals
    return out


def check_square_series(eps_values=(0.02, 0.05, 0.1), tol_factor: float = 5.0) -> CheckResult:
    rows = []
    ok = True
    for eps in eps_values:
        vals = square_branch_values(eps)
        for branch, series in SQUARE_SERIES.items():
            for key, (c0, c2) in series.items():
                got = vals[branch][key]
                expected = c0 + c2 * eps**2
                resid = abs(got - expected)
                passed = resid <= tol_factor * eps**4
                ok &= passed
                rows.append((eps, branch, key, got, expected, (got - c0) / eps**2, c2, passed))
    return CheckResult("square shared-phase series", ok, f"{len(rows)} values", rows)


def check_crazy_immunity(n_values=range(2, 7)) -> CheckResult:
    """Single internal edge losses never lower the postselected fidelity."""
    bad = []
    count = 0
    for n in n_values:
        proto = ExtractionProtocol(FamilySpec("crazy", n))
        term = set(proto.graph.terminals)
        for e in proto.graph.edges:
            if term & set(e):
                continue
            a, f = tableau_weights(proto, realize_state(proto.graph, LostEdges(frozenset([e]))))
            count += 1
            if a == 0 or f != a:
                bad.append((n, e))
    return CheckResult("crazy internal edge immunity", not bad, f"{count} defects, failures {bad}")


def check_flip_detection(n_values=range(2, 7)) -> CheckResult:
    """A single internal Z flip always violates an embedded check."""
    bad = []
    count = 0
    for n in n_values:
        proto = ExtractionProtocol(FamilySpec("crazy", n))
        for q in proto.graph.internal:
            a, _ = tableau_weights(proto, realize_state(proto.graph, FlippedQubits(frozenset([q]))))
            count += 1
            if a != 0:
                bad.append((n, q))
    return CheckResult("crazy single-flip detection", not bad, f"{count} flips, failures {bad}")


def random_graph(n: int, rng: np.random.Generator, density: float | None = None) -> Graph:
    density = rng.uniform(0.2, 0.8) if density is None else density
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    return Graph.from_edges(n, edges)


def random_pattern(n: int, rng: np.random.Generator, min_left: int = 1) -> MeasurementPattern:
    k = int(rng.integers(0, n - min_left + 1))
    qubits = [int(q) for q in rng.permutation(n)[:k]]
    return MeasurementPattern(tuple((q, "XYZ"[int(rng.integers(3))]) for q in qubits))


def cross_engine_case(g: Graph, pattern: MeasurementPattern, rng: np.random.Generator) -> str | None:
    """Compare both stabilizer routes and the dense simulator; returns a failure message or None."""
    t = from_graph(g)
    outcome, prob, post = measure_and_reduce(t, pattern, rng=rng)
    lemma = lemma_state(t, pattern, outcome)
    if stab_fidelity(post, lemma) != 1:
        return "tableau update and consistent-subgroup reconstruction disagree"
    state = sv.build_graph(g)
    remaining, arr = sv.branch_states(state, pattern)
    s = pattern.pack(outcome)
    row = arr[s]
    p_dense = float(np.vdot(row, row).real)
    if abs(p_dense - float(prob)) > 1e-9:
        return f"branch probability {p_dense} != {prob}"
    branch = sv.StateVector(len(remaining), row)
    if abs(sv.fidelity_to_tableau(branch, post) - 1) > 1e-9:
        return "dense post-measurement state is not the tableau state"
    other = from_graph(random_graph(len(remaining), rng)) if remaining else post
    exact = stab_fidelity(post, other)
    dense = sv.fidelity_to_tableau(sv.from_tableau(post), other)
    if abs(dense - float(exact)) > 1e-9:
        return f"fidelity {dense} != {exact}"
    pm = post_measurement(t, pattern)
    if not pm.check_ok(s):
        return "observed outcome violates a check"
    return None


def check_cross_engine(cases: int = 60, max_n: int = 8, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(cases):
        n = int(rng.integers(2, max_n + 1))
        g = random_graph(n, rng)
        pattern = random_pattern(n, rng)
        msg = cross_engine_case(g, pattern, rng)
        if msg:
            failures.append(msg)
    return CheckResult("cross-engine equivalence", not failures, f"{cases} cases, {len(failures)} failures")


def run_all() -> list[CheckResult]:
    return [
        check_square_series(),
        check_crazy_immunity(),
        check_flip_detection(),
        check_cross_engine(),
    ]

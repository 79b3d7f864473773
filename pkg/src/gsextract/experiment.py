"""The extraction protocol, average fidelity and fidelity susceptibility.

Averaging convention.  For a noise realization ``i`` let ``A_i`` be the
probability that the measurement record is accepted and ``N_i`` the accepted
probability mass weighted by the fidelity with the ideal target.  The reported
mean fidelity is ``sum_i w_i N_i / sum_i w_i A_i``: runs failing postselection
are discarded before averaging.

For Clifford realizations (edge loss, Z flips) ``A_i`` and ``N_i`` are exact
dyadic rationals.  The outcome record is uniform over an affine subspace of
GF(2)^|I|, acceptance and nonzero fidelity are affine conditions on it, and the
fidelity is constant wherever it is nonzero, so every branch sum reduces to
ranks of affine systems.  Shared-phase realizations use the dense simulator
and enumerate all branches.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import gf2
from .graphs import Family, FamilySpec, Graph, build_family
from .noise import (
    CorrelatedPhase,
    FlippedQubits,
    LocalZFlip,
    LostEdges,
    NoiseModel,
    NoiseRealization,
    SharedPhase,
    UncorrelatedEdge,
    model_to_dict,
    realization_key,
    realize_state,
    sample_realization,
    with_strength,
)
from .stabilizer import (
    MeasurementPattern,
    OutcomeRecord,
    PostMeasurement,
    Postselect,
    StabilizerTableau,
    acceptance_conditions,
    fidelity_conditions,
    from_graph,
    measure_pattern,
    post_measurement,
    reduce,
    stab_fidelity,
)
from . import statevector as sv

CHUNK = 2048
EXACT_MAX_DEFECTS = 16
CSV_VERSION = 1
CSV_COLUMNS = (
    "family", "n", "model", "param", "p", "samples", "accepted",
    "mean_fidelity", "stderr", "alpha", "method", "seed",
)


class TargetKind(str, Enum):
    BELL = "bell"
    GHZ = "ghz"


class EmptyEstimateError(RuntimeError):
    """No run passed postselection, so no fidelity estimate exists."""


@dataclass(frozen=True)
class ExtractionProtocol:
    family: FamilySpec
    postselect: Postselect = Postselect.CHECKS
    pattern: MeasurementPattern | None = None

    def __post_init__(self):
        object.__setattr__(self, "postselect", Postselect.parse(self.postselect))
        g = self.graph
        if self.pattern is None:
            object.__setattr__(self, "pattern", MeasurementPattern.all_x(g))
        elif set(self.pattern.qubits) != set(g.internal):
            raise ValueError("pattern must cover exactly the internal vertices")
        # validates uniform-sign filters against the ideal checks
        _ = self.accept_conditions

    @cached_property
    def graph(self) -> Graph:
        return build_family(self.family)

    @property
    def target_kind(self) -> TargetKind:
        return TargetKind.GHZ if self.family.kind.is_ghz else TargetKind.BELL

    @cached_property
    def ideal(self) -> PostMeasurement:
        return post_measurement(from_graph(self.graph), self.pattern)

    @cached_property
    def accept_conditions(self) -> tuple[tuple[int, int], ...]:
        return acceptance_conditions(self.postselect, self.ideal)

    @property
    def n_measured(self) -> int:
        return len(self.pattern)

    def label(self) -> str:
        return f"{self.family.kind.value}(n={self.family.n},{self.postselect.value})"


def _weight(k: int, r: int | None) -> Fraction:
    return Fraction(0) if r is None else Fraction(1, 2 ** (r - k))


def tableau_weights(proto: ExtractionProtocol, t: StabilizerTableau) -> tuple[Fraction, Fraction]:
    """Exact ``(A, N)`` for one prepared stabilizer state."""
    k = proto.n_measured
    actual = post_measurement(t, proto.pattern)
    r1 = gf2.affine_rank(actual.checks, k)
    if r1 is None:
        raise AssertionError("a physical state produced contradictory checks")
    acc = actual.checks + proto.accept_conditions
    a = _weight(r1, gf2.affine_rank(acc, k))
    if a == 0:
        return a, Fraction(0)
    fc = fidelity_conditions(actual, proto.ideal)
    r3 = gf2.affine_rank(acc + proto.ideal.checks + fc.conditions, k)
    return a, _weight(r1, r3) * fc.value


def statevector_weights(proto: ExtractionProtocol, state: sv.StateVector) -> tuple[float, float]:
    b = sv.analyze_branches(state, proto.graph, proto.pattern, proto.postselect)
    return b.accept_weight, b.fidelity_weight


def realization_weights(proto: ExtractionProtocol, r: NoiseRealization):
    prepared = realize_state(proto.graph, r)
    if isinstance(prepared, StabilizerTableau):
        return tableau_weights(proto, prepared)
    return statevector_weights(proto, sv.build_weighted(prepared))


@lru_cache(maxsize=1 << 17)
def _cached_weights(proto: ExtractionProtocol, key) -> tuple[float, float]:
    kind, payload = key
    if kind == "E":
        r = LostEdges(frozenset(payload))
    elif kind == "Z":
        r = FlippedQubits(frozenset(payload))
    else:
        r = SharedPhase(payload)
    a, n = realization_weights(proto, r)
    return float(a), float(n)


# -- single runs ----------------------------------------------------------


@dataclass
class RunRecord:
    accepted: bool
    fidelity: float
    outcome: OutcomeRecord
    weight: float


def run_once(proto: ExtractionProtocol, model: NoiseModel, rng: np.random.Generator) -> RunRecord:
    """One pass through the protocol with a sampled outcome record."""
    r = sample_realization(proto.graph, model, rng)
    prepared = realize_state(proto.graph, r)
    pattern = proto.pattern
    if isinstance(prepared, StabilizerTableau):
        outcome, prob, t = measure_pattern(prepared, pattern, rng=rng)
        s = pattern.pack(outcome)
        ok = all(gf2.parity(s & m) == b for m, b in proto.accept_conditions)
        fid = 0.0
        if ok and proto.ideal.check_ok(s):
            post = reduce(t, pattern.qubits)
            fid = float(stab_fidelity(post, proto.ideal.state(s)))
        return RunRecord(ok, fid, outcome, float(prob))
    b = sv.analyze_branches(sv.build_weighted(prepared), proto.graph, pattern, proto.postselect)
    probs = b.probabilities / b.probabilities.sum()
    s = int(rng.choice(len(probs), p=probs))
    ok = bool(b.accepted[s])
    return RunRecord(ok, float(b.fidelities[s]) if ok else 0.0, pattern.unpack(s), float(probs[s]))


# -- averaging ------------------------------------------------------------


@dataclass
class ExperimentResult:
    samples: int
    accepted: int
    mean_fidelity: float
    stderr: float
    acceptance_rate: float
    method: str = "montecarlo"
    per_branch: dict | None = None

    @property
    def empty(self) -> bool:
        return self.accepted == 0

    def to_dict(self) -> dict:
        return asdict(self)


def _chunk_sums(proto: ExtractionProtocol, model: NoiseModel, seed: int, chunk: int, size: int):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    a_s, n_s = [], []
    accepted = 0
    for _ in range(size):
        r = sample_realization(proto.graph, model, rng)
        a, nn = _cached_weights(proto, realization_key(r))
        a_s.append(a)
        n_s.append(nn)
        accepted += a > 0
    fs = math.fsum
    return (
        size, accepted, fs(a_s), fs(n_s),
        fs(x * x for x in a_s), fs(x * x for x in n_s), fs(x * y for x, y in zip(a_s, n_s)),
    )


def _chunks(n_samples: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK, n_samples - c * CHUNK)) for c in range((n_samples + CHUNK - 1) // CHUNK)]


def mean_fidelity(
    proto: ExtractionProtocol,
    model: NoiseModel,
    n_samples: int,
    seed: int,
    threads: int = 1,
) -> ExperimentResult:
    """Monte Carlo over noise realizations with every outcome branch evaluated exactly.

    The sample space is cut into fixed chunks, each with its own seeded
    substream, and chunk sums are reduced in chunk order, so the result does
    not depend on ``threads``.  The standard error is the delta-method error of
    the ratio estimator.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    chunks = _chunks(n_samples)
    if threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(_chunk_sums, proto, model, seed, c, size) for c, size in chunks]
            parts = [f.result() for f in futs]
    else:
        parts = [_chunk_sums(proto, model, seed, c, size) for c, size in chunks]
    cols = list(zip(*parts))
    n = sum(cols[0])
    accepted = sum(cols[1])
    sa, sn, saa, snn, san = (math.fsum(c) for c in cols[2:])
    if sa <= 0:
        return ExperimentResult(n, 0, float("nan"), float("nan"), 0.0)
    f = sn / sa
    abar = sa / n
    if n > 1:
        resid = max(snn - 2 * f * san + f * f * saa, 0.0)
        stderr = math.sqrt(resid / (n * (n - 1))) / abar
    else:
        stderr = 0.0
    return ExperimentResult(n, accepted, min(max(f, 0.0), 1.0), stderr, abar)


def quadrature_mean_fidelity(
    proto: ExtractionProtocol, model: CorrelatedPhase, nodes: int = sv.DEFAULT_NODES
) -> ExperimentResult:
    """Deterministic Gauss-Hermite average for shared-phase noise."""
    if not isinstance(model, CorrelatedPhase):
        raise TypeError("quadrature applies to correlated phase noise only")
    avg = sv.gaussian_phase_average(proto.graph, model.sigma, proto.pattern, proto.postselect, nodes=nodes)
    if not avg.acceptance > 0:
        return ExperimentResult(avg.nodes, 0, float("nan"), float("nan"), 0.0, "quadrature")
    return ExperimentResult(avg.nodes, avg.nodes, avg.mean_fidelity, 0.0, avg.acceptance, "quadrature")


# -- exact enumeration over defects ---------------------------------------


def _defect_sites(proto: ExtractionProtocol, model: NoiseModel) -> list:
    if isinstance(model, UncorrelatedEdge):
        return list(proto.graph.edges)
    if isinstance(model, LocalZFlip):
        return list(range(proto.graph.n))
    raise ValueError("exact defect enumeration needs edge-loss or Z-flip noise")


def _defect_weights(proto: ExtractionProtocol, model: NoiseModel, combo) -> tuple[Fraction, Fraction]:
    if isinstance(model, UncorrelatedEdge):
        r = LostEdges(frozenset(combo))
    else:
        r = FlippedQubits(frozenset(combo))
    return realization_weights(proto, r)


@dataclass
class ExactCurve:
    """``<F>(p)`` as an exact rational function of the defect probability.

    ``acc[k]`` and ``fid[k]`` sum ``A`` and ``N`` over all realizations with
    exactly ``k`` defects among ``sites`` sites.
    """

    sites: int
    acc: list[Fraction]
    fid: list[Fraction]

    def _sums(self, p):
        a = n = 0
        q = 1 - p
        for k in range(self.sites + 1):
            w = p**k * q ** (self.sites - k)
            a += w * self.acc[k]
            n += w * self.fid[k]
        return a, n

    def value(self, p) -> Fraction | float:
        a, n = self._sums(p)
        if a == 0:
            raise EmptyEstimateError("no accepted branch at this noise level")
        return n / a

    def acceptance(self, p):
        return self._sums(p)[0]

    @property
    def first_order_alpha(self) -> Fraction:
        return (self.acc[1] - self.fid[1]) / self.acc[0]


def exact_curve(proto: ExtractionProtocol, model: NoiseModel, max_sites: int = EXACT_MAX_DEFECTS) -> ExactCurve:
    """Enumerate every defect pattern, directly or up to symmetry.

    Up to ``max_sites`` sites all ``2**sites`` realizations are evaluated.
    Larger GHZ stars fall back to :func:`_reduced_curve` when its work
    estimate stays below ``REDUCED_MAX_EVALS``.
    """
    sites = _defect_sites(proto, model)
    m = len(sites)
    if m > max_sites:
        plan = _arm_plan(proto, model)
        if plan is not None and plan.work <= REDUCED_MAX_EVALS:
            return _reduced_curve(proto, model, plan)
        raise ValueError(f"{m} defect sites exceed the exact-enumeration limit of {max_sites}")
    acc = [Fraction(0)] * (m + 1)
    fid = [Fraction(0)] * (m + 1)
    for k in range(m + 1):
        for combo in itertools.combinations(sites, k):
            a, n = _defect_weights(proto, model, combo)
            acc[k] += a
            fid[k] += n
    return ExactCurve(m, acc, fid)


# -- symmetry-reduced enumeration for GHZ stars -----------------------------

REDUCED_MAX_EVALS = 200_000


@dataclass(frozen=True)
class _ArmPlan:
    """Defect sites of a GHZ star split into identical arms plus shared sites.

    ``arm_sites[j][b]`` is the site of arm ``j`` with local index ``b``, aligned
    across arms.  ``orbits`` lists ``(representative mask, orbit size, defects)``
    for subsets of one arm's sites under the arm's automorphisms.
    """

    arm_sites: tuple
    shared: tuple
    orbits: tuple

    @property
    def work(self) -> int:
        return math.comb(len(self.orbits) + len(self.arm_sites) - 1, len(self.arm_sites)) << len(self.shared)


def _arm_plan(proto: ExtractionProtocol, model: NoiseModel) -> _ArmPlan | None:
    """Arm decomposition, or None when the protocol is not arm-symmetric.

    Valid because arm permutations and layer-preserving automorphisms of an
    arm that fix the centre are automorphisms of the ideal graph that keep
    the measured set, a uniform measurement basis and the terminal set, so
    the weights ``(A, N)`` are constant on orbits.
    """
    g = proto.graph
    if not proto.family.kind.is_ghz or isinstance(model, CorrelatedPhase):
        return None
    if len({proto.pattern.basis(q) for q in proto.pattern.qubits}) != 1:
        return None
    arms = proto.family.arms
    size = (g.n - 1) // arms
    starts = [1 + j * size for j in range(arms)]

    def local(v, j):
        return -1 if v == 0 else v - starts[j]

    if isinstance(model, UncorrelatedEdge):
        per_arm = []
        for j in range(arms):
            own = [e for e in g.edges if starts[j] <= e[1] < starts[j] + size]
            per_arm.append(sorted(own, key=lambda e, j=j: (local(e[0], j), local(e[1], j))))
        local_sites = [(local(a, 0), local(b, 0)) for a, b in per_arm[0]]
        for j in range(1, arms):
            if [(local(a, j), local(b, j)) for a, b in per_arm[j]] != local_sites:
                return None
        shared = ()
    else:
        per_arm = [list(range(st, st + size)) for st in starts]
        local_sites = list(range(size))
        shared = (0,)
    m_arm = len(local_sites)
    if m_arm > 16:
        return None
    local_edges = {(local(a, 0), local(b, 0)) for a, b in g.edges if starts[0] <= b < starts[0] + size}
    by_layer: dict[int, list[int]] = {}
    for i in range(size):
        by_layer.setdefault(g.layers[starts[0] + i], []).append(i)
    groups = list(by_layer.values())
    index = {site: b for b, site in enumerate(local_sites)}
    site_perms = []
    for choice in itertools.product(*(itertools.permutations(grp) for grp in groups)):
        pi = {-1: -1}
        for grp, img in zip(groups, choice):
            pi.update(zip(grp, img))
        mapped = {tuple(sorted((pi[a], pi[b]))) for a, b in local_edges}
        if mapped != local_edges:
            continue
        if isinstance(model, UncorrelatedEdge):
            site_perms.append([index[tuple(sorted((pi[a], pi[b])))] for a, b in local_sites])
        else:
            site_perms.append([pi[i] for i in local_sites])
    orbits: dict[int, list[int]] = {}
    for mask in range(1 << m_arm):
        canon = min(
            sum(1 << perm[b] for b in range(m_arm) if (mask >> b) & 1) for perm in site_perms
        )
        entry = orbits.setdefault(canon, [0, mask.bit_count()])
        entry[0] += 1
    return _ArmPlan(
        tuple(tuple(sites) for sites in per_arm),
        shared,
        tuple((rep, cnt, k) for rep, (cnt, k) in sorted(orbits.items())),
    )


def _reduced_curve(proto: ExtractionProtocol, model: NoiseModel, plan: _ArmPlan) -> ExactCurve:
    """Exact curve from one evaluation per multiset of arm orbits."""
    arms = len(plan.arm_sites)
    m = arms * len(plan.arm_sites[0]) + len(plan.shared)
    acc = [Fraction(0)] * (m + 1)
    fid = [Fraction(0)] * (m + 1)
    for smask in range(1 << len(plan.shared)):
        base = [site for b, site in enumerate(plan.shared) if (smask >> b) & 1]
        for combo in itertools.combinations_with_replacement(range(len(plan.orbits)), arms):
            mult = math.factorial(arms)
            for c in set(combo):
                mult //= math.factorial(combo.count(c))
            sites = list(base)
            k = len(base)
            for j, o in enumerate(combo):
                rep, cnt, kk = plan.orbits[o]
                mult *= cnt
                k += kk
                sites.extend(plan.arm_sites[j][b] for b in range(len(plan.arm_sites[j])) if (rep >> b) & 1)
            a, n = _defect_weights(proto, model, sites)
            acc[k] += mult * a
            fid[k] += mult * n
    return ExactCurve(m, acc, fid)


def exact_mean_fidelity(proto: ExtractionProtocol, model: NoiseModel) -> ExperimentResult:
    curve = exact_curve(proto, model)
    p = Fraction(model.p)
    a, n = curve._sums(p)
    if a == 0:
        return ExperimentResult(2**curve.sites, 0, float("nan"), float("nan"), 0.0, "exact")
    return ExperimentResult(2**curve.sites, 2**curve.sites, float(n / a), 0.0, float(a), "exact")


# -- susceptibility ---------------------------------------------------------


class SusceptibilityMethod(str, Enum):
    DISCRETE = "discrete_derivative"
    FIRST_ORDER = "first_order_exact"
    QUADRATURE = "quadrature"


@dataclass
class SusceptibilityResult:
    alpha: float
    p_star: float
    method: SusceptibilityMethod
    stderr: float = 0.0
    exact: Fraction | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        out["exact"] = None if self.exact is None else str(self.exact)
        return out


def susceptibility_first_order(proto: ExtractionProtocol, model: NoiseModel) -> SusceptibilityResult:
    """Exact ``-d<F>/dp`` at ``p = 0`` from single defects.

    With ``A0`` the ideal acceptance and ``(A_d, N_d)`` the weights of the state
    with the single defect ``d``, ``alpha = sum_d (A_d - N_d) / A0``; the
    ``(1 - p)**m`` factors cancel between numerator and denominator.
    """
    if isinstance(model, CorrelatedPhase):
        raise ValueError("first-order enumeration is not defined for correlated phase noise")
    sites = _defect_sites(proto, model)
    a0, n0 = tableau_weights(proto, from_graph(proto.graph))
    if a0 == 0:
        raise EmptyEstimateError("the noiseless protocol never accepts")
    total = Fraction(0)
    for site in sites:
        a, n = _defect_weights(proto, model, (site,))
        total += a - n
    alpha = total / a0
    return SusceptibilityResult(float(alpha), 0.0, SusceptibilityMethod.FIRST_ORDER, 0.0, alpha)


def susceptibility(
    proto: ExtractionProtocol,
    model: NoiseModel,
    p_star: float = 1e-2,
    n_samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> SusceptibilityResult:
    """Discrete estimate ``(1 - <F>(p*)) / p*`` by Monte Carlo.

    The model's own strength is replaced by ``p_star`` (mapped to sigma for
    correlated phase noise).
    """
    if not 0 < p_star <= 0.1:
        raise ValueError("p_star must lie in (0, 0.1]")
    res = mean_fidelity(proto, with_strength(model, p_star), n_samples, seed, threads)
    if res.empty:
        raise EmptyEstimateError("no accepted runs at p_star")
    return SusceptibilityResult(
        (1 - res.mean_fidelity) / p_star, p_star, SusceptibilityMethod.DISCRETE, res.stderr / p_star
    )


def susceptibility_quadrature(
    proto: ExtractionProtocol, p_star: float = 1e-2, nodes: int = sv.DEFAULT_NODES
) -> SusceptibilityResult:
    """``(1 - <F>(p*)) / p*`` for correlated phase noise without sampling error."""
    if not 0 < p_star <= 0.1:
        raise ValueError("p_star must lie in (0, 0.1]")
    res = quadrature_mean_fidelity(proto, CorrelatedPhase.from_p(p_star), nodes)
    if res.empty:
        raise EmptyEstimateError("no accepted branches at p_star")
    return SusceptibilityResult((1 - res.mean_fidelity) / p_star, p_star, SusceptibilityMethod.QUADRATURE)


def stencil_alpha(curve: ExactCurve, p1=Fraction(1, 1000), p2=Fraction(2, 1000)) -> Fraction:
    """Derivative at zero from ``<F>(0) = 1`` and two exact samples.

    Fits the quadratic through ``(0, 1)``, ``(p1, F1)``, ``(p2, F2)``.
    """
    d1 = (1 - curve.value(p1)) / p1
    d2 = (1 - curve.value(p2)) / p2
    return (p2 * d1 - p1 * d2) / (p2 - p1)


# -- curves and output ------------------------------------------------------


def exact_available(proto: ExtractionProtocol, model: NoiseModel) -> bool:
    if isinstance(model, CorrelatedPhase):
        return False
    if len(_defect_sites(proto, model)) <= EXACT_MAX_DEFECTS:
        return True
    plan = _arm_plan(proto, model)
    return plan is not None and plan.work <= REDUCED_MAX_EVALS


def estimate(
    proto: ExtractionProtocol,
    model: NoiseModel,
    n_samples: int,
    seed: int,
    threads: int = 1,
    method: str = "auto",
    curve: ExactCurve | None = None,
) -> ExperimentResult:
    """Mean fidelity by the best available method.

    ``auto`` uses exhaustive enumeration when the defect count allows it and
    Monte Carlo otherwise.
    """
    if method == "quadrature":
        return quadrature_mean_fidelity(proto, model)
    use_exact = method == "exact" or (method == "auto" and exact_available(proto, model))
    if use_exact:
        if curve is None:
            return exact_mean_fidelity(proto, model)
        a, n = curve._sums(Fraction(model.p))
        total = 2**curve.sites
        if a == 0:
            return ExperimentResult(total, 0, float("nan"), float("nan"), 0.0, "exact")
        return ExperimentResult(total, total, float(n / a), 0.0, float(a), "exact")
    return mean_fidelity(proto, model, n_samples, seed, threads)


def fidelity_curve(
    proto: ExtractionProtocol,
    model: NoiseModel,
    p_grid: Sequence[float],
    n_samples: int,
    seed: int,
    threads: int = 1,
    method: str = "auto",
) -> list[tuple[float, ExperimentResult]]:
    """Mean fidelity on a grid of noise strengths, all points from the same seed."""
    out = []
    curve = None
    if method in ("auto", "exact") and exact_available(proto, model):
        curve = exact_curve(proto, model)
    for p in p_grid:
        m = with_strength(model, p) if not isinstance(model, CorrelatedPhase) else (
            CorrelatedPhase(0.0) if p == 0 else CorrelatedPhase.from_p(p))
        out.append((p, estimate(proto, m, n_samples, seed, threads, method, curve)))
    return out


def model_param(model: NoiseModel) -> tuple[str, float]:
    d = model_to_dict(model)
    return ("sigma", d["sigma"]) if "sigma" in d else ("p", d["p"])


@dataclass
class ResultRow:
    family: str
    n: int
    model: str
    param: float
    p: float
    samples: int
    accepted: int
    mean_fidelity: float
    stderr: float
    alpha: float | None
    method: str
    seed: int

    @classmethod
    def build(cls, proto, model, result: ExperimentResult | None, seed: int,
              alpha: float | None = None, method: str | None = None) -> ResultRow:
        _, param = model_param(model)
        nan = float("nan")
        return cls(
            proto.family.kind.value,
            proto.family.n,
            model.name,
            param,
            model.strength,
            result.samples if result else 0,
            result.accepted if result else 0,
            result.mean_fidelity if result else nan,
            result.stderr if result else nan,
            alpha,
            method or (result.method if result else ""),
            seed,
        )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    buf.write(f"# gsextract results v{CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: Sequence[ResultRow]) -> str:
    def clean(v):
        if isinstance(v, (float, np.floating)):
            return None if math.isnan(v) else float(v)
        return int(v) if isinstance(v, np.integer) else v

    doc = {
        "version": CSV_VERSION,
        "columns": list(CSV_COLUMNS),
        "rows": [{c: clean(getattr(r, c)) for c in CSV_COLUMNS} for r in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


__all__ = [
    "CSV_COLUMNS",
    "EmptyEstimateError",
    "ExactCurve",
    "ExperimentResult",
    "ExtractionProtocol",
    "Family",
    "ResultRow",
    "SusceptibilityMethod",
    "SusceptibilityResult",
    "TargetKind",
    "estimate",
    "exact_curve",
    "exact_mean_fidelity",
    "fidelity_curve",
    "mean_fidelity",
    "quadrature_mean_fidelity",
    "rows_to_csv",
    "rows_to_json",
    "run_once",
    "stencil_alpha",
    "susceptibility",
    "susceptibility_first_order",
    "susceptibility_quadrature",
    "tableau_weights",
]

"""Stabilizer states: graph-state preparation, Pauli measurement, post-measurement
structure, fidelities and the fusion check.

Outcome conventions
-------------------
An :class:`OutcomeRecord` maps each measured qubit to ``+1``/``-1``.  Internally
outcomes are packed into an int ``s`` over the positions of the measurement
pattern: bit ``k`` is set when the ``k``-th measured qubit returned ``-1``.
Every sign that depends on the outcomes is then ``(-1)**parity(s & mask)`` for a
fixed mask, which turns postselection and fidelity conditions into affine
equations over GF(2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import gf2
from .graphs import Graph, generator
from .pauli import DimensionError, PauliString, commutes, multiply, restrict

OutcomeRecord = dict[int, int]

_BASES = ("X", "Y", "Z")


class ImpossibleOutcomeError(ValueError):
    """A forced outcome contradicts a deterministic measurement."""


class InconsistentOutcomeError(ValueError):
    """Observed signs violate a parity constraint of the reference state."""


@dataclass(frozen=True)
class MeasurementPattern:
    """Single-qubit Pauli measurements, in the order they are performed."""

    assignments: tuple[tuple[int, str], ...]

    def __post_init__(self):
        seen = set()
        norm = []
        for q, basis in self.assignments:
            basis = basis.upper()
            if basis not in _BASES:
                raise ValueError(f"basis must be one of X, Y, Z; got {basis!r}")
            if q in seen:
                raise ValueError(f"qubit {q} measured twice")
            seen.add(q)
            norm.append((int(q), basis))
        object.__setattr__(self, "assignments", tuple(norm))

    @classmethod
    def uniform(cls, qubits: Iterable[int], basis: str = "X") -> MeasurementPattern:
        return cls(tuple((q, basis) for q in qubits))

    @classmethod
    def all_x(cls, g: Graph) -> MeasurementPattern:
        """X on every internal (non-terminal) vertex."""
        return cls.uniform(g.internal, "X")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.assignments)

    def basis(self, q: int) -> str:
        return dict(self.assignments)[q]

    def __len__(self) -> int:
        return len(self.assignments)

    def pack(self, outcomes: Mapping[int, int]) -> int:
        """Outcome record -> bitmask over pattern positions (bit set = -1)."""
        if set(outcomes) != set(self.qubits):
            raise ValueError("outcome record must cover exactly the pattern's qubits")
        s = 0
        for k, q in enumerate(self.qubits):
            v = outcomes[q]
            if v not in (1, -1):
                raise ValueError(f"outcome for qubit {q} must be +1 or -1")
            if v == -1:
                s |= 1 << k
        return s

    def unpack(self, s: int) -> OutcomeRecord:
        return {q: -1 if (s >> k) & 1 else 1 for k, q in enumerate(self.qubits)}

    def support_of(self, mask: int) -> tuple[int, ...]:
        return tuple(q for k, q in enumerate(self.qubits) if (mask >> k) & 1)


@dataclass(frozen=True)
class StabilizerTableau:
    n: int
    generators: tuple[PauliString, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if g.n != self.n:
                raise DimensionError("generator size does not match tableau")

    def validate(self) -> None:
        """Raise if the generators are not a full-rank commuting Hermitian set."""
        if len(self.generators) != self.n:
            raise ValueError(f"expected {self.n} generators, got {len(self.generators)}")
        for g in self.generators:
            if g.phase not in (0, 2):
                raise ValueError(f"generator {g} is not +/- Hermitian")
        for a, b in itertools.combinations(self.generators, 2):
            if not commutes(a, b):
                raise ValueError(f"{a} and {b} anticommute")
        if self._span.rank != self.n:
            raise ValueError("generators are not independent")

    @cached_property
    def _span(self) -> gf2.Span:
        return gf2.Span([g.symplectic for g in self.generators], 2 * self.n)

    def element(self, combo: int) -> PauliString:
        """Product of the generators selected by bitmask ``combo``."""
        out = PauliString.identity(self.n)
        k = 0
        while combo:
            if combo & 1:
                out = multiply(out, self.generators[k])
            combo >>= 1
            k += 1
        return out

    def sign_of(self, p: PauliString) -> int:
        """+1/-1 if ``+p``/``-p`` is in the group, 0 if neither is."""
        residual, combo = self._span.reduce(p.symplectic)
        if residual:
            return 0
        e = self.element(combo)
        return 1 if (e.phase - p.phase) % 4 == 0 else -1

    def dumps(self) -> str:
        return "\n".join(str(g) for g in self.generators)

    @classmethod
    def loads(cls, text: str) -> StabilizerTableau:
        gens = [PauliString.parse(line) for line in text.split() if line.strip()]
        n = gens[0].n if gens else 0
        return cls(n, tuple(gens))

    def __str__(self) -> str:
        return self.dumps()


def from_graph(g: Graph) -> StabilizerTableau:
    return StabilizerTableau(g.n, tuple(generator(g, i) for i in range(g.n)))


def apply_pauli(t: StabilizerTableau, p: PauliString) -> StabilizerTableau:
    """Conjugate the state by ``p``: flips every generator that anticommutes."""
    return StabilizerTableau(
        t.n, tuple(g if commutes(g, p) else -g for g in t.generators)
    )


def apply_local_z(t: StabilizerTableau, q: int) -> StabilizerTableau:
    if not 0 <= q < t.n:
        raise IndexError(f"qubit {q} out of range")
    return apply_pauli(t, PauliString.single(t.n, q, "Z"))


def measure(
    t: StabilizerTableau,
    q: int,
    basis: str,
    forced: int | None = None,
    rng=None,
) -> tuple[int, Fraction, StabilizerTableau]:
    """Projective measurement of the single-qubit Pauli ``basis`` on qubit ``q``.

    ``rng`` needs a ``random()`` method (``random.Random`` or a numpy
    ``Generator``); it is only consulted for a random outcome that is not forced.
    Returns ``(sign, probability, new_tableau)``; the measured qubit stays in
    the register as a ``±basis`` eigenstate.
    """
    if not 0 <= q < t.n:
        raise IndexError(f"qubit {q} out of range")
    if forced not in (None, 1, -1):
        raise ValueError("forced outcome must be +1 or -1")
    op = PauliString.single(t.n, q, basis)
    anti = [k for k, g in enumerate(t.generators) if not commutes(g, op)]
    if not anti:
        sign = t.sign_of(op)
        if forced is not None and forced != sign:
            raise ImpossibleOutcomeError(f"{basis}{q} is deterministically {sign:+d}")
        return sign, Fraction(1), t
    if forced is None:
        if rng is None:
            raise ValueError("random outcome requires rng or a forced value")
        sign = 1 if rng.random() < 0.5 else -1
    else:
        sign = forced
    gens = list(t.generators)
    pivot = gens[anti[0]]
    for k in anti[1:]:
        gens[k] = multiply(gens[k], pivot)
    gens[anti[0]] = op if sign == 1 else -op
    return sign, Fraction(1, 2), StabilizerTableau(t.n, tuple(gens))


def measure_pattern(
    t: StabilizerTableau,
    pattern: MeasurementPattern,
    forced: Mapping[int, int] | None = None,
    rng=None,
) -> tuple[OutcomeRecord, Fraction, StabilizerTableau]:
    """Measure the whole pattern in order; returns outcomes, joint probability and state."""
    outcomes: OutcomeRecord = {}
    prob = Fraction(1)
    for q, basis in pattern.assignments:
        f = None if forced is None else forced.get(q)
        sign, pr, t = measure(t, q, basis, f, rng)
        outcomes[q] = sign
        prob *= pr
    return outcomes, prob, t


def _clearing_combos(violations: Sequence[int], nbits: int) -> list[int]:
    """Generator combos whose product violates no constraint.

    ``violations[k]`` is a bitmask of the constraints generator ``k`` breaks;
    returned combos span the solution space.
    """
    return gf2.dependencies(violations, nbits)


def _pattern_violations(t: StabilizerTableau, pattern: MeasurementPattern) -> list[int]:
    """Per generator: measured qubits where it is neither identity nor the measured Pauli."""
    xm = zm = ym = 0
    for q, basis in pattern.assignments:
        if basis == "X":
            xm |= 1 << q
        elif basis == "Z":
            zm |= 1 << q
        else:
            ym |= 1 << q
    return [(g.z & xm) | (g.x & zm) | ((g.x ^ g.z) & ym) for g in t.generators]


def consistent_subgroup(t: StabilizerTableau, pattern: MeasurementPattern) -> list[PauliString]:
    """Basis of the stabilizer elements that act as identity or the measured
    Pauli on every measured qubit.

    The basis has ``n - rank(constraints)`` elements: ``n - |I|`` plus one for
    every independent parity check embedded in the pattern.
    """
    combos = _clearing_combos(_pattern_violations(t, pattern), t.n)
    return [t.element(c) for c in combos]


@dataclass(frozen=True)
class PostMeasurement:
    """Outcome-parameterised post-measurement stabilizer structure.

    ``checks`` are affine constraints ``parity(s & mask) == bit`` that every
    observable outcome satisfies.  ``generators`` pair a Pauli on the
    ``remaining`` qubits (with its base phase) with an outcome mask; for outcome
    ``s`` the generator's sign picks up ``(-1)**parity(s & mask)``.
    """

    pattern: MeasurementPattern
    remaining: tuple[int, ...]
    checks: tuple[tuple[int, int], ...]
    generators: tuple[tuple[PauliString, int], ...]

    def check_ok(self, s: int) -> bool:
        return all(gf2.parity(s & m) == b for m, b in self.checks)

    def state(self, s: int) -> StabilizerTableau:
        if not self.check_ok(s):
            raise InconsistentOutcomeError("outcome violates an embedded parity check")
        m = len(self.remaining)
        gens = tuple(
            p if not gf2.parity(s & mask) else -p for p, mask in self.generators
        )
        return StabilizerTableau(m, gens)

    def outcome_space_rank(self) -> int:
        """Number of independent checks (random outcomes = |I| - this)."""
        r = gf2.affine_rank(self.checks, len(self.pattern))
        if r is None:
            raise InconsistentOutcomeError("checks are mutually inconsistent")
        return r

    @property
    def check_list(self) -> list[tuple[tuple[int, ...], int]]:
        """Checks as (measured-qubit support, expected sign product)."""
        return [(self.pattern.support_of(m), -1 if b else 1) for m, b in self.checks]


def post_measurement(t: StabilizerTableau, pattern: MeasurementPattern) -> PostMeasurement:
    """Measurement-consistent stabilizer elements turned into an outcome-indexed
    state on the unmeasured qubits.

    Each consistent element ``Q = ±prod q_j`` yields ``±prod_{measured} s_i
    prod_{unmeasured} q_j``; elements living only on measured qubits become
    parity checks on the outcomes.
    """
    measured = pattern.qubits
    for q in measured:
        if not 0 <= q < t.n:
            raise IndexError(f"measured qubit {q} out of range")
    mset = set(measured)
    remaining = tuple(q for q in range(t.n) if q not in mset)
    combos = _clearing_combos(_pattern_violations(t, pattern), t.n)
    elements = [t.element(c) for c in combos]

    def outcome_mask(p: PauliString) -> int:
        m = 0
        for k, q in enumerate(measured):
            if ((p.x | p.z) >> q) & 1:
                m |= 1 << k
        return m

    restricted = [restrict(e, remaining) for e in elements]
    nrem = len(remaining)
    rows = [(r.x | (r.z << nrem)) | (1 << (2 * nrem + k)) for k, r in enumerate(restricted)]
    reduced, pivots = gf2.rref(rows, 2 * nrem)
    gens = []
    checks = []
    for idx, row in enumerate(reduced):
        sel = row >> (2 * nrem)
        e = PauliString.identity(t.n)
        k = 0
        while sel:
            if sel & 1:
                e = multiply(e, elements[k])
            sel >>= 1
            k += 1
        if e.phase % 2:
            raise AssertionError("stabilizer element with imaginary phase")
        mask = outcome_mask(e)
        if idx < len(pivots):
            gens.append((restrict(e, remaining), mask))
        else:
            checks.append((mask, 1 if e.phase == 2 else 0))
    if len(gens) != nrem:
        raise AssertionError(f"post-measurement rank {len(gens)} != {nrem} remaining qubits")
    return PostMeasurement(pattern, remaining, tuple(checks), tuple(gens))


def lemma_state(t: StabilizerTableau, pattern: MeasurementPattern, outcomes: Mapping[int, int]) -> StabilizerTableau:
    """Post-measurement state on the unmeasured qubits from the consistent subgroup."""
    return post_measurement(t, pattern).state(pattern.pack(outcomes))


def reduce(t: StabilizerTableau, measured: Sequence[int]) -> StabilizerTableau:
    """Compact measured qubits out of a tableau.

    Every measured qubit must already be in a Pauli eigenstate (as left by
    :func:`measure`); the result lives on the remaining qubits in ascending order.
    """
    mset = set(measured)
    remaining = [q for q in range(t.n) if q not in mset]
    mmask = sum(1 << q for q in mset)
    violations = [(g.x & mmask) | ((g.z & mmask) << t.n) for g in t.generators]
    combos = _clearing_combos(violations, 2 * t.n)
    elems = [restrict(t.element(c), remaining) for c in combos]
    if len(elems) != len(remaining):
        raise ValueError("measured qubits are still entangled with the rest")
    return StabilizerTableau(len(remaining), tuple(elems))


def measure_and_reduce(
    t: StabilizerTableau,
    pattern: MeasurementPattern,
    forced: Mapping[int, int] | None = None,
    rng=None,
) -> tuple[OutcomeRecord, Fraction, StabilizerTableau]:
    outcomes, prob, t2 = measure_pattern(t, pattern, forced, rng)
    return outcomes, prob, reduce(t2, pattern.qubits)


def embedded_checks(g: Graph, pattern: MeasurementPattern) -> list[tuple[tuple[int, ...], int]]:
    """Parity constraints ``prod_{j in support} s_j == sign`` of the ideal graph state."""
    return sorted(post_measurement(from_graph(g), pattern).check_list)


def target_state(g_ideal: Graph, pattern: MeasurementPattern, outcomes: Mapping[int, int]) -> StabilizerTableau:
    """Ideal post-measurement state on the unmeasured qubits for the observed signs.

    Raises :class:`InconsistentOutcomeError` when the signs violate a parity
    check of the ideal state (a postselection failure).
    """
    return lemma_state(from_graph(g_ideal), pattern, outcomes)


def stab_fidelity(a: StabilizerTableau, b: StabilizerTableau) -> Fraction:
    """|<a|b>|^2 for two pure stabilizer states, exactly."""
    if a.n != b.n:
        raise DimensionError("tableaus act on different numbers of qubits")
    n = a.n
    deps, k_shared = _shared_elements(a.generators, b.generators, n)
    for ca, cb in deps:
        if (a.element(ca).phase - b.element(cb).phase) % 4:
            return Fraction(0)
    return Fraction(1, 2 ** (n - k_shared))


def _shared_elements(
    ga: Sequence[PauliString], gb: Sequence[PauliString], n: int
) -> tuple[list[tuple[int, int]], int]:
    """Basis of (combo_a, combo_b) pairs whose products agree up to phase."""
    vecs = [g.symplectic for g in ga] + [g.symplectic for g in gb]
    deps = gf2.dependencies(vecs, 2 * n)
    na = len(ga)
    out = [(d & ((1 << na) - 1), d >> na) for d in deps]
    return out, len(out)


@dataclass(frozen=True)
class FidelityConditions:
    """Fidelity between two outcome-indexed states as affine conditions.

    For every outcome ``s`` with both states defined, the fidelity is
    ``2**-exponent`` when all ``conditions`` hold and 0 otherwise.
    """

    conditions: tuple[tuple[int, int], ...]
    exponent: int

    @property
    def value(self) -> Fraction:
        return Fraction(1, 2**self.exponent)


def fidelity_conditions(actual: PostMeasurement, target: PostMeasurement) -> FidelityConditions:
    if actual.remaining != target.remaining:
        raise DimensionError("post-measurement states live on different qubits")
    m = len(actual.remaining)
    pa = [p for p, _ in actual.generators]
    pb = [p for p, _ in target.generators]
    deps, shared = _shared_elements(pa, pb, m)
    conds = []
    for ca, cb in deps:
        ea = PauliString.identity(m)
        eb = PauliString.identity(m)
        mask = 0
        for k, (p, mk) in enumerate(actual.generators):
            if (ca >> k) & 1:
                ea = multiply(ea, p)
                mask ^= mk
        for k, (p, mk) in enumerate(target.generators):
            if (cb >> k) & 1:
                eb = multiply(eb, p)
                mask ^= mk
        bit = ((ea.phase - eb.phase) % 4) // 2
        conds.append((mask, bit))
    return FidelityConditions(tuple(conds), m - shared)


class Postselect(str, Enum):
    """Which outcome records are kept."""

    CHECKS = "checks"  # every embedded parity check of the ideal state holds
    ALL_MINUS = "all_minus"  # every measured sign is -1
    ALL_PLUS = "all_plus"  # every measured sign is +1
    NONE = "none"  # keep everything

    @classmethod
    def parse(cls, value) -> Postselect:
        if isinstance(value, Postselect):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"stabilizerchecks": "checks", "stabilizer_checks": "checks",
                   "allminus": "all_minus", "allplus": "all_plus"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown postselection mode {value!r}") from None


def acceptance_conditions(mode: Postselect, ideal: PostMeasurement) -> tuple[tuple[int, int], ...]:
    """Affine conditions on the packed outcome ``s`` that define acceptance.

    Raises ValueError when a uniform-sign filter contradicts the ideal checks,
    since such a protocol would never accept a noiseless run.
    """
    mode = Postselect.parse(mode)
    k = len(ideal.pattern)
    if mode is Postselect.CHECKS:
        return ideal.checks
    if mode is Postselect.NONE:
        return ()
    bit = 1 if mode is Postselect.ALL_MINUS else 0
    conds = tuple((1 << j, bit) for j in range(k))
    s = ((1 << k) - 1) if bit else 0
    if not ideal.check_ok(s):
        raise ValueError(f"{mode.value} outcomes violate an embedded check of the ideal state")
    return conds


# -- local Clifford equivalence ----------------------------------------------

# The six symplectic maps of one qubit, as images of (X, Z) in (x, z) bits.
_LOCAL_MAPS = [
    ((1, 0), (0, 1)),  # identity
    ((0, 1), (1, 0)),  # H
    ((1, 1), (0, 1)),  # S
    ((1, 0), (1, 1)),  # sqrt(X)
    ((0, 1), (1, 1)),
    ((1, 1), (1, 0)),
]
_PHASE = _LOCAL_MAPS[2]


def _map_qubit(p: PauliString, q: int, lmap) -> PauliString:
    xb, zb = (p.x >> q) & 1, (p.z >> q) & 1
    (ax, az), (bx, bz) = lmap
    nx = (xb & ax) ^ (zb & bx)
    nz = (xb & az) ^ (zb & bz)
    bit = 1 << q
    x = (p.x & ~bit) | (bit if nx else 0)
    z = (p.z & ~bit) | (bit if nz else 0)
    return PauliString(p.n, x, z, 0)


def _same_span(a: Sequence[PauliString], b: Sequence[PauliString], n: int) -> bool:
    span = gf2.Span([p.symplectic for p in a], 2 * n)
    return span.rank == len(b) and all(span.contains(p.symplectic) for p in b)


def lc_equivalent(a: StabilizerTableau, b: StabilizerTableau, qubits: Sequence[int] | None = None) -> bool:
    """True if ``a`` and ``b`` differ by a product of single-qubit Cliffords.

    Only the qubits in ``qubits`` (default: all) may be rotated; Pauli frames
    are free everywhere since any sign pattern is reachable by a Pauli.
    """
    if a.n != b.n:
        raise DimensionError("tableaus act on different numbers of qubits")
    qs = list(range(a.n)) if qubits is None else list(qubits)
    for choice in itertools.product(_LOCAL_MAPS, repeat=len(qs)):
        gens = list(b.generators)
        for q, lmap in zip(qs, choice):
            gens = [_map_qubit(g, q, lmap) for g in gens]
        if _same_span(a.generators, gens, a.n):
            return True
    return False


def is_ghz_class(t: StabilizerTableau) -> bool:
    """LC-equivalent to the |t.n|-qubit GHZ state (star graph)."""
    if t.n < 2:
        return False
    star = Graph.from_edges(t.n, [(0, j) for j in range(1, t.n)])
    return lc_equivalent(t, from_graph(star))


# -- fusion ----------------------------------------------------------------


@dataclass(frozen=True)
class FusionResult:
    post: StabilizerTableau
    expected: StabilizerTableau
    match: bool
    outcomes: OutcomeRecord
    remaining: tuple[int, ...]
    in_basis: str


def _fusion_setup(g_big: Graph, v_in: int, v_out: int, pattern: MeasurementPattern):
    qubits = set(pattern.qubits)
    if v_in in qubits or v_out in qubits or v_in == v_out:
        raise ValueError("in/out must be distinct and unmeasured")
    z_set = {q for q, b in pattern.assignments if b == "Z"}
    xy = [q for q, b in pattern.assignments if b != "Z"]
    keep = [v for v in range(g_big.n) if v not in z_set]
    rows = {v: g_big.adjacency[v] & ~sum(1 << z for z in z_set) for v in keep}
    part = set(xy) | {v_in, v_out}
    for v in xy:
        outside = [u for u in _iter_bits(rows[v]) if u not in part]
        if outside:
            raise ValueError(f"measured vertex {v} touches external vertices {outside}")
    n_in = {u for u in _iter_bits(rows[v_in]) if u not in part}
    n_out = {u for u in _iter_bits(rows[v_out]) if u not in part}
    if n_in & n_out:
        raise ValueError("external neighbourhoods of in and out overlap")
    return z_set, xy, rows, n_in, n_out


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _in_basis(g_big: Graph, v_in: int, v_out: int, pattern: MeasurementPattern, rows) -> str:
    """Letter A on ``in`` of a consistent stabilizer A_in B_out with A, B in {X, Y}.

    X is preferred: it exists exactly when the pair also carries Z_in Z_out, and
    then measuring X on ``in`` fuses without touching anything else.
    """
    xy = [q for q, b in pattern.assignments if b != "Z"]
    verts = [v_in, v_out] + xy
    index = {v: k for k, v in enumerate(verts)}
    edges = [
        (index[v], index[u]) for v in verts for u in _iter_bits(rows[v]) if u in index and v < u
    ]
    small = Graph.from_edges(len(verts), edges)
    basis = dict(pattern.assignments)
    local = MeasurementPattern(tuple((index[q], basis[q]) for q in xy))
    pm = post_measurement(from_graph(small), local)
    ops = [p for p, _ in pm.generators]
    found = set()
    for combo in range(1, 1 << len(ops)):
        e = PauliString.identity(2)
        for k, p in enumerate(ops):
            if (combo >> k) & 1:
                e = multiply(e, p)
        if e.letter(0) in "XY" and e.letter(1) in "XY":
            found.add(e.letter(0))
    if not found:
        raise ValueError("pattern does not produce a Bell pair across in/out")
    return "X" if "X" in found else "Y"


def fuse_check(
    g_big: Graph,
    v_in: int,
    v_out: int,
    pattern: MeasurementPattern,
    rng=None,
    forced: Mapping[int, int] | None = None,
) -> FusionResult:
    """Run the Bell-generating pattern, measure ``in`` and compare with the fused graph.

    X/Y-measured vertices must only touch ``in``, ``out`` and each other;
    Z-measured vertices may touch anything (a Z measurement deletes its vertex).
    The comparison allows a single-qubit Clifford on ``out`` and Z byproducts on
    ``out``'s new neighbourhood and on neighbours of Z-measured vertices; the
    byproducts needed are applied to the returned ``post`` tableau. When ``in``
    has to be measured in Y, the phase gates that measurement leaves on the
    external neighbours of ``in`` are allowed as well.
    """
    z_set, xy, rows, n_in, n_out = _fusion_setup(g_big, v_in, v_out, pattern)
    a_in = _in_basis(g_big, v_in, v_out, pattern, rows)
    full = MeasurementPattern(pattern.assignments + ((v_in, a_in),))
    t = from_graph(g_big)
    outcomes, _, t = measure_pattern(t, full, forced, rng)
    post = reduce(t, full.qubits)
    remaining = tuple(v for v in range(g_big.n) if v not in set(full.qubits))
    index = {v: k for k, v in enumerate(remaining)}
    merged = n_in | n_out
    edges = set()
    for v in remaining:
        for u in _iter_bits(rows.get(v, 0)):
            if u in index and v != v_out and u != v_out:
                edges.add((min(index[v], index[u]), max(index[v], index[u])))
    for u in merged:
        edges.add((min(index[u], index[v_out]), max(index[u], index[v_out])))
    expected_graph = Graph.from_edges(len(remaining), sorted(edges))
    o = index[v_out]
    nbhd = {o} | {index[u] for u in merged}
    z_touched = set()
    for zq in z_set:
        for u in _iter_bits(g_big.adjacency[zq]):
            if u in index:
                z_touched.add(index[u])
    allowed = nbhd | z_touched
    ideal = from_graph(expected_graph)
    m = len(remaining)
    phased = sorted(index[u] for u in n_in) if a_in == "Y" else []
    for lmap, subset in itertools.product(_LOCAL_MAPS, range(1 << len(phased))):
        gens = [_map_qubit(g, o, lmap) for g in ideal.generators]
        for k, v in enumerate(phased):
            if (subset >> k) & 1:
                gens = [_map_qubit(g, v, _PHASE) for g in gens]
        if not _same_span(post.generators, gens, m):
            continue
        wrong = [v for v, gv in enumerate(gens) if post.sign_of(gv) == -1]
        if not set(wrong) <= allowed:
            continue
        fixed = post
        for v in wrong:
            if v == o:
                # Pauli on out anticommuting with the mapped X and commuting with the mapped Z.
                fix = _map_qubit(PauliString.single(m, o, "Z"), o, lmap)
            else:
                fix = PauliString.single(m, v, "Z")
            fixed = apply_pauli(fixed, fix)
        expected = StabilizerTableau(m, tuple(gens))
        return FusionResult(fixed, expected, stab_fidelity(fixed, expected) == 1, outcomes, remaining, a_in)
    return FusionResult(post, ideal, False, outcomes, remaining, a_in)


def fuse_check_all_branches(
    g_big: Graph, v_in: int, v_out: int, pattern: MeasurementPattern
) -> list[FusionResult]:
    """:func:`fuse_check` on every possible outcome branch."""
    qubits = pattern.qubits + (v_in,)
    results = []
    for signs in itertools.product((1, -1), repeat=len(qubits)):
        forced = dict(zip(qubits, signs))
        try:
            results.append(fuse_check(g_big, v_in, v_out, pattern, forced=forced))
        except ImpossibleOutcomeError:
            continue
    return results

"""The three noise channels: parameters, per-run realizations and preparation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .graphs import Graph, WeightedGraph
from .stabilizer import StabilizerTableau, apply_local_z, from_graph


def p_from_sigma(sigma: float) -> float:
    """Effective edge-flip probability of a Gaussian phase error of width ``sigma``."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    # expm1 keeps full relative precision for tiny sigma
    return -0.5 * math.expm1(-0.5 * sigma * sigma)


def sigma_from_p(p: float) -> float:
    if not 0 <= p < 0.5:
        raise ValueError("p must lie in [0, 1/2)")
    return math.sqrt(-2.0 * math.log1p(-2.0 * p))


@dataclass(frozen=True)
class UncorrelatedEdge:
    p: float
    name = "edge_loss"

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("edge-loss probability must lie in [0, 1]")

    @property
    def strength(self) -> float:
        return self.p


@dataclass(frozen=True)
class CorrelatedPhase:
    sigma: float
    name = "correlated_phase"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    @classmethod
    def from_p(cls, p: float) -> CorrelatedPhase:
        return cls(sigma_from_p(p))

    @property
    def strength(self) -> float:
        return p_from_sigma(self.sigma)


@dataclass(frozen=True)
class LocalZFlip:
    p: float
    name = "z_flip"

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("flip probability must lie in [0, 1]")

    @property
    def strength(self) -> float:
        return self.p


NoiseModel = Union[UncorrelatedEdge, CorrelatedPhase, LocalZFlip]


def with_strength(model: NoiseModel, p: float) -> NoiseModel:
    """Same channel at effective probability ``p`` (sigma derived for phase noise)."""
    if isinstance(model, CorrelatedPhase):
        return CorrelatedPhase.from_p(p)
    return type(model)(p)


@dataclass(frozen=True)
class LostEdges:
    edges: frozenset


@dataclass(frozen=True)
class SharedPhase:
    eps: float


@dataclass(frozen=True)
class FlippedQubits:
    qubits: frozenset


NoiseRealization = Union[LostEdges, SharedPhase, FlippedQubits]


def sample_realization(g: Graph, model: NoiseModel, rng: np.random.Generator) -> NoiseRealization:
    if isinstance(model, UncorrelatedEdge):
        edges = g.edges
        lost = rng.random(len(edges)) < model.p
        return LostEdges(frozenset(e for e, gone in zip(edges, lost) if gone))
    if isinstance(model, CorrelatedPhase):
        return SharedPhase(float(rng.normal(0.0, model.sigma)) if model.sigma > 0 else 0.0)
    if isinstance(model, LocalZFlip):
        flips = rng.random(g.n) < model.p
        return FlippedQubits(frozenset(int(q) for q in np.flatnonzero(flips)))
    raise TypeError(f"unknown noise model {model!r}")


def realize_state(g: Graph, r: NoiseRealization) -> StabilizerTableau | WeightedGraph:
    """Tableau for Clifford defects, weighted graph for a shared phase error."""
    if isinstance(r, LostEdges):
        bad = [e for e in r.edges if not g.has_edge(*e)]
        if bad:
            raise ValueError(f"lost edges {bad} are not in the graph")
        return from_graph(g.without_edges(sorted(r.edges)))
    if isinstance(r, FlippedQubits):
        t = from_graph(g)
        for q in sorted(r.qubits):
            if not 0 <= q < g.n:
                raise ValueError(f"flipped qubit {q} not in the graph")
            t = apply_local_z(t, q)
        return t
    if isinstance(r, SharedPhase):
        return WeightedGraph.uniform(g, math.pi + r.eps)
    raise TypeError(f"unknown realization {r!r}")


def realization_key(r: NoiseRealization):
    """Hashable key identifying realizations that prepare the same state."""
    if isinstance(r, LostEdges):
        return ("E", tuple(sorted(r.edges)))
    if isinstance(r, FlippedQubits):
        return ("Z", tuple(sorted(r.qubits)))
    return ("P", r.eps)


def model_from_dict(data: dict) -> NoiseModel:
    """Parse ``{"model": "edge_loss"|"correlated_phase"|"z_flip", "p": .., "sigma": ..}``.

    Exactly one of ``p``/``sigma`` may be given; ``p`` for correlated phase
    noise is converted to sigma.
    """
    kind = data.get("model")
    has_p, has_s = "p" in data, "sigma" in data
    if has_p == has_s:
        raise ValueError("give exactly one of 'p' or 'sigma'")
    if kind == "edge_loss":
        if has_s:
            raise ValueError("edge_loss takes 'p'")
        return UncorrelatedEdge(float(data["p"]))
    if kind == "z_flip":
        if has_s:
            raise ValueError("z_flip takes 'p'")
        return LocalZFlip(float(data["p"]))
    if kind == "correlated_phase":
        return CorrelatedPhase(float(data["sigma"])) if has_s else CorrelatedPhase.from_p(float(data["p"]))
    raise ValueError(f"unknown noise model {kind!r}")


def model_to_dict(model: NoiseModel) -> dict:
    if isinstance(model, CorrelatedPhase):
        return {"model": model.name, "sigma": model.sigma}
    return {"model": model.name, "p": model.p}


"""Noisy graph-state simulation and postselected Bell/GHZ extraction."""

from .gf2 import BACKEND
from .graphs import Family, FamilySpec, Graph, WeightedGraph, build_family, generator
from .pauli import PauliString, commutes, multiply, restrict
from .stabilizer import MeasurementPattern, StabilizerTableau, from_graph, stab_fidelity

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Family",
    "FamilySpec",
    "Graph",
    "MeasurementPattern",
    "PauliString",
    "StabilizerTableau",
    "WeightedGraph",
    "build_family",
    "commutes",
    "from_graph",
    "generator",
    "multiply",
    "restrict",
    "stab_fidelity",
]

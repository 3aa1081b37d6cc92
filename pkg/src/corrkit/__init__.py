"""Piecewise set-valued maps, generalized-concavity checks, continuous selections and fixed points."""
from corrkit.setvalue import (
    Box,
    FunctionCorrespondence,
    Interval,
    IntervalUnion,
    PiecewiseCorrespondence,
    graph_adherence,
    intersect,
    minkowski_inflate,
)
from corrkit.simplex import Simplex, barycentric, from_barycentric, subdivide
from corrkit.properties import GridSpec, Counterexample
from corrkit.witness import Reparameterization, StarWitness, WnqWitness
from corrkit.selection import Selection, build_selection, build_selection_star, validate_selection
from corrkit.fixedpoint import (
    FixedPointResult,
    approx_fixed_point_setvalued,
    brouwer_fixed_point,
    composed_fixed_point,
)
from corrkit.economy import (
    AbstractEconomy,
    Agent,
    EquilibriumCertificate,
    compute_W,
    equilibrium_via_approximation,
    equilibrium_via_selection,
    verify_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "FunctionCorrespondence",
    "Interval",
    "IntervalUnion",
    "PiecewiseCorrespondence",
    "graph_adherence",
    "intersect",
    "minkowski_inflate",
    "Simplex",
    "barycentric",
    "from_barycentric",
    "subdivide",
    "GridSpec",
    "Counterexample",
    "Reparameterization",
    "StarWitness",
    "WnqWitness",
    "Selection",
    "build_selection",
    "build_selection_star",
    "validate_selection",
    "FixedPointResult",
    "approx_fixed_point_setvalued",
    "brouwer_fixed_point",
    "composed_fixed_point",
    "AbstractEconomy",
    "Agent",
    "EquilibriumCertificate",
    "compute_W",
    "equilibrium_via_approximation",
    "equilibrium_via_selection",
    "verify_equilibrium",
]

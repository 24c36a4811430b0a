"""Combinatorics and numerics of punctured pseudoholomorphic spheres in R x (S^1 x S^2).

Modules: ``algebra`` (exact integer-pair predicates), ``dataset`` (asymptotic
data sets), ``linegraph`` (positive line graphs and the non-emptiness
decision), ``moduligraph`` (moduli space graphs and zipper moves), ``index``
(dimension formulas), ``geometry`` (contact and complex structure kernel),
``sampler`` (cylinder charts) and ``cli``.
"""

from .algebra import Angle, IntegerPair, alpha_sign_at_orbit, bracket, compare_angles
from .dataset import AsymptoticDataSet, EndTuple, validate_data_set
from .linegraph import PositiveLineGraph, decide_nonempty, validate_line_graph

__all__ = [
    "Angle", "AsymptoticDataSet", "EndTuple", "IntegerPair", "PositiveLineGraph",
    "alpha_sign_at_orbit", "bracket", "compare_angles", "decide_nonempty",
    "validate_data_set", "validate_line_graph",
]
__version__ = "0.1.0"

"""Moduli space graphs, positive graphs, expansion and zipper moves."""

from .expand import expand_to_moduli_graph, float_angles
from .graph import (NEG_LABEL, POS_LABEL, Edge, PositiveGraph, Vertex, graph_from_json,
                    graph_to_dot, graph_to_json, validate_moduli_graph, validate_positive_graph)
from .moves import (MoveError, MoveResult, apply_move, apply_move_ex, linearize,
                    linearize_graph, to_line_graph)

__all__ = [
    "NEG_LABEL", "POS_LABEL", "Edge", "PositiveGraph", "Vertex", "MoveError", "MoveResult",
    "apply_move", "apply_move_ex", "expand_to_moduli_graph", "float_angles", "graph_from_json",
    "graph_to_dot", "graph_to_json", "linearize", "linearize_graph", "to_line_graph",
    "validate_moduli_graph", "validate_positive_graph",
]

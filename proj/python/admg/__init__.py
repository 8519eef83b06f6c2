"""Identification and computation of interventional distributions in ADMGs."""

from ._core import (
    Graph,
    Model,
    NumericalError,
    ParameterError,
    Params,
    ParseError,
    StructuralError,
    UnknownVertex,
    binary_width,
    eid,
    identify,
    intrinsic_sets,
    model_for_graph,
    q_count,
    query,
    random_model,
)

__all__ = [
    "Graph",
    "Model",
    "NumericalError",
    "ParameterError",
    "Params",
    "ParseError",
    "StructuralError",
    "UnknownVertex",
    "binary_width",
    "eid",
    "identify",
    "intrinsic_sets",
    "model_for_graph",
    "q_count",
    "query",
    "random_model",
]

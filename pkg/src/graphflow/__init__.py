"""Communicating classes, set-valued semiflows and finite Markov chains on
directed graphs."""
from __future__ import annotations

from .boolmat import BoolMatrix, adjacency, graph_of, psi
from .errors import GraphflowError, ParseError
from .graph import (
    BACKWARD,
    FORWARD,
    DirectedGraph,
    Path,
    build_graph,
    communicating_classes,
    extended_quotient_graph,
    orbit,
)
from .kernels import BACKEND
from .markov import TransitionMatrix, build_chain
from .semiflow import attractors, finest_morse_decomposition, omega_limit, phi

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BACKWARD",
    "BoolMatrix",
    "DirectedGraph",
    "FORWARD",
    "GraphflowError",
    "ParseError",
    "Path",
    "TransitionMatrix",
    "adjacency",
    "attractors",
    "build_chain",
    "build_graph",
    "communicating_classes",
    "extended_quotient_graph",
    "finest_morse_decomposition",
    "graph_of",
    "omega_limit",
    "orbit",
    "phi",
    "psi",
]

"""Crossing minimisation by repeated optimal star re-insertion."""

from .embedding import EmbeddingState, dumps, loads, planarise, validate
from .graph import Graph, generate, load_edge_list
from .harness import SweepReport, conjecture_H, conjecture_Z, sweep
from .heuristic import HeuristicConfig, run
from .initial import circle_init, initial_embedding, planar_init, spring_init, user_init

__version__ = "0.1.0"

__all__ = [
    "EmbeddingState", "Graph", "HeuristicConfig", "SweepReport",
    "circle_init", "conjecture_H", "conjecture_Z", "dumps", "generate",
    "initial_embedding", "load_edge_list", "loads", "planar_init", "planarise",
    "run", "spring_init", "sweep", "user_init", "validate",
]

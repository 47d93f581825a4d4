from src.solver.answers import Codebook, extract_answer
from src.solver.grounding import GroundModel, ground
from src.solver.search import Solution, iter_solutions, solve

__all__ = [
    "Codebook",
    "GroundModel",
    "Solution",
    "extract_answer",
    "ground",
    "iter_solutions",
    "solve",
]

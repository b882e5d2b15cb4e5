"""Approximation numbers of periodic weighted Sobolev embeddings."""

from .weights import WeightFamily, NotEmbeddedError, check_summability, eval_weight
from .counting import BudgetExceeded, LevelTable, count_leq, level_multiplicities
from .tails import Enclosure, SigmaValue, TailEnclosure, sigma, tail

__all__ = [
    "WeightFamily",
    "NotEmbeddedError",
    "check_summability",
    "eval_weight",
    "BudgetExceeded",
    "LevelTable",
    "count_leq",
    "level_multiplicities",
    "Enclosure",
    "SigmaValue",
    "TailEnclosure",
    "sigma",
    "tail",
]

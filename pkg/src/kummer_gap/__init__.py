"""Zeros of Kummer's function in its first parameter, gap bounds, and certified first-passage probabilities."""

from .errors import KummerGapError
from .first_passage import FirstPassageProblem, PfaInterval, pfa_interval
from .gap_bounds import monotonicity_threshold, theorem1_bound
from .special_functions import kummer_m
from .zero_finder import ZeroSequence, find_zeros

__all__ = [
    "FirstPassageProblem",
    "KummerGapError",
    "PfaInterval",
    "ZeroSequence",
    "find_zeros",
    "kummer_m",
    "monotonicity_threshold",
    "pfa_interval",
    "theorem1_bound",
]
__version__ = "0.1.0"

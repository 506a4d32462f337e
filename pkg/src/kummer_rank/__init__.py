"""p-rank bounds for class groups of Kummer extensions Q(N^(1/p))."""

from .errors import KummerError, ValidationError
from .invariants import compute_invariants, m_gamma, s_invariant
from .modarith import PrimePair, class_label, is_pth_power
from .selmer import dimension_string, rank_estimate

__version__ = "0.1.0"

__all__ = [
    "KummerError",
    "PrimePair",
    "ValidationError",
    "class_label",
    "compute_invariants",
    "dimension_string",
    "is_pth_power",
    "m_gamma",
    "rank_estimate",
    "s_invariant",
]

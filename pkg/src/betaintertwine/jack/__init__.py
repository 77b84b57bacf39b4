"""Partitions, symmetric polynomials and Jack polynomials."""

from .jack import (JackIndex, eval_eigenvalue, first_order_binomials, jack_eval, jack_expand,
                   jack_norm_at_ones, kernel_eigenvalue, pochhammer)
from .partitions import Partition, as_partition, conjugate, dominates, lowered, partitions_of, partitions_up_to
from .polynomials import SymmetricPoly, apply_operator, exact

__all__ = [
    "JackIndex", "Partition", "SymmetricPoly", "apply_operator", "as_partition", "conjugate",
    "dominates", "eval_eigenvalue", "exact", "first_order_binomials", "jack_eval", "jack_expand",
    "jack_norm_at_ones", "kernel_eigenvalue", "lowered", "partitions_of", "partitions_up_to",
    "pochhammer",
]

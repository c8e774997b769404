"""Minimizer sets of k-submodular functions represented as posets with inconsistent pairs."""

from .core import INF, TableFunction, TableOracle, brute_minimizer_set, is_k_submodular, sq_join, sq_meet
from .pip import Pip, canonical_form, is_elementary, pip_from_closed_set, validate_pip

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Pip",
    "TableFunction",
    "TableOracle",
    "brute_minimizer_set",
    "canonical_form",
    "is_elementary",
    "is_k_submodular",
    "pip_from_closed_set",
    "sq_join",
    "sq_meet",
    "validate_pip",
]

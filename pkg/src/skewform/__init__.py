"""Exact invariants and covariants of alternating forms on matrix spaces."""

__version__ = "0.1.0"

from .altforms import AltForm, generic_element, power, trace_form, wedge
from .config import Budget, BudgetExceeded
from .exact_linalg import RatMatrix, SparseOperator, nullspace, rank, solve
from .matspaces import Family, make_space

__all__ = [
    "AltForm", "Budget", "BudgetExceeded", "Family", "RatMatrix", "SparseOperator",
    "generic_element", "make_space", "nullspace", "power", "rank", "solve",
    "trace_form", "wedge",
]

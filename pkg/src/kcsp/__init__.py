"""Toolkit for approximating and reducing to Max k-CSP over alphabet [R]."""
from kcsp._accel import BACKEND
from kcsp.errors import BudgetError, HypothesisUnmet, ValidationError

__version__ = "0.1.0"

__all__ = ["BACKEND", "BudgetError", "HypothesisUnmet", "ValidationError", "__version__"]

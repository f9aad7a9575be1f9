class ValidationError(ValueError):
    """Malformed instance, game, proof or parameter set."""


class BudgetError(RuntimeError):
    """An exhaustive computation would exceed its enumeration budget."""


class HypothesisUnmet(ValueError):
    """The parameters violate the hypothesis of the inequality being checked."""

"""Exception types shared across modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class ParameterError(ValueError):
    """A numeric guard on model or normalization parameters tripped."""


class HypothesisError(ValueError):
    """A structural hypothesis of a limit theorem is violated."""

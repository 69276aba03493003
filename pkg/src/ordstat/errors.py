"""Exception types shared across the package."""


class OrdstatError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class InvalidSizeError(OrdstatError):
    pass


class DimensionError(OrdstatError):
    pass


class InvalidIndicesError(OrdstatError, IndexError):
    pass


class DomainError(OrdstatError):
    pass


class BudgetExceededError(OrdstatError):
    """Enumeration would visit more outcomes than the configured budget."""


class UndefinedCorrelationError(OrdstatError):
    """A marginal (or a transformed marginal) has zero variance."""


class UnsupportedPopulationError(OrdstatError):
    pass


class ExactInputRequired(OrdstatError, TypeError):
    pass

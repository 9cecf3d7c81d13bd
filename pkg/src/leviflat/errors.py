"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the domain of an operation."""


class SingularPointError(DomainError):
    """Evaluation requested at an excluded (singular) point."""

    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"singular point {point!r}")


class NearSingularityError(DomainError):
    """Target point too close to the integration curve for plain quadrature."""


class LogOverflowError(OverflowError):
    """A log-domain value is too large to convert to a double."""

    def __init__(self, logmag, message=None):
        self.logmag = logmag
        super().__init__(message or f"modulus exp({logmag!r}) overflows double precision")

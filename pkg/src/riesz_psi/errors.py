"""Exception hierarchy shared by all modules."""


class RieszPsiError(Exception):
    """Base class for every error raised by this package."""


class SizeError(RieszPsiError, ValueError):
    """A table or grid is too small (or too large) for the request."""


class DomainError(RieszPsiError, ValueError):
    """An argument lies outside the region where an object is defined."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class DegenerateChiError(DomainError):
    """chi(s) requested where the direct formula is 0 * infinity."""


class PrecisionError(RieszPsiError, ArithmeticError):
    """Requested accuracy cannot be certified at the available precision."""


class TailBoundError(PrecisionError):
    """A truncated product's tail bound exceeds the target tolerance."""


class MethodDisagreementError(PrecisionError):
    """Two independent evaluation routes disagree beyond tolerance."""


class ConvergenceError(RieszPsiError, ArithmeticError):
    """An iteration did not converge; ``best`` carries the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NonSimpleZeroError(RieszPsiError, ArithmeticError):
    """|zeta'| fell below the simplicity threshold at a zero."""

    def __init__(self, message, gamma=None):
        super().__init__(message)
        self.gamma = gamma


class ZeroFileError(RieszPsiError, ValueError):
    """Malformed zeros file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        super().__init__(message)
        self.line = line
        self.path = path

"""Exception hierarchy shared by all gamestab modules."""


class GameStabError(Exception):
    """Base class for errors raised by gamestab."""


class DimensionError(GameStabError, ValueError):
    """Raised when array shapes do not match the game's (d1, d2)."""


class EvaluationError(GameStabError, ArithmeticError):
    """Raised when a cost oracle or finite difference produces non-finite values."""


class ConvergenceError(GameStabError):
    """Raised when an iterative method stops without meeting its tolerance.

    ``residual`` holds the last residual norm and ``iterate`` the last iterate,
    so callers can report how far off the method ended up.
    """

    def __init__(self, msg, residual=None, iterate=None):
        super().__init__(msg)
        self.residual = residual
        self.iterate = iterate


class SingularSystemError(ConvergenceError):
    """Raised when a Newton system cannot be solved."""


class StructureError(GameStabError, ValueError):
    """Raised when a routine needs zero-sum or potential structure and the input lacks it.

    ``diagnostic`` carries the offending norm (||P|| or ||Z||).
    """

    def __init__(self, msg, diagnostic=None):
        super().__init__(msg)
        self.diagnostic = diagnostic


class NotAFixedPointError(GameStabError):
    """Raised when an analysis is requested at a point where g(x) != 0."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual

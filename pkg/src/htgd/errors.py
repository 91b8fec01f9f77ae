"""Exception types shared across the package.

Argument validation raises plain ``ValueError``; the classes here mark
failures of stochastic generation and of numerical routines so callers
(and the CLI exit-code mapping) can tell them apart.
"""


class GenerationError(RuntimeError):
    """Rejection sampling exhausted its retry budget."""


class NumericalError(ArithmeticError):
    """A numerical routine produced non-finite results."""


class RankDeficientError(NumericalError):
    """Numerical rank fell below the requested model order."""

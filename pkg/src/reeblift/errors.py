"""Exception types shared across the package."""

from __future__ import annotations


class RefinementNeeded(ValueError):
    """A sampled path rotates some direction by at least pi/2 between samples.

    Attributes
    ----------
    t_lo, t_hi : float
        The offending sample interval.
    """

    def __init__(self, t_lo: float, t_hi: float, increment: float):
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.increment = increment
        super().__init__(
            f"argument jump {increment:.3f} rad on [{t_lo:.6g}, {t_hi:.6g}]; refine the sampling"
        )


class NonConvergence(RuntimeError):
    """An extrapolated limit did not settle within its error budget."""


class ParameterSearchError(RuntimeError):
    """No admissible construction parameters were found.

    Attributes
    ----------
    failing : str
        Name of the first inequality that failed on the last attempt.
    """

    def __init__(self, message: str, failing: str = ""):
        self.failing = failing
        super().__init__(message)

"""Exception types shared across the package."""


class FaquadError(Exception):
    """Base class for all numerical and domain errors raised here."""


class DegenerateGap(FaquadError):
    """A tracked level pair became degenerate at some control value.

    The coupling-over-gap integrand diverges at a true crossing, so the
    designers refuse to continue. Carries the offending control value.
    """

    def __init__(self, lam, pair):
        self.lam = lam
        self.pair = pair
        super().__init__(
            f"levels {pair[0]} and {pair[1]} are degenerate at control value {lam!r}"
        )


class FlatGap(FaquadError):
    """The gap derivative vanishes over a whole subinterval.

    The uniform-adiabatic rule divides by the gap slope, so a flat
    stretch leaves the schedule undefined there.
    """


class StepSizeTooCoarse(FaquadError):
    """Norm drift of the propagated state exceeded the unitarity budget."""


class RootBracketError(FaquadError):
    """A transcendental root could not be bracketed within its branch."""

    def __init__(self, branch, message):
        self.branch = branch
        super().__init__(f"branch {branch}: {message}")


class ConfigError(FaquadError):
    """Invalid experiment configuration (unknown key, bad value, bad combination)."""

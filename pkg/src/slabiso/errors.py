"""Exception hierarchy shared by all slabiso modules."""


class SlabisoError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SlabisoError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DivergenceError(SlabisoError, ArithmeticError):
    """The requested integral or limit is infinite."""


class NonConvergenceError(SlabisoError, ArithmeticError):
    """An iterative method failed to reach its tolerance."""


class NoBracketError(SlabisoError, ValueError):
    """A root finder was given an interval without a sign change."""


class DegenerateChordError(SlabisoError, ValueError):
    """The chord touches the profile strictly inside (v0, v1)."""


class ZonalLineError(SlabisoError, ValueError):
    """A horizontal line sits at a non-differentiability point of the density."""


class BranchBoundaryError(SlabisoError, ValueError):
    """A piecewise formula was evaluated exactly on a junction between branches."""


class CertificationError(SlabisoError):
    """A computer-assisted lower bound failed to come out positive."""

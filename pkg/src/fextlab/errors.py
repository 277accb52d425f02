"""Exception taxonomy shared by all fextlab modules."""


class FextlabError(Exception):
    """Base class for all numerical and usage failures raised by fextlab."""


class NotPositiveDefinite(FextlabError):
    """A Cholesky pivot was nonpositive.

    For prolate-type systems this signals that the working precision is too
    low for the requested dimension; callers escalate precision and retry.
    """

    def __init__(self, index: int, pivot=None):
        self.index = index
        self.pivot = pivot
        msg = f"nonpositive pivot at index {index}"
        if pivot is not None:
            msg += f" (pivot ~ {float(pivot):.3e})"
        super().__init__(msg)


class NoConvergence(FextlabError):
    """An iterative method exhausted its sweep or iteration budget."""


class ToleranceNotMet(FextlabError):
    """Successive quadrature refinements disagree beyond the caller tolerance."""

    def __init__(self, achieved, requested, detail: str = ""):
        self.achieved = achieved
        self.requested = requested
        msg = f"refinement delta {float(achieved):.3e} exceeds tolerance {float(requested):.3e}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class OutOfRegime(FextlabError):
    """An asymptotic formula was evaluated outside its validity window."""


class BranchError(FextlabError):
    """A square-root branch selection check failed."""


class RootNotFound(FextlabError):
    """A root-finding iteration failed to converge to the requested accuracy."""


class ExchangeStalled(FextlabError):
    """The minimax exchange iteration cycled without improving the level."""


class DegenerateReference(FextlabError):
    """The minimax reference lost alternation points and cannot be repaired."""

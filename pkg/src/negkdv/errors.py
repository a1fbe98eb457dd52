"""Exception types shared across the package."""


class RejectedInput(ValueError):
    """Input violates a documented precondition (CLI exit code 2)."""


class RegimeError(RejectedInput):
    """Wave parameters fall outside the regime of the requested family."""


class InconsistentInput(RejectedInput):
    """Input is well formed but cannot satisfy a solvability condition."""


class SingularityError(ValueError):
    """Evaluation requested at or next to a pole of a profile."""

    def __init__(self, message, nearest):
        super().__init__(message)
        self.nearest = nearest


class NumericFailure(RuntimeError):
    """A numerical procedure failed (CLI exit code 1)."""


class DivergenceError(NumericFailure):
    """Integration left the overflow guard; ``last_state`` is the last finite state."""

    def __init__(self, message, last_state=None, trajectory=None):
        super().__init__(message)
        self.last_state = last_state
        self.trajectory = trajectory


class PositivityLossError(NumericFailure):
    """The simulated field dropped below its positivity floor."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state

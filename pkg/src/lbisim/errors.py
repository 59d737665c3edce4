"""Exception hierarchy shared by every module of the workbench."""


class LbisimError(Exception):
    """Base class for all errors raised by this package."""


class CrossCalculusError(LbisimError):
    """Two objects tagged with different calculi were combined."""


class MalformedTermError(LbisimError):
    """A term violates a well-formedness rule of its calculus."""


class ParseError(LbisimError):
    """Syntax error, with 1-based source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class MAUnsupportedError(LbisimError):
    """The requested operation is undefined for mobile ambients."""


class IncompleteSubstitutionError(LbisimError):
    """A substitution fails to close the variables it must close."""


class DivergenceBudgetExceededError(LbisimError):
    """A game or state-space exploration exceeded its size budget."""

    def __init__(self, budget, explored):
        super().__init__(
            f"exploration exceeded the budget of {budget} "
            f"(reached {explored}); the symbolic state space may be infinite"
        )
        self.budget = budget
        self.explored = explored


class UnsupportedQuantificationError(LbisimError):
    """A barbed query was asked in a mode requiring quantification over
    infinitely many contexts."""

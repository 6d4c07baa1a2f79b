"""Exception types shared across the package.

Two families matter to callers: InputError (bad arguments, malformed files,
unsatisfiable parameters; CLI exit code 3) and SolverFailure (a solver ran and
honestly failed; CLI exit code 2).
"""


class DgsieveError(Exception):
    pass


class InputError(DgsieveError):
    pass


class RankError(InputError):
    """Rank constraint violated (dependent columns, rank over a guard, ...)."""


class ScaleError(InputError):
    """Scale constraint violated (e.g. non-dyadic basis where 2^-e is required)."""


class MembershipError(InputError):
    """A vector is not in the lattice it was claimed to be in."""


class ParamError(InputError):
    """Parameter outside its documented domain."""


class PoolError(InputError):
    """Vector pool too small for the requested operation."""


class SolverFailure(DgsieveError):
    pass


class StartFailure(SolverFailure):
    """Start-sampling could not admit any basis prefix at the given width."""


class AllZeroFailure(SolverFailure):
    """Every sieve grid point produced only zero vectors, after all retries.

    Carries a FailureReport (per-grid-point statistics) as .report.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BudgetError(SolverFailure):
    """An accounting budget (oracle calls, wall time) was exhausted."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace

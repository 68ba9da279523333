"""Exception taxonomy shared across the engine."""


class PayoffForgeError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(PayoffForgeError):
    """An input value violates a type invariant (bad weight, price, mesh, ...)."""


class MeshMismatchError(InvalidInputError):
    """Two objects that must share a mesh do not."""


class BudgetError(PayoffForgeError):
    """A payoff's cost against the market deviates too far from unit capital."""

    def __init__(self, cost: float, message: str | None = None):
        self.cost = float(cost)
        super().__init__(message or f"payoff cost {self.cost!r} violates the unit budget")


class MonotonicityError(PayoffForgeError):
    """Marginal utility evaluated non-positive; the utility is not increasing."""


class RiskLovingInputError(PayoffForgeError):
    """A forward solve received non-positive risk aversion without the gambling opt-in."""


class SolverError(PayoffForgeError):
    """Base class for runtime solver failures."""


class NonConvergenceError(SolverError):
    """Iteration budget exhausted or the iteration diverged."""

    def __init__(self, residual: float, iterations: int, message: str | None = None):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            message
            or f"no convergence after {self.iterations} iterations (residual {self.residual:.3e})"
        )


class BracketError(SolverError):
    """The shooting bracket does not straddle the budget root."""

    def __init__(self, cost_low: float, cost_high: float):
        self.cost_low = float(cost_low)
        self.cost_high = float(cost_high)
        super().__init__(
            "budget root not bracketed: cost at bracket ends "
            f"{self.cost_low!r} and {self.cost_high!r} (target 1)"
        )


class AccumulationOverflowError(SolverError):
    """Elasticity accumulation left the representable range; flooring the profile may help."""


class ParseError(PayoffForgeError):
    """A file could not be parsed; carries file name and line number when known."""

    def __init__(self, path: str, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")

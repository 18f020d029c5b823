"""Exception types shared across the package."""


class CovertKeyError(Exception):
    """Base class for all package errors."""


class SupportMismatch(CovertKeyError, ValueError):
    """Two distributions are defined over different alphabets."""


class AbsoluteContinuityViolation(CovertKeyError, ValueError):
    """p(x) > 0 where the reference distribution q(x) = 0."""


class DomainError(CovertKeyError, ValueError):
    """An argument lies outside the domain of the function."""


class AxisOverlap(CovertKeyError, ValueError):
    """Axis groups passed to an information measure are not disjoint."""


class SumOverflow(CovertKeyError, OverflowError):
    """An exact i.i.d. sum law would exceed the configured atom cap."""

    def __init__(self, atoms, cap):
        super().__init__(f"i.i.d. sum law needs {atoms} atoms, cap is {cap}")
        self.atoms = atoms
        self.cap = cap


class DegenerateChannel(CovertKeyError, ValueError):
    """chi(rho) = 0, so kappa(rho) and the covert rate constants are undefined."""


class EmptyRegion(CovertKeyError, ValueError):
    """Every rate corner in a sweep is the origin."""


class InfeasiblePlan(CovertKeyError, ValueError):
    """Integer codebook sizes cannot satisfy every rate constraint."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class BudgetExceeded(CovertKeyError, RuntimeError):
    """An exact enumeration would exceed the configured term budget."""

    def __init__(self, required, budget, what="enumeration"):
        super().__init__(f"{what} needs {required:.3e} terms, budget is {budget:.3e}")
        self.required = required
        self.budget = budget

"""Exception hierarchy shared by all modules."""


class HeunStepError(ArithmeticError):
    """Base class for numerical and domain failures raised by the package."""


class PoleError(HeunStepError):
    """Argument lies on a pole of the gamma function."""


class ParameterDegeneracy(HeunStepError):
    """A hypergeometric parameter combination is (nearly) integer where that is not allowed."""


class NonConvergence(HeunStepError):
    """A series did not reach its tolerance within the term cap."""


class DegenerateGamma(HeunStepError):
    """Heun exponent gamma hits an integer that makes the recurrence singular."""


class DegenerateCoefficient(HeunStepError):
    """A combination coefficient of a fundamental solution has a vanishing denominator."""


class RegimeError(HeunStepError):
    """Energy or parameters outside the regime covered by the closed-form formulas."""


class StepTooLarge(HeunStepError):
    """Step-halving shows the integrator has not converged."""


class DecompositionUnstable(HeunStepError):
    """Plane-wave decomposition at the grid edge is not stationary."""

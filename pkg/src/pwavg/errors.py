"""Exception types shared across the package."""


class PwavgError(Exception):
    """Base class for all errors raised by this package."""


class OrderMismatchError(PwavgError, ValueError):
    """Arithmetic between jets of different truncation orders."""


class ZeroConstantError(PwavgError, ZeroDivisionError):
    """Division by a jet whose constant term vanishes."""


class JetDomainError(PwavgError, ValueError):
    """Elementary function evaluated outside its domain (ln of a
    non-positive constant term, fractional power of a non-positive base)."""


class PolarTransversalityError(PwavgError, ArithmeticError):
    """Angular velocity vanished while evaluating a standard-form field."""

    def __init__(self, theta, r, detail=""):
        self.theta = theta
        self.r = r
        msg = f"polar transversality failure at theta={theta!r}, r={r!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class StiffIntegrationError(PwavgError, ArithmeticError):
    """Step-size underflow or step budget exhausted: stiff or singular
    right-hand side."""


class CrossingViolationError(PwavgError, RuntimeError):
    """A trajectory reached a discontinuity ray where the vector fields on
    the two sides disagree on the crossing direction (sliding)."""


class NoReturnError(PwavgError, RuntimeError):
    """A planar trajectory failed to return to the section within the
    time cap."""


class NoCycleFoundError(PwavgError, RuntimeError):
    """Fixed-point iteration on the displacement map did not converge."""


class DomainError(PwavgError, ValueError):
    """An evaluation point lies outside the declared domain."""


class FitConditionError(PwavgError, ArithmeticError):
    """Polynomial fit rejected: ill-conditioned or residual too large."""


class ConfigError(PwavgError, ValueError):
    """Invalid run configuration or system definition."""

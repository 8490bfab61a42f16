"""Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince pair).

Plain-Python stepping on small float lists.  Steps land exactly on the
requested endpoint (no interpolation), which is what the sector-by-sector
drivers need at the discontinuity angles.  The compiled kernel replicates
the same tableau and controller so the two paths agree closely.
"""

import math

from .errors import StiffIntegrationError

__all__ = ["DormandPrince", "integrate"]

# Dormand-Prince 5(4) tableau.
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                      64448.0 / 6561.0, -212.0 / 729.0)
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                           46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                      -2187.0 / 6784.0, 11.0 / 84.0)
# y5 - y4 error weights (b - b*), the k2 weight is zero
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_EPS = 2.220446049250313e-16


def _fixed_step(f, t, y, k1, h):
    """One 6-stage advance of size h from (t, y) with known k1 = f(t, y).

    Returns (y5, err, k7) where err is the embedded 5th-4th difference and
    k7 = f(t + h, y5) (FSAL stage).
    """
    n = len(y)
    y2 = [y[i] + h * (A21 * k1[i]) for i in range(n)]
    k2 = f(t + C2 * h, y2)
    y3 = [y[i] + h * (A31 * k1[i] + A32 * k2[i]) for i in range(n)]
    k3 = f(t + C3 * h, y3)
    y4 = [y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
          for i in range(n)]
    k4 = f(t + C4 * h, y4)
    y5 = [y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
          for i in range(n)]
    k5 = f(t + C5 * h, y5)
    y6 = [y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                      + A65 * k5[i]) for i in range(n)]
    k6 = f(t + h, y6)
    ynew = [y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                        + B6 * k6[i]) for i in range(n)]
    k7 = f(t + h, ynew)
    err = [h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                + E6 * k6[i] + E7 * k7[i]) for i in range(n)]
    return ynew, err, k7


class DormandPrince:
    """Stateful adaptive stepper; ``step(t_limit)`` performs one accepted
    step clamped so it never passes ``t_limit``."""

    def __init__(self, f, t0, y0, rtol=1e-10, atol=1e-12, h0=None,
                 max_steps=1_000_000):
        self.f = f
        self.t = float(t0)
        self.y = [float(v) for v in y0]
        self.rtol = rtol
        self.atol = atol
        self.k1 = f(self.t, self.y)
        self.h = h0 if h0 is not None else 0.0
        self.max_steps = max_steps
        self.nsteps = 0
        self.naccepted = 0
        self.last_h = 0.0

    def _err_norm(self, err, y, ynew):
        acc = 0.0
        for i, e in enumerate(err):
            sc = self.atol + self.rtol * max(abs(y[i]), abs(ynew[i]))
            q = e / sc
            acc += q * q
        return math.sqrt(acc / len(err))

    def propose(self, t_limit):
        span = t_limit - self.t
        if self.h <= 0.0:
            self.h = span / 50.0
        return min(self.h, span)

    def try_step(self, h):
        """Trial fixed step of size h from the current state (no update)."""
        ynew, _, _ = _fixed_step(self.f, self.t, self.y, self.k1, h)
        return ynew

    def step(self, t_limit):
        """Advance by one accepted step, clamped to ``t_limit``.

        Returns the used step size.  Raises StiffIntegrationError on
        step-size underflow or when the step budget runs out.
        """
        while True:
            self.nsteps += 1
            if self.nsteps > self.max_steps:
                raise StiffIntegrationError(
                    f"step budget exhausted at t={self.t!r}")
            h = self.propose(t_limit)
            if h < 16.0 * _EPS * max(1.0, abs(self.t)):
                raise StiffIntegrationError(
                    f"step size underflow at t={self.t!r}")
            ynew, err, k7 = _fixed_step(self.f, self.t, self.y, self.k1, h)
            norm = self._err_norm(err, self.y, ynew)
            if norm <= 1.0:
                factor = _MAX_FACTOR if norm == 0.0 else min(
                    _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * norm ** -0.2))
                exact_end = (h >= t_limit - self.t)
                self.t = t_limit if exact_end else self.t + h
                self.y = ynew
                self.k1 = k7
                self.h = h * factor
                self.naccepted += 1
                self.last_h = h
                return h
            self.h = h * max(_MIN_FACTOR, _SAFETY * norm ** -0.2)


def integrate(f, t0, t1, y0, rtol=1e-10, atol=1e-12, max_steps=1_000_000,
              on_step=None, h0=None):
    """Integrate y' = f(t, y) from t0 to t1 (t1 > t0), landing exactly on t1.

    Returns (y(t1), accepted_steps).  ``on_step(t, y)`` is called after each
    accepted step.
    """
    stepper = DormandPrince(f, t0, y0, rtol=rtol, atol=atol, h0=h0,
                            max_steps=max_steps)
    while stepper.t < t1:
        stepper.step(t1)
        if on_step is not None:
            on_step(stepper.t, stepper.y)
    return stepper.y, stepper.naccepted

"""Truncated power-series ("jet") arithmetic of a fixed order.

A jet of order K carries the Taylor coefficients ``coeffs[0..K]`` of a
function of one formal variable; arithmetic is exact modulo the variable
to the power K+1.  Jets are used in two nested roles: the outer variable
is the perturbation size, the inner one an offset in the radial variable,
so coefficients may themselves be jets.  The truncation order is fixed at
construction; mixing orders is an error rather than a silent promotion.
"""

import math

from .errors import JetDomainError, OrderMismatchError, ZeroConstantError

__all__ = [
    "Jet", "jet_const", "jet_var", "jet_add", "jet_sub", "jet_mul",
    "jet_div", "jet_elementary", "sin", "cos", "exp", "ln", "jpow",
    "taylor_coefficients",
]

_SCALARS = (int, float)


def _lead(x):
    """Leading scalar of a possibly nested coefficient."""
    while isinstance(x, Jet):
        x = x.coeffs[0]
    return x


def _inv(x):
    if isinstance(x, Jet):
        return x._reciprocal()
    if x == 0.0:
        raise ZeroConstantError("division by zero constant term")
    return 1.0 / x


class Jet:
    """Truncated power series with ``order + 1`` coefficients.

    Coefficients are floats, or jets themselves in the nested scheme.
    Supports ``+ - * / **`` against jets of the same order and against
    plain scalars (a scalar acts on the constant coefficient).
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs):
        coeffs = tuple(float(c) if isinstance(c, int) else c for c in coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least the constant coefficient")
        self.coeffs = coeffs
        self.order = len(coeffs) - 1

    # -- helpers ---------------------------------------------------------

    def _zero_coeff(self):
        c0 = self.coeffs[0]
        return c0 * 0.0 if isinstance(c0, Jet) else 0.0

    def _check(self, other):
        if other.order != self.order:
            raise OrderMismatchError(
                f"jet orders differ: {self.order} vs {other.order}")

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    __hash__ = None

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet([a + b for a, b in zip(self.coeffs, other.coeffs)])
        if isinstance(other, _SCALARS):
            return Jet((self.coeffs[0] + other,) + self.coeffs[1:])
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet([a - b for a, b in zip(self.coeffs, other.coeffs)])
        if isinstance(other, _SCALARS):
            return Jet((self.coeffs[0] - other,) + self.coeffs[1:])
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            a, b = self.coeffs, other.coeffs
            return Jet([
                sum((a[p] * b[m - p] for p in range(1, m + 1)),
                    start=a[0] * b[m])
                for m in range(self.order + 1)
            ])
        if isinstance(other, _SCALARS):
            return Jet([c * other for c in self.coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def _reciprocal(self):
        inv0 = _inv(self.coeffs[0])
        out = [inv0]
        for m in range(1, self.order + 1):
            acc = self.coeffs[m] * out[0]
            for p in range(1, m):
                acc = acc + self.coeffs[m - p] * out[p]
            out.append(-(acc * inv0) if isinstance(acc, Jet) else -acc * inv0)
        return Jet(out)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            inv0 = _inv(other.coeffs[0])
            out = [self.coeffs[0] * inv0]
            for m in range(1, self.order + 1):
                acc = self.coeffs[m]
                for p in range(m):
                    acc = acc - out[p] * other.coeffs[m - p]
                out.append(acc * inv0)
            return Jet(out)
        if isinstance(other, _SCALARS):
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _SCALARS):
            return self._reciprocal() * other
        return NotImplemented

    def __pow__(self, alpha):
        if isinstance(alpha, int) or (isinstance(alpha, float)
                                      and alpha == int(alpha)):
            n = int(alpha)
            if n < 0:
                return self._reciprocal() ** (-n)
            out = jet_const(1.0, self.order) if not isinstance(
                self.coeffs[0], Jet) else Jet(
                    (self.coeffs[0] * 0.0 + 1.0,)
                    + tuple(self._zero_coeff() for _ in range(self.order)))
            base = self
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        return _pow_real(self, float(alpha))


def jet_const(c, order):
    """Jet of a constant: coefficients ``[c, 0, ..., 0]``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    zero = c * 0.0 if isinstance(c, Jet) else 0.0
    return Jet((c,) + (zero,) * order)


def jet_var(c, order):
    """Jet of the variable itself around ``c``: ``[c, 1, 0, ..., 0]``.

    Evaluating a smooth expression on this jet yields the derivatives of
    the expression at ``c`` divided by the factorials (Taylor coefficients).
    """
    if order < 1:
        raise ValueError("a variable jet needs order >= 1")
    if isinstance(c, Jet):
        zero = c * 0.0
        return Jet((c, zero + 1.0) + (zero,) * (order - 1))
    return Jet((c, 1.0) + (0.0,) * (order - 1))


def jet_add(a, b):
    return a + b


def jet_sub(a, b):
    return a - b


def jet_mul(a, b):
    """Truncated Cauchy product; orders must match."""
    return a * b


def jet_div(a, b):
    """Truncated quotient; ``b`` must have a nonzero constant term."""
    return a / b


# -- elementary functions -------------------------------------------------
#
# Standard recurrences for composing a jet with an elementary function:
# the derivative identity of the function is matched coefficient-wise.
# The scalar case dispatches to math.*, so the same code serves nested
# coefficients by recursion.

def _dispatch(fn_scalar, fn_jet, x):
    if isinstance(x, Jet):
        return fn_jet(x)
    return fn_scalar(x)


def _sincos(a):
    if not isinstance(a, Jet):
        return math.sin(a), math.cos(a)
    s0 = _dispatch(math.sin, _sin_jet, a.coeffs[0])
    c0 = _dispatch(math.cos, _cos_jet, a.coeffs[0])
    s, c = [s0], [c0]
    for m in range(1, a.order + 1):
        sm = a.coeffs[1] * c[m - 1]
        cm = a.coeffs[1] * s[m - 1]
        for q in range(2, m + 1):
            sm = sm + (q * a.coeffs[q]) * c[m - q]
            cm = cm + (q * a.coeffs[q]) * s[m - q]
        s.append(sm * (1.0 / m))
        c.append(cm * (-1.0 / m))
    return Jet(s), Jet(c)


def _sin_jet(a):
    return _sincos(a)[0]


def _cos_jet(a):
    return _sincos(a)[1]


def sin(x):
    return _dispatch(math.sin, _sin_jet, x)


def cos(x):
    return _dispatch(math.cos, _cos_jet, x)


def _exp_jet(a):
    e = [_dispatch(math.exp, _exp_jet, a.coeffs[0])]
    for m in range(1, a.order + 1):
        acc = a.coeffs[1] * e[m - 1]
        for q in range(2, m + 1):
            acc = acc + (q * a.coeffs[q]) * e[m - q]
        e.append(acc * (1.0 / m))
    return Jet(e)


def exp(x):
    return _dispatch(math.exp, _exp_jet, x)


def _log_scalar(x):
    if x <= 0.0:
        raise JetDomainError(f"ln of non-positive value {x!r}")
    return math.log(x)


def _log_jet(a):
    if _lead(a.coeffs[0]) <= 0.0:
        raise JetDomainError("ln of a jet with non-positive constant term")
    inv0 = _inv(a.coeffs[0])
    y = [_dispatch(_log_scalar, _log_jet, a.coeffs[0])]
    for m in range(1, a.order + 1):
        acc = (m * a.coeffs[m])
        for q in range(1, m):
            acc = acc - (q * y[q]) * a.coeffs[m - q]
        y.append(acc * inv0 * (1.0 / m))
    return Jet(y)


def ln(x):
    return _dispatch(_log_scalar, _log_jet, x)


def _pow_real(a, alpha):
    if _lead(a.coeffs[0]) <= 0.0:
        raise JetDomainError(
            "fractional power of a jet with non-positive constant term")
    inv0 = _inv(a.coeffs[0])
    p0 = _dispatch(lambda v: v ** alpha, lambda j: _pow_real(j, alpha),
                   a.coeffs[0])
    p = [p0]
    for m in range(1, a.order + 1):
        acc = ((alpha + 1.0) * 1 - m) * a.coeffs[1] * p[m - 1]
        for q in range(2, m + 1):
            acc = acc + (((alpha + 1.0) * q - m) * a.coeffs[q]) * p[m - q]
        p.append(acc * inv0 * (1.0 / m))
    return Jet(p)


def jpow(x, alpha):
    if isinstance(x, Jet):
        return x ** alpha
    return x ** alpha


_ELEMENTARY = {"sin": sin, "cos": cos, "exp": exp, "ln": ln}


def jet_elementary(name, a, exponent=None):
    """Compose a jet with one of sin, cos, exp, ln, pow.

    ``pow`` needs the ``exponent`` argument; integer exponents work for any
    base, fractional ones require a positive constant term.
    """
    if name == "pow":
        if exponent is None:
            raise ValueError("pow requires an exponent")
        return jpow(a, exponent)
    try:
        fn = _ELEMENTARY[name]
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None
    return fn(a)


def taylor_coefficients(fn, c, order):
    """Taylor coefficients of ``fn`` at ``c``: evaluates ``fn(c + t)`` on a
    variable jet and returns its coefficients (g^(m)(c)/m!)."""
    return fn(jet_var(float(c), order)).coeffs

"""Pure-Python kernel: sector-field tables and sector integration.

This is the fallback (and reference) implementation of the hot kernels.
The field table is computed with nested jets (inner variable: radial
offset, outer variable: perturbation size) exactly as the series module
defines them; the compiled kernel reproduces the same arithmetic on flat
arrays.
"""

import math

from . import rk, series
from .errors import PolarTransversalityError

NAME = "python"

# below this the leading denominator coefficient counts as a vanishing
# angular velocity
TRANSVERSALITY_TINY = 1e-13


def prepare(desc):
    """Kernel-specific handle for a descriptor (identity here)."""
    return desc


def _poly_rows_at(rows, cpow, spow, iv, kr):
    """Evaluate one eps-order's r-polynomial at the inner jet ``iv``."""
    deg = len(rows) - 1
    coeffs = []
    for row in rows:
        acc = 0.0
        for ca, sa, w in row:
            acc += w * cpow[ca] * spow[sa]
        coeffs.append(acc)
    acc = series.jet_const(coeffs[deg], kr)
    for m in range(deg - 1, -1, -1):
        acc = acc * iv + coeffs[m]
    return acc


def field_table(desc, theta, r, ke, kr):
    """Coefficients F_hat[i][L] = (1/L!) d^L F_i / dr^L at (theta, r).

    ``desc`` is a RationalSectorDescriptor; result has (ke+1) rows and
    (kr+1) columns.
    """
    c = math.cos(theta)
    s = math.sin(theta)
    deg = desc.trig_deg
    cpow = [1.0] * (deg + 1)
    spow = [1.0] * (deg + 1)
    for p in range(1, deg + 1):
        cpow[p] = cpow[p - 1] * c
        spow[p] = spow[p - 1] * s
    iv = series.jet_var(r, kr) if kr >= 1 else series.Jet((r,))
    zero = series.jet_const(0.0, kr)

    def outer(part):
        rows = []
        for i in range(ke + 1):
            if i < len(part):
                rows.append(_poly_rows_at(part[i], cpow, spow, iv, kr))
            else:
                rows.append(zero)
        return series.Jet(rows)

    num = outer(desc.num)
    den = outer(desc.den)
    if abs(den.coeffs[0].coeffs[0]) < TRANSVERSALITY_TINY:
        raise PolarTransversalityError(theta, r)
    f = num / den
    return [list(f.coeffs[i].coeffs) for i in range(ke + 1)]


def combine_cascade_rhs(table, y, k, per_i, fact):
    """Cascade derivative from a field table and the Bell-sum term lists.

    State layout: y[0] is the unperturbed radius, y[m] = z_m for m=1..k.
    ``per_i[i-1]`` lists (l, L, coef, exps) for order i with L! folded
    into coef.
    """
    dy = [table[0][0]] + [0.0] * k
    for i in range(1, k + 1):
        acc = table[i][0]
        for l, L, coef, exps in per_i[i - 1]:
            term = coef * table[i - l][L]
            for m in range(1, l + 1):
                e = exps[m - 1]
                if e:
                    zm = y[m]
                    for _ in range(e):
                        term *= zm
            acc += term
        dy[i] = fact[i] * acc
    return dy


def advance_cascade(desc, terms, k, th0, th1, y, rtol, atol, trace=False):
    """Integrate the cascade within one sector [th0, th1]."""
    per_i = terms.per_i
    fact = terms.fact

    def rhs(t, yy):
        tab = field_table(desc, t, yy[0], k, k)
        return combine_cascade_rhs(tab, yy, k, per_i, fact)

    points = [] if trace else None
    on_step = (lambda t, yy: points.append((t, tuple(yy)))) if trace else None
    ynew, nsteps = rk.integrate(rhs, th0, th1, y, rtol=rtol, atol=atol,
                                on_step=on_step)
    return ynew, nsteps, points


def advance_radial(desc, eps, kuse, th0, th1, r0, rtol, atol):
    """Integrate dr/dtheta = sum_i eps^i F_i(theta, r) within one sector."""
    epow = [eps ** i for i in range(kuse + 1)]

    def rhs(t, yy):
        tab = field_table(desc, t, yy[0], kuse, 0)
        acc = 0.0
        for i in range(kuse + 1):
            acc += epow[i] * tab[i][0]
        return [acc]

    ynew, nsteps = rk.integrate(rhs, th0, th1, [r0], rtol=rtol, atol=atol)
    return ynew[0], nsteps

"""Zero finding on averaged functions, polynomial coefficient fits, the
parameter-rank lower bound, and the logarithmic-family counting for the
n-zone quadratic example.

A simple zero rho* of the first nonvanishing averaged function, with
f_l'(rho*) != 0, marks a crossing limit cycle of the perturbed system for
small eps; the rank of the coefficient Jacobian over the free parameters,
minus one, bounds from below how many such zeros the family can realize.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as nppoly

from .errors import FitConditionError

__all__ = ["CycleCandidate", "ZeroScan", "scan_zeros", "find_zeros",
           "CoefficientVector", "fit_coefficients", "RankReport",
           "parameter_rank", "LogFamilyCount", "log_family_count"]


@dataclass
class CycleCandidate:
    """A bracketed simple zero of an averaged function."""

    rho_star: float
    l: int
    deriv: float
    bracket: tuple
    residual: float


@dataclass
class ZeroScan:
    candidates: list
    non_simple: list        # zeros whose derivative fails the threshold
    scale: float            # sup |f| over the scan grid
    grid: tuple


def _derivative_of(f, rho, hrel=1e-5):
    if hasattr(f, "derivative"):
        return f.derivative(rho)
    h = max(hrel, hrel * abs(rho))
    return (f(rho + h) - f(rho - h)) / (2.0 * h)


def scan_zeros(f, domain=None, grid_size=64, simple_rtol=1e-6,
               bisect_rtol=1e-12):
    """Grid scan, sign-change bracketing, bisection, secant polish.

    Zeros closer together than the grid step can be missed; the grid is
    the caller's resolution choice.  Non-simple roots (derivative below
    simple_rtol times the sup of |f| on the grid) are reported separately
    and never returned as candidates.
    """
    if domain is None:
        domain = f.domain
    lo, hi = float(domain[0]), float(domain[1])
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    inset = 1e-9 * (hi - lo)
    xs = np.linspace(lo + inset, hi - inset, grid_size)
    vals = [f(x) for x in xs]
    scale = max(abs(v) for v in vals)
    l_order = getattr(f, "l", 0)
    candidates, non_simple = [], []
    if scale == 0.0:
        return ZeroScan([], [], 0.0, tuple(xs))
    width_tol = bisect_rtol * (hi - lo)
    for i in range(grid_size - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            fa = math.copysign(1e-300, fb if fb != 0.0 else 1.0)
        if fa * fb >= 0.0:
            continue
        a, b = float(xs[i]), float(xs[i + 1])
        bracket = (a, b)
        va, vb = fa, fb
        while b - a > width_tol:
            m = 0.5 * (a + b)
            vm = f(m)
            if vm == 0.0:
                a = b = m
                va = vb = vm
                break
            if va * vm < 0.0:
                b, vb = m, vm
            else:
                a, va = m, vm
        root, fr = 0.5 * (a + b), f(0.5 * (a + b))
        # secant polish from the bisection endpoints
        x0, f0, x1, f1 = a, va, root, fr
        for _ in range(4):
            if f1 == 0.0 or f1 == f0:
                break
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if not bracket[0] <= x2 <= bracket[1]:
                break
            x0, f0, x1, f1 = x1, f1, x2, f(x2)
        root, fr = x1, f1
        deriv = _derivative_of(f, root)
        cand = CycleCandidate(rho_star=root, l=l_order, deriv=deriv,
                              bracket=bracket, residual=abs(fr))
        if abs(deriv) <= simple_rtol * scale:
            non_simple.append(cand)
        else:
            candidates.append(cand)
    return ZeroScan(candidates, non_simple, scale, tuple(xs))


def find_zeros(f, domain=None, grid_size=64, simple_rtol=1e-6):
    """Simple zeros of f on the domain; see scan_zeros for the policy."""
    return scan_zeros(f, domain=domain, grid_size=grid_size,
                      simple_rtol=simple_rtol).candidates


@dataclass
class CoefficientVector:
    """Power-basis coefficients of rho^pole_order * f_l(rho)."""

    l: int
    degree: int
    coeffs: tuple
    residual: float
    pole_order: int = 0
    cond: float = 0.0

    def __call__(self, rho):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * rho + c
        return acc / rho ** self.pole_order


def fit_coefficients(f, degree, domain=None, pole_order=0, n_nodes=None,
                     cond_max=1e12):
    """Least-squares polynomial fit of rho^pole_order * f at Chebyshev
    nodes; the fit runs in the Chebyshev basis of the mapped interval and
    is converted to power-basis coefficients in rho afterwards.

    Raises FitConditionError when the design matrix condition exceeds
    ``cond_max``.  The max-abs residual at the nodes is reported; deciding
    whether it certifies polynomial structure is the caller's business.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if domain is None:
        domain = f.domain
    lo, hi = float(domain[0]), float(domain[1])
    m = n_nodes if n_nodes is not None else 2 * (degree + 1) + 4
    if m < 2 * (degree + 1):
        raise ValueError(f"need at least {2 * (degree + 1)} sample points")
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    t = np.cos(np.pi * (2 * np.arange(m) + 1) / (2 * m))
    xs = mid + half * t
    vals = np.array([x ** pole_order * f(x) for x in xs])
    design = npcheb.chebvander(t, degree)
    cond = float(np.linalg.cond(design))
    if cond > cond_max:
        raise FitConditionError(
            f"fit rejected: condition estimate {cond:.3e} above "
            f"{cond_max:.1e}")
    cfit, *_ = np.linalg.lstsq(design, vals, rcond=None)
    residual = float(np.max(np.abs(design @ cfit - vals)))
    # power coefficients in rho: substitute t = (rho - mid)/half
    ct = npcheb.cheb2poly(cfit)
    lin = np.array([-mid / half, 1.0 / half])
    acc = np.array([ct[-1]])
    for c in ct[-2::-1]:
        acc = nppoly.polyadd(nppoly.polymul(acc, lin), [c])
    coeffs = np.zeros(degree + 1)
    coeffs[:len(acc)] = acc
    return CoefficientVector(l=getattr(f, "l", 0), degree=degree,
                             coeffs=tuple(float(c) for c in coeffs),
                             residual=residual, pole_order=pole_order,
                             cond=cond)


@dataclass
class RankReport:
    rank: int
    singular_values: tuple
    jacobian: np.ndarray
    degree: int
    pole_order: int
    base_fit: CoefficientVector = field(repr=False, default=None)


def parameter_rank(family, v0, degree, pole_order=0, domain=None,
                   step=1e-5, svd_rtol=1e-8, fit_tol=1e-6, n_nodes=None):
    """Rank of the Jacobian of the fitted coefficient vector with respect
    to the family parameters, at the base point v0.

    ``family(v)`` must return an evaluable averaged function (with a
    ``domain`` when none is passed).  Central differences with the given
    step per parameter; rank counts singular values above svd_rtol times
    the largest.  A fit residual above fit_tol times the coefficient scale
    refuses the analysis (the function is not polynomial at this setup).
    """
    v0 = np.asarray(v0, dtype=float)

    def fit_at(v):
        fl = family(list(v))
        cv = fit_coefficients(fl, degree, domain=domain,
                              pole_order=pole_order, n_nodes=n_nodes)
        scale = max(1.0, max(abs(c) for c in cv.coeffs))
        if cv.residual > fit_tol * scale:
            raise FitConditionError(
                f"fit residual {cv.residual:.3e} exceeds {fit_tol:.1e} x "
                f"scale; polynomial structure not certified, rank "
                f"analysis refused")
        return cv

    base = fit_at(v0)
    cols = []
    for p in range(len(v0)):
        vp = v0.copy()
        vm = v0.copy()
        vp[p] += step
        vm[p] -= step
        try:
            cp = np.array(fit_at(vp).coeffs)
            cm = np.array(fit_at(vm).coeffs)
        except FitConditionError:
            raise
        except Exception as exc:
            raise FitConditionError(
                f"fit failed while perturbing parameter {p}: {exc}"
            ) from exc
        cols.append((cp - cm) / (2.0 * step))
    jac = np.column_stack(cols)
    svals = np.linalg.svd(jac, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(svals > svd_rtol * svals[0]))
    return RankReport(rank=rank, singular_values=tuple(float(s)
                                                       for s in svals),
                      jacobian=jac, degree=degree, pole_order=pole_order,
                      base_fit=base)


@dataclass
class LogFamilyCount:
    """Size of the independent function family of the n-zone quadratic
    example and the implied lower bound on its limit cycles."""

    n: int
    family_size: int
    cycle_bound: int


def log_family_count(n):
    """Counting for the n-zone logarithmic family.

    The family {1, r, h_j} loses one member for each even-n vanishing
    index and one per coinciding pair; the cycle bound is the family size
    minus one, except n = 2 where the first order gives no information.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n % 2 == 1:
        return LogFamilyCount(n, n + 1, n)
    if n == 2:
        return LogFamilyCount(2, 2, 0)
    if n % 4 == 0:
        return LogFamilyCount(n, n // 2 + 2, n // 2 + 1)
    return LogFamilyCount(n, n // 2 + 1, n // 2)

"""The averaging cascade: unperturbed flow plus the z_1..z_k hierarchy.

The averaged function of order l is f_l(rho) = z_l(2*pi, rho) / l!, where
the z_i solve a triangular ODE system driven by the sector fields and
their radial derivatives, with the state carried continuously across the
sector boundaries.  Written as an ODE, order i reads

    dz_i/dtheta = i! * ( F_i(theta, phi)
        + sum_{l=1}^{i} sum_{S_l} c_b * d^L F_{i-l}(theta, phi)
          * prod_m z_m^{b_m} ),

with c_b = 1 / (b_1! b_2! 2!^{b_2} ... b_l! l!^{b_l}) and L = sum b_m.
All the radial derivatives at one (theta, phi) come from a single sector
table evaluation.
"""

import csv
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernel_py, backend, bell, rk
from .csvout import write_rows
from .errors import (DomainError, PolarTransversalityError, PwavgError,
                     StiffIntegrationError)
from .model import RationalSectorField, TWO_PI

__all__ = ["Cascade", "CascadeTerms", "cascade_terms", "cascade_rhs",
           "integrate_cascade", "averaged", "averaged_derivative",
           "AveragedFunction", "averaged_via_integrating_factor",
           "write_trace_csv"]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class CascadeTerms:
    """Precomputed Bell-sum terms of the cascade right-hand side.

    ``per_i[i-1]`` holds tuples (l, L, coef, exps) for order i, where coef
    already contains the L! that turns the stored Taylor table into the
    derivative d^L F.  ``flat`` packs the same data as arrays for the
    compiled kernel.
    """

    def __init__(self, k):
        self.k = k
        self.fact = tuple(float(bell.factorial(i)) for i in range(k + 1))
        per_i = []
        for i in range(1, k + 1):
            terms = []
            for l in range(1, i + 1):
                for pt in bell.enumerate_S(l):
                    L = pt.L
                    den = 1
                    for m, bm in enumerate(pt.b, start=1):
                        den *= bell.factorial(bm) * bell.factorial(m) ** bm
                    coef = bell.factorial(L) / den
                    terms.append((l, L, coef, pt.b))
            per_i.append(tuple(terms))
        self.per_i = tuple(per_i)
        flat_i, flat_l, flat_L, flat_coef, flat_exp = [], [], [], [], []
        for i, terms in enumerate(per_i, start=1):
            for l, L, coef, exps in terms:
                flat_i.append(i)
                flat_l.append(l)
                flat_L.append(L)
                flat_coef.append(coef)
                flat_exp.extend(list(exps) + [0] * (k - l))
        self.flat = (np.asarray(flat_i, dtype=np.int32),
                     np.asarray(flat_l, dtype=np.int32),
                     np.asarray(flat_L, dtype=np.int32),
                     np.asarray(flat_coef, dtype=np.float64),
                     np.asarray(flat_exp, dtype=np.int32),
                     np.asarray(self.fact, dtype=np.float64))


@lru_cache(maxsize=None)
def cascade_terms(k):
    return CascadeTerms(k)


@dataclass
class Cascade:
    """Cascade state (phi, z_1, ..., z_k) at the final angle."""

    rho: float
    k: int
    theta: float
    state: tuple
    sector: int
    nsteps: int
    trace: list = None


def cascade_rhs(system, j, theta, state, k=None, kernel=None):
    """Derivative of (phi, z_1..z_k) in sector j (1-based) at theta."""
    if k is None:
        k = len(state) - 1
    terms = cascade_terms(k)
    fld = system.sectors[j - 1]
    table = fld.table(theta, state[0], k, k, kernel=kernel)
    return _kernel_py.combine_cascade_rhs(table, list(state), k,
                                          terms.per_i, terms.fact)


def _python_advance(fld, terms, k, th0, th1, y, rtol, atol, trace, kernel):
    def rhs(t, yy):
        tab = fld.table(t, yy[0], k, k, kernel=kernel)
        return _kernel_py.combine_cascade_rhs(tab, yy, k, terms.per_i,
                                              terms.fact)

    points = [] if trace else None
    on_step = (lambda t, yy: points.append((t, tuple(yy)))) if trace else None
    ynew, nsteps = rk.integrate(rhs, th0, th1, y, rtol=rtol, atol=atol,
                                on_step=on_step)
    return ynew, nsteps, points


def integrate_cascade(system, rho, k=None, theta_end=TWO_PI,
                      rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, trace=False,
                      kernel=None):
    """Advance the cascade from 0 to theta_end, sector by sector.

    The integrator stops exactly at every boundary angle, swaps in the
    next sector's field, and carries the state unchanged (the matching
    condition).  ``k=0`` integrates only the unperturbed flow.
    """
    system.check_rho(rho)
    if k is None:
        k = system.k
    if not 0 <= k <= 7:
        raise ValueError(f"averaging order k={k} outside 0..7")
    if not 0.0 < theta_end <= TWO_PI:
        raise DomainError(f"theta_end={theta_end!r} outside (0, 2*pi]")
    kernel = kernel or backend.default_kernel()
    terms = cascade_terms(k)
    y = [float(rho)] + [0.0] * k
    points = [(0.0, tuple(y))] if trace else None
    nsteps = 0
    alphas = system.partition.alphas
    last_sector = 1
    for j in range(system.partition.n):
        th0 = alphas[j]
        if th0 >= theta_end:
            break
        th1 = min(alphas[j + 1], theta_end)
        last_sector = j + 1
        fld = system.sectors[j]
        if trace and j > 0:
            points.append((th0, tuple(y)))
        try:
            if isinstance(fld, RationalSectorField):
                y, nst, pts = kernel.advance_cascade(
                    fld.handle(kernel), terms, k, th0, th1, y,
                    rtol, atol, trace)
            else:
                y, nst, pts = _python_advance(fld, terms, k, th0, th1, y,
                                              rtol, atol, trace, kernel)
        except PolarTransversalityError as exc:
            raise PolarTransversalityError(
                exc.theta, exc.r,
                detail=f"sector {j + 1}, rho={rho!r}") from exc
        except StiffIntegrationError as exc:
            raise StiffIntegrationError(
                f"stiff or singular cascade in sector {j + 1} at "
                f"rho={rho!r}: {exc}") from exc
        nsteps += nst
        if trace and pts:
            points.extend(pts)
    return Cascade(rho=float(rho), k=k, theta=theta_end, state=tuple(y),
                   sector=last_sector, nsteps=nsteps, trace=points)


def averaged(system, l, rho, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
             kernel=None):
    """Averaged function of order l: z_l(2*pi, rho) / l!."""
    if not 1 <= l <= system.k:
        raise ValueError(f"order l={l} outside 1..k={system.k}")
    cas = integrate_cascade(system, rho, k=l, rtol=rtol, atol=atol,
                            kernel=kernel)
    return cas.state[l] / bell.factorial(l)


def _fd_derivative(f, rho, h, lo, hi):
    """Richardson-extrapolated finite difference, one-sided near the
    domain ends (the domain is open; nothing is known outside)."""
    if rho - 2 * h > lo and rho + 2 * h < hi:
        def d(hh):
            return (f(rho + hh) - f(rho - hh)) / (2.0 * hh)
    elif rho + 4 * h < hi:
        def d(hh):
            return (-3.0 * f(rho) + 4.0 * f(rho + hh)
                    - f(rho + 2.0 * hh)) / (2.0 * hh)
    elif rho - 4 * h > lo:
        def d(hh):
            return (3.0 * f(rho) - 4.0 * f(rho - hh)
                    + f(rho - 2.0 * hh)) / (2.0 * hh)
    else:
        raise DomainError(f"rho={rho!r} too close to both domain ends for "
                          "finite differences")
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def averaged_derivative(system, l, rho, rtol=DEFAULT_RTOL,
                        atol=DEFAULT_ATOL, kernel=None, _eval=None):
    """d f_l / d rho by central differences with Richardson extrapolation."""
    h = max(1e-5, 1e-4 * abs(rho))
    lo, hi = system.domain
    if _eval is None:
        def _eval(r):
            return averaged(system, l, r, rtol=rtol, atol=atol,
                            kernel=kernel)
    return _fd_derivative(_eval, rho, h, lo, hi)


class AveragedFunction:
    """Evaluable f_l with a value cache and derivative access."""

    def __init__(self, system, l, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                 kernel=None):
        if not 1 <= l <= system.k:
            raise ValueError(f"order l={l} outside 1..k={system.k}")
        self.system = system
        self.l = l
        self.rtol = rtol
        self.atol = atol
        self.kernel = kernel
        self._cache = {}
        self._lock = threading.Lock()

    def __call__(self, rho):
        rho = float(rho)
        with self._lock:
            hit = self._cache.get(rho)
        if hit is not None:
            return hit
        val = averaged(self.system, self.l, rho, rtol=self.rtol,
                       atol=self.atol, kernel=self.kernel)
        with self._lock:
            self._cache[rho] = val
        return val

    def derivative(self, rho):
        return averaged_derivative(self.system, self.l, rho, _eval=self)

    @property
    def domain(self):
        return self.system.domain


def averaged_via_integrating_factor(system, rho, theta_end=TWO_PI,
                                    rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """First-order averaged value through the explicit per-sector solution
    of the z_1 equation.

    Carries eta_j = integral of dF_0/dr along the flow and the weighted
    integral of F_1; per sector, z_1 <- e^eta (z_1 + I).  Independent
    cross-check of the cascade path for l = 1.
    """
    if system.k < 1:
        raise ValueError("system must carry at least order 1")
    system.check_rho(rho)
    if not 0.0 < theta_end <= TWO_PI:
        raise DomainError(f"theta_end={theta_end!r} outside (0, 2*pi]")
    carry = 0.0
    y = [float(rho), 0.0, 0.0]
    alphas = system.partition.alphas
    for j in range(system.partition.n):
        th0 = alphas[j]
        if th0 >= theta_end:
            break
        th1 = min(alphas[j + 1], theta_end)
        fld = system.sectors[j]

        def rhs(t, yy):
            tab = fld.table(t, yy[0], 1, 1)
            return [tab[0][0], tab[0][1],
                    math.exp(-yy[1]) * tab[1][0]]

        y, _ = rk.integrate(rhs, th0, th1, y, rtol=rtol, atol=atol)
        carry = math.exp(y[1]) * (carry + y[2])
        y[1] = 0.0
        y[2] = 0.0
    return carry


def write_trace_csv(cascade, path):
    """Dump cascade checkpoints as CSV rows (theta, phi, z_1, ..., z_k)."""
    if cascade.trace is None:
        raise ValueError("cascade was integrated without trace=True")
    header = ["theta", "phi"] + [f"z{i}" for i in range(1, cascade.k + 1)]
    rows = [(t,) + tuple(state) for t, state in cascade.trace]
    write_rows(path, header, rows)

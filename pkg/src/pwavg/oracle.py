"""Ground truth for the averaging predictions: direct simulation of the
perturbed system, displacement function, and fixed-point continuation.

Two independent integration routes are provided.  Standard-form mode
advances dr/dtheta = sum_i eps^i F_i sector by sector in the angle;
planar mode integrates the original planar field in time with event
location on the discontinuity rays.  Their agreement, the size of the
expansion remainder, and the convergence of displacement zeros to the
predicted radii are the package's acceptance checks.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend, rk
from .averaging import averaged
from .csvout import write_rows
from .errors import (ConfigError, CrossingViolationError, DomainError,
                     NoCycleFoundError, NoReturnError, StiffIntegrationError)
from .model import RationalSectorField, TWO_PI

__all__ = ["DisplacementSample", "RemainderSlope", "VerifiedCycle",
           "displacement", "remainder_slope", "verify_cycle",
           "cross_check_modes", "write_displacement_csv"]

RAY_TOL = 1e-13  # event location accuracy on the angular coordinate
TIME_CAP_FACTOR = 10.0


@dataclass
class DisplacementSample:
    """One evaluation of f(rho, eps) = r(2*pi, rho, eps) - rho."""

    rho: float
    eps: float
    d: float
    mode: str
    nsteps: int


@dataclass
class RemainderSlope:
    """Measured order of d(rho, eps) - sum_i eps^i f_i(rho) on an
    eps-ladder.  ``slope`` is +inf when every usable point sits below the
    noise floor (remainder below measurable floor: a pass)."""

    rho: float
    k: int
    slope: float
    samples: tuple          # (eps, remainder) pairs
    used: tuple             # eps values that entered the fit
    floor: float
    floored: bool


@dataclass
class VerifiedCycle:
    """Fixed point of the displacement map near a predicted radius."""

    eps: float
    rho_eps: float
    rho_star: float
    drift: float            # |rho(eps) - rho_star|
    residual: float         # |d(rho(eps), eps)|
    iterations: int
    mode: str


def _standard_displacement(system, rho, eps, rtol, atol, kernel):
    kernel = kernel or backend.default_kernel()
    kuse = system.k
    alphas = system.partition.alphas
    r = float(rho)
    nsteps = 0
    for j in range(system.partition.n):
        fld = system.sectors[j]
        th0, th1 = alphas[j], alphas[j + 1]
        if isinstance(fld, RationalSectorField):
            r, nst = kernel.advance_radial(fld.handle(kernel), eps, kuse,
                                           th0, th1, r, rtol, atol)
        else:
            epow = [eps ** i for i in range(kuse + 1)]

            def rhs(t, yy):
                tab = fld.table(t, yy[0], kuse, 0, kernel=kernel)
                return [sum(epow[i] * tab[i][0] for i in range(kuse + 1))]

            yy, nst = rk.integrate(rhs, th0, th1, [r], rtol=rtol, atol=atol)
            r = yy[0]
        nsteps += nst
    return r - rho, nsteps


def _angle_increment(x0, y0, x1, y1):
    return math.atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1)


def _angular_velocity(sector, x, y, eps, k):
    vx, vy = sector.velocity(x, y, eps, k)
    return (x * vy - y * vx) / (x * x + y * y)


def _period_estimate(planar, rho):
    """Rough unperturbed return time from the angular velocity sampled on
    the circle of radius rho; only used to size the time cap, so slow
    spots are clamped instead of failing."""
    total = 0.0
    alphas = planar.partition.alphas
    for j, sector in enumerate(planar.sectors):
        th0, th1 = alphas[j], alphas[j + 1]
        m = 64
        dth = (th1 - th0) / m
        for i in range(m):
            th = th0 + (i + 0.5) * dth
            w = _angular_velocity(sector, rho * math.cos(th),
                                  rho * math.sin(th), 0.0, 0)
            total += dth / max(abs(w), 1e-3)
    return total


def _planar_return(planar, rho, eps, k, rtol, atol, max_steps=2_000_000):
    """Radius after one full turn of the planar flow started at (rho, 0).

    Ray crossings are located by bisection on the step size to RAY_TOL in
    the angle, then the integration restarts with the next sector's field
    from the crossing point.  Each crossing must satisfy the transversality
    product condition; a sign disagreement aborts instead of sliding.
    """
    alphas = planar.partition.alphas
    n = planar.partition.n
    cap = TIME_CAP_FACTOR * _period_estimate(planar, rho)
    sector = 1

    def make_rhs(idx):
        sec = planar.sectors[idx - 1]
        return lambda t, y: list(sec.velocity(y[0], y[1], eps, k))

    f = make_rhs(sector)
    t = 0.0
    y = [float(rho), 0.0]
    k1 = f(t, y)
    theta = 0.0
    h = cap / (TIME_CAP_FACTOR * 400.0)
    nsteps = 0
    while True:
        nsteps += 1
        if nsteps > max_steps:
            raise StiffIntegrationError(
                f"planar step budget exhausted at t={t!r}")
        if t > cap:
            raise NoReturnError(
                f"no return to the section within {cap!r} time units "
                f"(rho={rho!r}, eps={eps!r})")
        if h < 16.0 * 2.220446049250313e-16 * max(1.0, abs(t)):
            raise StiffIntegrationError(
                f"planar step underflow at t={t!r}")
        ynew, err, k7 = rk._fixed_step(f, t, y, k1, h)
        acc = 0.0
        for i in range(2):
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            q = err[i] / sc
            acc += q * q
        norm = math.sqrt(acc / 2.0)
        if norm > 1.0:
            h *= max(0.2, 0.9 * norm ** -0.2)
            continue
        target = alphas[sector]
        dth = _angle_increment(y[0], y[1], ynew[0], ynew[1])
        if theta + dth >= target - RAY_TOL:
            # land on the ray: bisect the step size
            lo, hi = 0.0, h
            yhit = ynew
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                ymid, _, _ = rk._fixed_step(f, t, y, k1, mid)
                dmid = _angle_increment(y[0], y[1], ymid[0], ymid[1])
                if theta + dmid >= target:
                    hi, yhit = mid, ymid
                else:
                    lo = mid
                dhit = _angle_increment(y[0], y[1], yhit[0], yhit[1])
                if abs(theta + dhit - target) <= RAY_TOL:
                    break
            t += hi
            y = yhit
            theta = target
            nxt = sector + 1 if sector < n else 1
            w_out = _angular_velocity(planar.sectors[sector - 1],
                                      y[0], y[1], eps, k)
            w_in = _angular_velocity(planar.sectors[nxt - 1],
                                     y[0], y[1], eps, k)
            if w_out * w_in <= 0.0:
                raise CrossingViolationError(
                    f"crossing violated at theta={target!r}, point="
                    f"({y[0]!r}, {y[1]!r}): angular velocities "
                    f"{w_out!r} / {w_in!r}")
            if sector == n:
                return math.hypot(y[0], y[1]), nsteps
            sector = nxt
            f = make_rhs(sector)
            k1 = f(t, y)
        else:
            t += h
            y = ynew
            k1 = k7
            theta += dth
            h *= min(5.0, max(0.2, 0.9 * norm ** -0.2)) if norm > 0.0 else 5.0


def displacement(system, rho, eps, mode="standard", rtol=1e-10, atol=1e-12,
                 kernel=None):
    """Displacement d = r(2*pi, rho, eps) - rho of the perturbed system.

    ``standard`` integrates the truncated standard form in the angle;
    ``planar`` integrates the full planar parent field in time with event
    detection on the rays (and therefore carries no truncation error).
    """
    system.check_rho(rho)
    if mode == "standard":
        d, nsteps = _standard_displacement(system, rho, eps, rtol, atol,
                                           kernel)
    elif mode == "planar":
        if system.planar is None:
            raise ConfigError("system has no planar parent field; "
                              "planar mode unavailable")
        r_end, nsteps = _planar_return(system.planar, rho, eps,
                                       system.planar.k, rtol, atol)
        d = r_end - rho
    else:
        raise ConfigError(f"unknown displacement mode {mode!r}")
    return DisplacementSample(rho=float(rho), eps=float(eps), d=d,
                              mode=mode, nsteps=nsteps)


def remainder_slope(system, rho, k, eps_ladder, mode="planar",
                    rtol=1e-13, atol=1e-14, cascade_rtol=1e-12,
                    cascade_atol=1e-13, floor=1e-12, kernel=None):
    """Log-log slope of |d(rho, eps) - sum_{i<=k} eps^i f_i(rho)| vs eps.

    Ladder points whose remainder sits below ``floor`` are dropped; if
    fewer than two points remain the remainder is unmeasurable and the
    slope is reported as +inf (floored pass).
    """
    eps_ladder = sorted(float(e) for e in eps_ladder)
    if len(eps_ladder) < 2:
        raise ValueError("need at least two eps values")
    fs = [averaged(system, i, rho, rtol=cascade_rtol, atol=cascade_atol,
                   kernel=kernel) for i in range(1, k + 1)]
    rem = []
    for eps in eps_ladder:
        d = displacement(system, rho, eps, mode=mode, rtol=rtol, atol=atol,
                         kernel=kernel).d
        pred = sum(fs[i] * eps ** (i + 1) for i in range(k))
        rem.append((eps, d - pred))
    used = [(e, abs(r)) for e, r in rem if abs(r) >= floor]
    if len(used) < 2:
        return RemainderSlope(rho=rho, k=k, slope=math.inf,
                              samples=tuple(rem),
                              used=tuple(e for e, _ in used),
                              floor=floor, floored=True)
    xs = np.log([e for e, _ in used])
    ys = np.log([r for _, r in used])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return RemainderSlope(rho=rho, k=k, slope=slope, samples=tuple(rem),
                          used=tuple(e for e, _ in used), floor=floor,
                          floored=False)


def verify_cycle(system, candidate, eps, mode="planar", tol=1e-10,
                 max_iter=50, rtol=1e-12, atol=1e-13, kernel=None):
    """Refine a predicted radius into a fixed point of the return map.

    Newton-style iteration with the derivative taken by secant from the
    last two displacement evaluations; the first step uses the candidate's
    eps * f_l' slope.  Raises NoCycleFoundError after ``max_iter``
    displacement evaluations without convergence (eps too large or a
    spurious candidate).
    """
    lo, hi = system.domain
    margin = 1e-9 * (hi - lo)

    def clamp(r):
        return min(max(r, lo + margin), hi - margin)

    def d_at(r):
        return displacement(system, r, eps, mode=mode, rtol=rtol,
                            atol=atol, kernel=kernel).d

    rho_star = float(candidate.rho_star)
    r0 = clamp(rho_star)
    d0 = d_at(r0)
    evals = 1
    if abs(d0) <= tol:
        return VerifiedCycle(eps=float(eps), rho_eps=r0, rho_star=rho_star,
                             drift=abs(r0 - rho_star), residual=abs(d0),
                             iterations=evals, mode=mode)
    slope = eps * candidate.deriv if candidate.deriv else 0.0
    if slope != 0.0:
        r1 = clamp(r0 - d0 / slope)
        if r1 == r0:
            r1 = clamp(r0 + 1e-4 * max(1.0, abs(r0)))
    else:
        r1 = clamp(r0 + 1e-4 * max(1.0, abs(r0)))
    while evals < max_iter:
        d1 = d_at(r1)
        evals += 1
        if abs(d1) <= tol:
            return VerifiedCycle(eps=float(eps), rho_eps=r1,
                                 rho_star=rho_star,
                                 drift=abs(r1 - rho_star),
                                 residual=abs(d1), iterations=evals,
                                 mode=mode)
        denom = d1 - d0
        if denom == 0.0:
            break
        r2 = clamp(r1 - d1 * (r1 - r0) / denom)
        r0, d0, r1 = r1, d1, r2
    raise NoCycleFoundError(
        f"no cycle found at eps={eps!r} near rho={candidate.rho_star!r} "
        f"after {evals} displacement evaluations")


def cross_check_modes(system, rho, eps, rtol=1e-12, atol=1e-13,
                      kernel=None):
    """|d_standard - d_planar| at one (rho, eps) sample."""
    d_std = displacement(system, rho, eps, mode="standard", rtol=rtol,
                         atol=atol, kernel=kernel).d
    d_pl = displacement(system, rho, eps, mode="planar", rtol=rtol,
                        atol=atol, kernel=kernel).d
    return abs(d_std - d_pl)


def write_displacement_csv(samples, path):
    """Emit displacement samples as CSV (rho, eps, d, iters, mode)."""
    rows = [(s.rho, s.eps, s.d, s.nsteps, s.mode) for s in samples]
    write_rows(path, ["rho", "eps", "d", "iters", "mode"], rows)

"""Data model for piecewise standard-form systems and their planar parents.

A planar piecewise field assigns each angular sector between consecutive
rays a smooth vector field given as a series in the perturbation size.
``polar_standard_form`` turns it into the scalar periodic equation

    dr/dtheta = sum_i eps^i F_i^j(theta, r) + O(eps^(k+1)),

one evaluator per sector.  Sector evaluators expose Taylor tables
F_hat[i][L] = (1/L!) d^L F_i / dr^L, which is everything the averaging
cascade needs.
"""

import math
from bisect import bisect_left
from dataclasses import dataclass, field

from . import backend, series
from .errors import DomainError, PolarTransversalityError
from .fields import (RationalSectorDescriptor, descriptor_from_planar_polys,
                     descriptor_from_rational_planar, xy_eval)

__all__ = ["TWO_PI", "SectorPartition", "sector_of", "RationalSectorField",
           "PolarJetSectorField", "CallableSectorField", "PlanarSector",
           "PlanarPiecewiseField", "PiecewiseStandardSystem",
           "polar_standard_form", "validate_h1", "H1Report"]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SectorPartition:
    """Angles 0 = alpha_0 < alpha_1 < ... < alpha_n = 2*pi."""

    alphas: tuple

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) < 2:
            raise ValueError("a partition needs at least alpha_0 and alpha_n")
        if alphas[0] != 0.0:
            raise ValueError("alpha_0 must be 0")
        if abs(alphas[-1] - TWO_PI) > 1e-12:
            raise ValueError("alpha_n must be 2*pi")
        alphas = alphas[:-1] + (TWO_PI,)
        for lo, hi in zip(alphas, alphas[1:]):
            if not lo < hi:
                raise ValueError("angles must be strictly increasing")
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self):
        return len(self.alphas) - 1

    def sector_of(self, theta):
        """Sector index j (1-based) with alpha_{j-1} <= theta <= alpha_j.

        Interior boundary angles belong to the sector they close, so the
        dispatch is deterministic; the choice is measure-zero for all
        integrals.
        """
        if not 0.0 <= theta <= TWO_PI:
            raise DomainError(f"theta={theta!r} outside [0, 2*pi]")
        if theta == 0.0:
            return 1
        return bisect_left(self.alphas, theta)


def sector_of(partition, theta):
    return partition.sector_of(theta)


def quadrant_partition():
    """The four-quadrant partition used by the built-in 4-zone examples."""
    return SectorPartition((0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi,
                            TWO_PI))


def uniform_partition(n):
    return SectorPartition(tuple(TWO_PI * j / n for j in range(n + 1)))


# -- sector evaluators -----------------------------------------------------

class RationalSectorField:
    """Sector evaluator backed by a polynomial descriptor; the hot path.

    Handles are prepared per kernel and cached, so repeated evaluation and
    the compiled sector integrators pay no marshaling cost.
    """

    def __init__(self, descriptor):
        self.descriptor = descriptor
        self._handles = {}

    def handle(self, kernel):
        h = self._handles.get(kernel.NAME)
        if h is None:
            h = kernel.prepare(self.descriptor)
            self._handles[kernel.NAME] = h
        return h

    def table(self, theta, r, eps_order, r_order, kernel=None):
        kernel = kernel or backend.default_kernel()
        return kernel.field_table(self.handle(kernel), theta, r,
                                  eps_order, r_order)


def _lift(v, kr):
    if isinstance(v, series.Jet):
        return v
    return series.jet_const(float(v), kr)


class PolarJetSectorField:
    """Polar standard form of a general (callable) planar sector.

    Evaluates dr/dtheta = (cos*vx + sin*vy) * r / (cos*vy - sin*vx) in
    nested jets, the generic fallback when no polynomial form is known.
    """

    def __init__(self, planar_sector):
        self.planar_sector = planar_sector

    def table(self, theta, r, eps_order, r_order, kernel=None):
        kr = r_order
        c, s = math.cos(theta), math.sin(theta)
        iv = series.jet_var(r, kr) if kr >= 1 else series.Jet((r,))
        x = iv * c
        y = iv * s
        nums, dens = [], []
        for i in range(eps_order + 1):
            vx, vy = self.planar_sector.velocity_order(x, y, i)
            vx, vy = _lift(vx, kr), _lift(vy, kr)
            nums.append((vx * c + vy * s) * iv)
            dens.append(vy * c - vx * s)
        den = series.Jet(dens)
        if abs(den.coeffs[0].coeffs[0]) < 1e-13:
            raise PolarTransversalityError(theta, r)
        f = series.Jet(nums) / den
        return [list(f.coeffs[i].coeffs) for i in range(eps_order + 1)]


class CallableSectorField:
    """Standard-form sector given directly as callables F_i(theta, r).

    Each callable must accept the radial argument as a jet (generic
    arithmetic); orders beyond the supplied list are zero, i.e. the field
    is truncated by definition.
    """

    def __init__(self, fs):
        self.fs = tuple(fs)

    def table(self, theta, r, eps_order, r_order, kernel=None):
        kr = r_order
        iv = series.jet_var(r, kr) if kr >= 1 else series.Jet((r,))
        rows = []
        for i in range(eps_order + 1):
            fn = self.fs[i] if i < len(self.fs) else None
            if fn is None:
                rows.append([0.0] * (kr + 1))
            else:
                rows.append(list(_lift(fn(theta, iv), kr).coeffs))
        return rows


# -- planar fields ---------------------------------------------------------

class PlanarSector:
    """One sector of a planar piecewise field, as a perturbation series.

    Either polynomial/rational components (dicts mapping (deg_x, deg_y) to
    coefficients, with optional per-order polynomial denominators) or
    arbitrary callables (x, y) -> (vx, vy) working on jets as well as
    floats.
    """

    def __init__(self, kind, nx=None, ny=None, dens=None, fns=None):
        self.kind = kind
        self.nx = nx
        self.ny = ny
        self.dens = dens
        self.fns = fns

    @classmethod
    def from_polys(cls, nx, ny, dens=None):
        nx = [dict(p) for p in nx]
        ny = [dict(p) for p in ny]
        if dens is not None:
            dens = [dict(d) if d else None for d in dens]
        return cls("poly", nx=nx, ny=ny, dens=dens)

    @classmethod
    def from_callables(cls, fns):
        return cls("call", fns=tuple(fns))

    @property
    def orders(self):
        if self.kind == "poly":
            return max(len(self.nx), len(self.ny))
        return len(self.fns)

    def velocity_order(self, x, y, i):
        """The eps^i component of (dx/dt, dy/dt); generic over the ring."""
        if self.kind == "poly":
            vx = xy_eval(self.nx[i], x, y) if i < len(self.nx) else 0.0
            vy = xy_eval(self.ny[i], x, y) if i < len(self.ny) else 0.0
            if self.dens is not None and i < len(self.dens) and self.dens[i]:
                d = xy_eval(self.dens[i], x, y)
                vx = vx / d
                vy = vy / d
            return vx, vy
        if i < len(self.fns) and self.fns[i] is not None:
            return self.fns[i](x, y)
        return 0.0, 0.0

    def velocity(self, x, y, eps, k):
        """Float velocity sum_{i<=k} eps^i (vx_i, vy_i)."""
        vx = vy = 0.0
        epow = 1.0
        for i in range(k + 1):
            cx, cy = self.velocity_order(x, y, i)
            vx += epow * cx
            vy += epow * cy
            epow *= eps
        return vx, vy

    def standard_field(self):
        if self.kind == "poly":
            if self.dens is None or all(d is None for d in self.dens):
                desc = descriptor_from_planar_polys(self.nx, self.ny)
            else:
                desc = descriptor_from_rational_planar(self.nx, self.ny,
                                                       self.dens)
            return RationalSectorField(desc)
        return PolarJetSectorField(self)


@dataclass
class PlanarPiecewiseField:
    """Planar discontinuous piecewise field on ray sectors."""

    partition: SectorPartition
    sectors: tuple
    k: int

    def __post_init__(self):
        self.sectors = tuple(self.sectors)
        if len(self.sectors) != self.partition.n:
            raise ValueError("one sector field per partition sector")


@dataclass
class PiecewiseStandardSystem:
    """Periodic piecewise standard form with per-sector Taylor evaluators.

    ``k`` is the maximum averaging order the system is declared for;
    ``domain`` is the open radial interval of validity.
    """

    partition: SectorPartition
    sectors: tuple
    k: int
    domain: tuple
    planar: PlanarPiecewiseField = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.sectors = tuple(self.sectors)
        if len(self.sectors) != self.partition.n:
            raise ValueError("one sector evaluator per partition sector")
        lo, hi = self.domain
        if not (0.0 < lo < hi):
            raise ValueError("domain must satisfy 0 < rho_min < rho_max")
        self.domain = (float(lo), float(hi))

    def check_rho(self, rho):
        lo, hi = self.domain
        if not lo < rho < hi:
            raise DomainError(f"rho={rho!r} outside the open domain "
                              f"({lo}, {hi})")


def polar_standard_form(planar, domain, k=None):
    """Standard form of a planar piecewise field via the polar chart.

    Sectors with polynomial/rational components compile to descriptor-backed
    evaluators (fast path); callable sectors fall back to nested-jet
    evaluation.  The angular velocity is checked lazily, at evaluation
    points, and a vanishing value raises PolarTransversalityError.
    """
    sectors = tuple(sec.standard_field() for sec in planar.sectors)
    return PiecewiseStandardSystem(planar.partition, sectors,
                                   k if k is not None else planar.k,
                                   tuple(domain), planar=planar)


@dataclass
class H1Report:
    """Residuals |phi(2*pi, rho) - rho| of the unperturbed return map."""

    rhos: tuple
    residuals: tuple
    failures: dict
    tol: float

    @property
    def max_residual(self):
        finite = [r for r in self.residuals if not math.isnan(r)]
        return max(finite) if finite else math.nan

    @property
    def ok(self):
        return not self.failures and all(r <= self.tol
                                         for r in self.residuals)


def validate_h1(system, rho_samples, tol=1e-8, rtol=1e-10, atol=1e-12):
    """Check that unperturbed solutions return to the section on a rho grid.

    Integration blow-ups are recorded per sample rather than raised.
    """
    from . import averaging

    residuals, failures = [], {}
    rhos = tuple(float(r) for r in rho_samples)
    for rho in rhos:
        try:
            cas = averaging.integrate_cascade(system, rho, k=0,
                                              rtol=rtol, atol=atol)
            residuals.append(abs(cas.state[0] - rho))
        except Exception as exc:  # report, do not abort the sweep
            residuals.append(math.nan)
            failures[rho] = f"{type(exc).__name__}: {exc}"
    return H1Report(rhos, tuple(residuals), failures, tol)

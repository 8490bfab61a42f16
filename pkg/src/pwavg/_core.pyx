# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: sector-field Taylor tables and sector integration.

Same arithmetic as _kernel_py (nested truncated series via flat bivariate
buffers) and the same Dormand-Prince 5(4) pair with identical constants,
so the two backends agree to rounding.
"""

from libc.math cimport cos, sin, fabs, sqrt

from .errors import PolarTransversalityError, StiffIntegrationError

NAME = "c"

DEF MAXK = 8        # eps orders 0..7
DEF MAXD = 33       # r-polynomial coefficients 0..32
DEF MAXTRIG = 64
DEF MAXDIM = 9      # cascade state (phi, z_1..z_k), k <= 7 plus slack

cdef double MACH_EPS = 2.220446049250313e-16
cdef double TINY_DEN = 1e-13

# Dormand-Prince 5(4) tableau (identical literals to rk.py)
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef class CompiledDescriptor:
    cdef int[:, ::1] nidx
    cdef double[::1] nw
    cdef int[:, ::1] didx
    cdef double[::1] dw
    cdef int r_deg, trig_deg


def prepare(desc):
    """Compile a RationalSectorDescriptor into flat typed buffers."""
    if desc.eps_deg >= MAXK or desc.r_deg >= MAXD - 1 \
            or desc.trig_deg > MAXTRIG:
        raise ValueError("descriptor degrees exceed compiled kernel caps")
    cdef CompiledDescriptor cd = CompiledDescriptor()
    nidx, nw, didx, dw = desc.flats
    cd.nidx = nidx
    cd.nw = nw
    cd.didx = didx
    cd.dw = dw
    cd.r_deg = desc.r_deg
    cd.trig_deg = desc.trig_deg
    return cd


cdef int _table(CompiledDescriptor d, double theta, double r, int ke,
                int kr, double[MAXK][MAXD] F) except -1:
    """F[i][L] = (1/L!) d^L F_i / dr^L at (theta, r), i<=ke, L<=kr."""
    cdef double cpow[MAXTRIG + 1]
    cdef double spow[MAXTRIG + 1]
    cdef double A[MAXK][MAXD]
    cdef double B[MAXK][MAXD]
    cdef int i, m, p, q, L, t, n
    cdef int rdeg = d.r_deg
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef double acc, den0

    cpow[0] = 1.0
    spow[0] = 1.0
    for p in range(1, d.trig_deg + 1):
        cpow[p] = cpow[p - 1] * c
        spow[p] = spow[p - 1] * s
    for i in range(ke + 1):
        for m in range(rdeg + 1):
            A[i][m] = 0.0
            B[i][m] = 0.0
    n = d.nidx.shape[0]
    for t in range(n):
        i = d.nidx[t, 0]
        if i <= ke:
            A[i][d.nidx[t, 1]] += d.nw[t] * cpow[d.nidx[t, 2]] \
                * spow[d.nidx[t, 3]]
    n = d.didx.shape[0]
    for t in range(n):
        i = d.didx[t, 0]
        if i <= ke:
            B[i][d.didx[t, 1]] += d.dw[t] * cpow[d.didx[t, 2]] \
                * spow[d.didx[t, 3]]
    # Taylor shift r -> r + delta (in-place synthetic division)
    for i in range(ke + 1):
        for p in range(rdeg):
            for m in range(rdeg - 1, p - 1, -1):
                A[i][m] += r * A[i][m + 1]
                B[i][m] += r * B[i][m + 1]
    den0 = B[0][0]
    if fabs(den0) < TINY_DEN:
        raise PolarTransversalityError(theta, r)
    # truncated bivariate division F = A / B
    for i in range(ke + 1):
        for L in range(kr + 1):
            acc = A[i][L] if L <= rdeg else 0.0
            for p in range(i + 1):
                for q in range(L + 1):
                    if (p or q) and q <= rdeg:
                        acc -= B[p][q] * F[i - p][L - q]
            F[i][L] = acc / den0
    return 0


def field_table(CompiledDescriptor d, double theta, double r, int ke,
                int kr):
    if ke >= MAXK or kr >= MAXD:
        raise ValueError("orders exceed compiled kernel caps")
    cdef double F[MAXK][MAXD]
    _table(d, theta, r, ke, kr, F)
    return [[F[i][L] for L in range(kr + 1)] for i in range(ke + 1)]


cdef int _cascade_rhs(CompiledDescriptor d, double theta, double* y, int k,
                      int nt, int[::1] ti, int[::1] tl, int[::1] tL,
                      double[::1] tcoef, int[::1] texp, double[::1] fact,
                      double* dy) except -1:
    cdef double F[MAXK][MAXD]
    cdef int i, t, m, e, r
    cdef double term, zm
    _table(d, theta, y[0], k, k, F)
    dy[0] = F[0][0]
    for i in range(1, k + 1):
        dy[i] = F[i][0]
    for t in range(nt):
        i = ti[t]
        term = tcoef[t] * F[i - tl[t]][tL[t]]
        for m in range(1, tl[t] + 1):
            e = texp[t * k + m - 1]
            if e:
                zm = y[m]
                for r in range(e):
                    term *= zm
        dy[i] += term
    for i in range(1, k + 1):
        dy[i] *= fact[i]
    return 0


def advance_cascade(CompiledDescriptor d, terms, int k, double th0,
                    double th1, y, double rtol, double atol,
                    bint trace=False):
    """Integrate the cascade over one sector [th0, th1]; returns
    (state, accepted_steps, trace_points_or_None)."""
    if k + 1 > MAXDIM or k >= MAXK:
        raise ValueError("cascade order exceeds compiled kernel caps")
    ti_o, tl_o, tL_o, tcoef_o, texp_o, fact_o = terms.flat
    cdef int[::1] ti = ti_o
    cdef int[::1] tl = tl_o
    cdef int[::1] tL = tL_o
    cdef double[::1] tcoef = tcoef_o
    cdef int[::1] texp = texp_o
    cdef double[::1] fact = fact_o
    cdef int nt = ti.shape[0]
    cdef int dim = k + 1
    cdef double yv[MAXDIM]
    cdef double k1[MAXDIM]
    cdef double k2[MAXDIM]
    cdef double k3[MAXDIM]
    cdef double k4[MAXDIM]
    cdef double k5[MAXDIM]
    cdef double k6[MAXDIM]
    cdef double k7[MAXDIM]
    cdef double yt[MAXDIM]
    cdef double ynew[MAXDIM]
    cdef double err, sc, q, h, t, factor
    cdef int i
    cdef long nsteps = 0, naccept = 0
    cdef bint last
    points = [] if trace else None

    for i in range(dim):
        yv[i] = y[i]
    t = th0
    h = (th1 - th0) / 50.0
    _cascade_rhs(d, t, yv, k, nt, ti, tl, tL, tcoef, texp, fact, k1)
    while t < th1:
        nsteps += 1
        if nsteps > 1000000:
            raise StiffIntegrationError(
                f"step budget exhausted at theta={t!r}")
        if h > th1 - t:
            h = th1 - t
            last = True
        else:
            last = False
        if h < 16.0 * MACH_EPS * max(1.0, fabs(t)):
            raise StiffIntegrationError(
                f"step size underflow at theta={t!r}")
        for i in range(dim):
            yt[i] = yv[i] + h * (A21 * k1[i])
        _cascade_rhs(d, t + C2 * h, yt, k, nt, ti, tl, tL, tcoef, texp,
                     fact, k2)
        for i in range(dim):
            yt[i] = yv[i] + h * (A31 * k1[i] + A32 * k2[i])
        _cascade_rhs(d, t + C3 * h, yt, k, nt, ti, tl, tL, tcoef, texp,
                     fact, k3)
        for i in range(dim):
            yt[i] = yv[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _cascade_rhs(d, t + C4 * h, yt, k, nt, ti, tl, tL, tcoef, texp,
                     fact, k4)
        for i in range(dim):
            yt[i] = yv[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                 + A54 * k4[i])
        _cascade_rhs(d, t + C5 * h, yt, k, nt, ti, tl, tL, tcoef, texp,
                     fact, k5)
        for i in range(dim):
            yt[i] = yv[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                 + A64 * k4[i] + A65 * k5[i])
        _cascade_rhs(d, t + h, yt, k, nt, ti, tl, tL, tcoef, texp, fact,
                     k6)
        for i in range(dim):
            ynew[i] = yv[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                   + B5 * k5[i] + B6 * k6[i])
        _cascade_rhs(d, t + h, ynew, k, nt, ti, tl, tL, tcoef, texp, fact,
                     k7)
        err = 0.0
        for i in range(dim):
            sc = atol + rtol * max(fabs(yv[i]), fabs(ynew[i]))
            q = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                     + E6 * k6[i] + E7 * k7[i]) / sc
            err += q * q
        err = sqrt(err / dim)
        if err <= 1.0:
            if err == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * err ** -0.2
                if factor > 5.0:
                    factor = 5.0
                elif factor < 0.2:
                    factor = 0.2
            t = th1 if last else t + h
            for i in range(dim):
                yv[i] = ynew[i]
                k1[i] = k7[i]
            h *= factor
            naccept += 1
            if trace:
                points.append((t, tuple(yv[i] for i in range(dim))))
        else:
            factor = 0.9 * err ** -0.2
            if factor < 0.2:
                factor = 0.2
            h *= factor
    return [yv[i] for i in range(dim)], naccept, points


cdef int _radial_rhs(CompiledDescriptor d, double theta, double r, int k,
                     double* epow, double* out) except -1:
    cdef double F[MAXK][MAXD]
    cdef int i
    cdef double acc = 0.0
    _table(d, theta, r, k, 0, F)
    for i in range(k + 1):
        acc += epow[i] * F[i][0]
    out[0] = acc
    return 0


def advance_radial(CompiledDescriptor d, double eps, int kuse, double th0,
                   double th1, double r0, double rtol, double atol):
    """Integrate dr/dtheta = sum_i eps^i F_i over one sector; returns
    (r(th1), accepted_steps)."""
    if kuse >= MAXK:
        raise ValueError("eps order exceeds compiled kernel caps")
    cdef double epow[MAXK]
    cdef double k1, k2, k3, k4, k5, k6, k7, ynew, yt
    cdef double err, sc, h, t, factor, y
    cdef int i
    cdef long nsteps = 0, naccept = 0
    cdef bint last
    epow[0] = 1.0
    for i in range(1, kuse + 1):
        epow[i] = epow[i - 1] * eps
    y = r0
    t = th0
    h = (th1 - th0) / 50.0
    _radial_rhs(d, t, y, kuse, epow, &k1)
    while t < th1:
        nsteps += 1
        if nsteps > 1000000:
            raise StiffIntegrationError(
                f"step budget exhausted at theta={t!r}")
        if h > th1 - t:
            h = th1 - t
            last = True
        else:
            last = False
        if h < 16.0 * MACH_EPS * max(1.0, fabs(t)):
            raise StiffIntegrationError(
                f"step size underflow at theta={t!r}")
        yt = y + h * (A21 * k1)
        _radial_rhs(d, t + C2 * h, yt, kuse, epow, &k2)
        yt = y + h * (A31 * k1 + A32 * k2)
        _radial_rhs(d, t + C3 * h, yt, kuse, epow, &k3)
        yt = y + h * (A41 * k1 + A42 * k2 + A43 * k3)
        _radial_rhs(d, t + C4 * h, yt, kuse, epow, &k4)
        yt = y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)
        _radial_rhs(d, t + C5 * h, yt, kuse, epow, &k5)
        yt = y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)
        _radial_rhs(d, t + h, yt, kuse, epow, &k6)
        ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        _radial_rhs(d, t + h, ynew, kuse, epow, &k7)
        sc = atol + rtol * max(fabs(y), fabs(ynew))
        err = fabs(h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6
                        + E7 * k7)) / sc
        if err <= 1.0:
            if err == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * err ** -0.2
                if factor > 5.0:
                    factor = 5.0
                elif factor < 0.2:
                    factor = 0.2
            t = th1 if last else t + h
            y = ynew
            k1 = k7
            h *= factor
            naccept += 1
        else:
            factor = 0.9 * err ** -0.2
            if factor < 0.2:
                factor = 0.2
            h *= factor
    return y, naccept

"""Polynomial data behind the standard-form sector evaluators.

A sector field obtained from a polynomial (or rational) planar vector
field is a ratio of two polynomials in (eps, r) whose coefficients are
polynomials in (cos theta, sin theta):

    F(theta, r; eps) = sum_i eps^i num_i(r; theta) / sum_i eps^i den_i(r; theta)

with num_i = r (cos*P_i + sin*Q_i) and den_i = cos*Q_i - sin*P_i evaluated
at x = r cos theta, y = r sin theta.  A common polynomial denominator of
the planar components cancels in the ratio and never appears here.

Polynomials are kept as small dicts: XY polynomials map (deg_x, deg_y) to
a coefficient, trig polynomials map (pow_cos, pow_sin) to a coefficient.
"""

import numpy as np

__all__ = ["RationalSectorDescriptor", "xy_eval", "xy_mul", "xy_add",
           "xy_scale", "xy_to_rcs", "descriptor_from_planar_polys",
           "descriptor_from_rational_planar", "tp_eval"]

# Hard caps shared with the compiled kernel.
MAX_EPS_DEG = 7
MAX_R_DEG = 31
MAX_TRIG_DEG = 63


def xy_eval(p, x, y):
    """Evaluate an XY polynomial; works on floats and on jets."""
    acc = 0.0
    for (a, b), w in p.items():
        term = w
        if a:
            term = term * x ** a
        if b:
            term = term * y ** b
        acc = term + acc
    return acc


def xy_mul(p, q):
    out = {}
    for (a1, b1), w1 in p.items():
        for (a2, b2), w2 in q.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0.0) + w1 * w2
    return {k: w for k, w in out.items() if w != 0.0}


def xy_add(p, q):
    out = dict(p)
    for k, w in q.items():
        out[k] = out.get(k, 0.0) + w
    return {k: w for k, w in out.items() if w != 0.0}


def xy_scale(p, c):
    return {k: w * c for k, w in p.items() if w * c != 0.0}


def xy_to_rcs(p):
    """Substitute x = r cos, y = r sin: returns {r_power: trig dict}."""
    out = {}
    for (a, b), w in p.items():
        tp = out.setdefault(a + b, {})
        tp[(a, b)] = tp.get((a, b), 0.0) + w
    return out


def tp_eval(tp, cpow, spow):
    """Evaluate a trig dict given precomputed cos/sin power tables."""
    acc = 0.0
    for (ca, sa), w in tp.items():
        acc += w * cpow[ca] * spow[sa]
    return acc


def _tp_shift(tp, dc, ds):
    return {(ca + dc, sa + ds): w for (ca, sa), w in tp.items()}


def _rcs_add(a, b):
    out = {m: dict(tp) for m, tp in a.items()}
    for m, tp in b.items():
        dst = out.setdefault(m, {})
        for k, w in tp.items():
            dst[k] = dst.get(k, 0.0) + w
    return out


def _rcs_to_rows(rcs):
    """Dense tuple over r-powers of trig dicts (empty dict for gaps)."""
    if not rcs:
        return ((),)
    deg = max(rcs)
    rows = []
    for m in range(deg + 1):
        tp = rcs.get(m, {})
        rows.append(tuple((ca, sa, float(w)) for (ca, sa), w in
                          sorted(tp.items()) if w != 0.0))
    return tuple(rows)


class RationalSectorDescriptor:
    """Numerator and denominator of one sector field, per eps order.

    ``num[i][m]`` / ``den[i][m]`` are tuples of (pow_cos, pow_sin, weight)
    monomials: the coefficient of eps^i r^m.  Flattened integer/float
    arrays for the compiled kernel are built once on demand.
    """

    __slots__ = ("num", "den", "eps_deg", "r_deg", "trig_deg", "_flats")

    def __init__(self, num, den):
        self.num = tuple(num)
        self.den = tuple(den)
        self.eps_deg = max(len(self.num), len(self.den)) - 1
        self.r_deg = max(max((len(rows) for rows in self.num), default=1),
                         max((len(rows) for rows in self.den), default=1)) - 1
        tdeg = 0
        for part in (self.num, self.den):
            for rows in part:
                for row in rows:
                    for ca, sa, _w in row:
                        tdeg = max(tdeg, ca, sa)
        self.trig_deg = tdeg
        if self.eps_deg > MAX_EPS_DEG:
            raise ValueError(f"eps degree {self.eps_deg} exceeds "
                             f"{MAX_EPS_DEG}")
        if self.r_deg > MAX_R_DEG:
            raise ValueError(f"r degree {self.r_deg} exceeds {MAX_R_DEG}")
        if self.trig_deg > MAX_TRIG_DEG:
            raise ValueError(f"trig degree {self.trig_deg} exceeds "
                             f"{MAX_TRIG_DEG}")
        self._flats = None

    @property
    def flats(self):
        """(num_idx, num_w, den_idx, den_w) with idx columns (i, m, ca, sa)."""
        if self._flats is None:
            self._flats = (self._flatten(self.num) + self._flatten(self.den))
        return self._flats

    @staticmethod
    def _flatten(part):
        idx, w = [], []
        for i, rows in enumerate(part):
            for m, row in enumerate(rows):
                for ca, sa, weight in row:
                    idx.append((i, m, ca, sa))
                    w.append(weight)
        if not idx:
            idx = np.zeros((0, 4), dtype=np.int32)
        else:
            idx = np.array(idx, dtype=np.int32)
        return (np.ascontiguousarray(idx),
                np.asarray(w, dtype=np.float64))


def flat_rcs_mul(p, q):
    """Product of polynomials given as {(r_pow, pow_cos, pow_sin): w}."""
    out = {}
    for (m1, c1, s1), w1 in p.items():
        for (m2, c2, s2), w2 in q.items():
            key = (m1 + m2, c1 + c2, s1 + s2)
            out[key] = out.get(key, 0.0) + w1 * w2
    return {k: w for k, w in out.items() if w != 0.0}


def flat_rcs_add(p, q):
    out = dict(p)
    for k, w in q.items():
        out[k] = out.get(k, 0.0) + w
    return {k: w for k, w in out.items() if w != 0.0}


def rows_from_flat_rcs(p):
    """Dense row form of a {(r_pow, pow_cos, pow_sin): w} polynomial."""
    rcs = {}
    for (m, ca, sa), w in p.items():
        tp = rcs.setdefault(m, {})
        tp[(ca, sa)] = tp.get((ca, sa), 0.0) + w
    return _rcs_to_rows(rcs)


def descriptor_from_planar_polys(px, py):
    """Descriptor for the polar standard form of a polynomial planar sector.

    ``px[i]`` and ``py[i]`` are XY polynomial dicts of the eps^i component
    (dx/dt, dy/dt).  A common denominator of the two components cancels in
    dr/dtheta = r (cos*P + sin*Q) / (cos*Q - sin*P) and must not be passed
    here.
    """
    korder = max(len(px), len(py))
    num, den = [], []
    for i in range(korder):
        p = px[i] if i < len(px) else {}
        q = py[i] if i < len(py) else {}
        p_rcs = xy_to_rcs(p)
        q_rcs = xy_to_rcs(q)
        # cos*P + sin*Q, then one extra power of r
        rdot = _rcs_add({m: _tp_shift(tp, 1, 0) for m, tp in p_rcs.items()},
                        {m: _tp_shift(tp, 0, 1) for m, tp in q_rcs.items()})
        num_i = {m + 1: tp for m, tp in rdot.items()}
        # cos*Q - sin*P  (this is r * dtheta/dt)
        den_i = _rcs_add({m: _tp_shift(tp, 1, 0) for m, tp in q_rcs.items()},
                         {m: _tp_shift({k: -w for k, w in tp.items()}, 0, 1)
                         for m, tp in p_rcs.items()})
        num.append(_rcs_to_rows(num_i))
        den.append(_rcs_to_rows(den_i))
    return RationalSectorDescriptor(num, den)


def descriptor_from_rational_planar(nx, ny, dens):
    """Like descriptor_from_planar_polys for components nx[i]/dens[i],
    ny[i]/dens[i] with per-order polynomial denominators.

    The orders are brought over the product of the distinct denominators,
    which then cancels in the ratio.
    """
    korder = max(len(nx), len(ny), len(dens))
    distinct = []
    for d in dens:
        d = d or {(0, 0): 1.0}
        if d not in distinct:
            distinct.append(d)
    common = {(0, 0): 1.0}
    for d in distinct:
        common = xy_mul(common, d)
    px, py = [], []
    for i in range(korder):
        scale = {(0, 0): 1.0}
        di = dens[i] if i < len(dens) and dens[i] else {(0, 0): 1.0}
        for d in distinct:
            if d != di:
                scale = xy_mul(scale, d)
        px.append(xy_mul(nx[i] if i < len(nx) else {}, scale))
        py.append(xy_mul(ny[i] if i < len(ny) else {}, scale))
    return descriptor_from_planar_polys(px, py)

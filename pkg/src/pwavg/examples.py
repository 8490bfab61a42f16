"""Built-in example families: perturbed linear center (4 zones), perturbed
piecewise-constant center (4 zones), and perturbed quadratic isochronous
center (n zones), with their closed-form first-order references.

Parameter conventions
---------------------
linear-center-4z, constant-center-4z:
    a, b: nested lists of shape (k, 4); entry [i-1][j-1] is the order-i
    coefficient in sector j of the perturbation (a*x + b, 0).
quadratic-isochronous-nz:
    n and three length-n lists a, b, c; the order-1 perturbation in
    sector j is (a_j x^2 + b_j x + c_j, 0) applied to the isochronous
    center, after the Cauchy-like chart that straightens it.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import averaging
from .errors import ConfigError, DomainError
from .fields import (flat_rcs_add, flat_rcs_mul, rows_from_flat_rcs,
                     RationalSectorDescriptor)
from .model import (PiecewiseStandardSystem, PlanarPiecewiseField,
                    PlanarSector, RationalSectorField, TWO_PI,
                    polar_standard_form, quadrant_partition,
                    uniform_partition)

__all__ = ["EXAMPLE_IDS", "ExampleInstance", "build_example",
           "reference_f1", "reference_f2_linear_center",
           "log_basis_functions", "linear_center_family",
           "constant_center_family", "quadratic_params_for_target_zeros",
           "LINEAR_CENTER", "CONSTANT_CENTER", "QUADRATIC_ISOCHRONOUS"]

LINEAR_CENTER = "linear-center-4z"
CONSTANT_CENTER = "constant-center-4z"
QUADRATIC_ISOCHRONOUS = "quadratic-isochronous-nz"
EXAMPLE_IDS = (LINEAR_CENTER, CONSTANT_CENTER, QUADRATIC_ISOCHRONOUS)

DEFAULT_DOMAIN = {
    LINEAR_CENTER: (0.1, 3.0),
    CONSTANT_CENTER: (0.1, 3.0),
    QUADRATIC_ISOCHRONOUS: (0.05, 0.9),
}

# keep the logarithm arguments 1 - r sin(...) away from zero
QUADRATIC_R_MARGIN = 0.05


@dataclass
class ExampleInstance:
    id: str
    params: dict
    planar: PlanarPiecewiseField
    standard: PiecewiseStandardSystem


def _coerce_ab(params, key):
    arr = params.get(key)
    if arr is None:
        raise ConfigError(f"missing parameter array {key!r}")
    rows = [list(map(float, row)) for row in arr]
    if not rows or any(len(row) != 4 for row in rows):
        raise ConfigError(f"{key!r} must be a (k x 4) array")
    return rows


def _linear_center_planar(a, b):
    k = len(a)
    sectors = []
    for j in range(4):
        nx = [{(0, 1): -1.0}]
        ny = [{(1, 0): 1.0}]
        for i in range(k):
            nx.append({(1, 0): a[i][j], (0, 0): b[i][j]})
            ny.append({})
        sectors.append(PlanarSector.from_polys(nx, ny))
    return PlanarPiecewiseField(quadrant_partition(), sectors, k)


_CONSTANT_CENTER_V0 = ((-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (1.0, 1.0))


def _constant_center_planar(a, b, partition=None):
    k = len(a)
    partition = partition or quadrant_partition()
    alphas = partition.alphas
    sectors = []
    for j in range(partition.n):
        vx, vy = _CONSTANT_CENTER_V0[j % 4]
        # the angular reparameterization divides by
        # g_hat_j = vy cos - vx sin; require it nonvanishing on the
        # closed sector, else the standard form is invalid
        grid = np.linspace(alphas[j], alphas[j + 1], 2001)
        ghat = vy * np.cos(grid) - vx * np.sin(grid)
        if np.min(np.abs(ghat)) < 1e-6:
            raise ConfigError(
                f"constant-center build: angular velocity factor vanishes "
                f"inside sector {j + 1}; partition incompatible with the "
                f"polar reparameterization")
        nx = [{(0, 0): vx}]
        ny = [{(0, 0): vy}]
        for i in range(k):
            nx.append({(1, 0): a[i][j], (0, 0): b[i][j]})
            ny.append({})
        sectors.append(PlanarSector.from_polys(nx, ny))
    return PlanarPiecewiseField(partition, sectors, k)


def _quadratic_planar(n, a, b, c):
    # chart coordinates (u, v): unperturbed center is rigid rotation,
    # order-1 perturbation is rational with denominator v - 1
    sectors = []
    den1 = {(0, 1): 1.0, (0, 0): -1.0}
    for j in range(n):
        nx0 = {(0, 1): -1.0}
        ny0 = {(1, 0): 1.0}
        nx1 = {(1, 1): b[j], (1, 0): -b[j], (2, 0): -a[j],
               (0, 2): -c[j], (0, 1): 2.0 * c[j], (0, 0): -c[j]}
        ny1 = {}
        sectors.append(PlanarSector.from_polys(
            [nx0, nx1], [ny0, ny1], dens=[None, den1]))
    return PlanarPiecewiseField(uniform_partition(n), sectors, 1)


def _quadratic_direct_standard(n, a, b, c, domain):
    """Standard form straight from the displayed per-sector field

        F_j = cos(t) (c_j + r (-c_j sin(t) + cos(t) (b_j + a_j r cos(t)
              / (1 - r sin(t)))))

    cleared over the denominator 1 - r sin(t)."""
    den = {(0, 0, 0): 1.0, (1, 0, 1): -1.0}
    sectors = []
    for j in range(n):
        inner = {(0, 1, 0): c[j], (1, 1, 1): -c[j], (1, 2, 0): b[j]}
        num1 = flat_rcs_add(flat_rcs_mul(inner, den), {(2, 3, 0): a[j]})
        desc = RationalSectorDescriptor(
            num=(rows_from_flat_rcs({}), rows_from_flat_rcs(num1)),
            den=(rows_from_flat_rcs(den),))
        sectors.append(RationalSectorField(desc))
    return PiecewiseStandardSystem(uniform_partition(n), tuple(sectors), 1,
                                   domain)


def build_example(example_id, params, domain=None):
    """Planar field and standard form of one built-in instance.

    The 4-zone families go through the polar transformer; the quadratic
    family ships its displayed standard form directly (the planar parent in
    chart coordinates is attached for the oracle)."""
    if example_id in (LINEAR_CENTER, CONSTANT_CENTER):
        a = _coerce_ab(params, "a")
        b = _coerce_ab(params, "b")
        if len(a) != len(b):
            raise ConfigError("parameter arrays a and b need equal depth k")
        if len(a) > 7:
            raise ConfigError("perturbation order k > 7 not supported")
        domain = tuple(domain or DEFAULT_DOMAIN[example_id])
        if example_id == LINEAR_CENTER:
            planar = _linear_center_planar(a, b)
        else:
            planar = _constant_center_planar(a, b)
        standard = polar_standard_form(planar, domain)
        standard.label = example_id
        return ExampleInstance(example_id, {"a": a, "b": b}, planar,
                               standard)
    if example_id == QUADRATIC_ISOCHRONOUS:
        n = int(params.get("n", 0))
        if n < 2:
            raise ConfigError("quadratic family needs n >= 2")
        a, b, c = (list(map(float, params.get(key, [])))
                   for key in ("a", "b", "c"))
        if not len(a) == len(b) == len(c) == n:
            raise ConfigError("a, b, c must each have length n")
        domain = tuple(domain or DEFAULT_DOMAIN[QUADRATIC_ISOCHRONOUS])
        if domain[1] >= 1.0 - QUADRATIC_R_MARGIN:
            raise ConfigError(
                f"quadratic family domain must stay below "
                f"{1.0 - QUADRATIC_R_MARGIN} (chart singularity at r=1)")
        planar = _quadratic_planar(n, a, b, c)
        standard = _quadratic_direct_standard(n, a, b, c, domain)
        standard.planar = planar
        standard.label = example_id
        return ExampleInstance(QUADRATIC_ISOCHRONOUS,
                               {"n": n, "a": a, "b": b, "c": c}, planar,
                               standard)
    raise ConfigError(f"unknown example id {example_id!r}; "
                      f"available: {', '.join(EXAMPLE_IDS)}")


# -- closed-form references -------------------------------------------------

def reference_f1(example_id, params, rho):
    """Closed-form first-order averaged value of a built-in instance."""
    if example_id == LINEAR_CENTER:
        a, b = params["a"], params["b"]
        return (0.25 * math.pi * rho * (a[0][0] + a[0][1] + a[0][2]
                                        + a[0][3])
                + b[0][0] - b[0][1] - b[0][2] + b[0][3])
    if example_id == CONSTANT_CENTER:
        # solving the order-1 sector equations in closed form gives
        # f_1 = (rho^2/2) sum_j a_1j + rho (b_11 - b_12 - b_13 + b_14)
        a, b = params["a"], params["b"]
        return (0.5 * rho * rho * (a[0][0] + a[0][1] + a[0][2] + a[0][3])
                + rho * (b[0][0] - b[0][1] - b[0][2] + b[0][3]))
    if example_id == QUADRATIC_ISOCHRONOUS:
        n = params["n"]
        a, b, c = params["a"], params["b"], params["c"]
        const = lin = logs = 0.0
        for j in range(1, n + 1):
            s1, s0 = math.sin(2 * j * math.pi / n), math.sin(
                2 * (j - 1) * math.pi / n)
            const += (a[j - 1] + c[j - 1]) * (s1 - s0)
            lin += 0.25 * ((4 * math.pi / n + math.sin(4 * j * math.pi / n)
                            - math.sin(4 * (j - 1) * math.pi / n))
                           * b[j - 1]
                           + (a[j - 1] - c[j - 1])
                           * (math.cos(4 * (j - 1) * math.pi / n)
                              - math.cos(4 * j * math.pi / n)))
        for j in range(2, n + 1):
            arg = 1.0 - rho * math.sin(2 * (j - 1) * math.pi / n)
            if arg <= 0.0:
                raise DomainError(
                    f"rho={rho!r} reaches the logarithmic singularity of "
                    f"sector ray {j - 1}")
            logs += (a[j - 1] - a[j - 2]) * math.log(arg)
        return const + lin * rho + (rho * rho - 1.0) / rho * logs
    raise ConfigError(f"unknown example id {example_id!r}")


def reference_f2_linear_center(params, rho):
    """Second-order reference for the linear-center family under the
    constraints a_11 = -(a_12+a_13+a_14), b_11 = b_12+b_13-b_14 that kill
    the first order.

    The published degree-2 polynomial carries an overall normalization of
    4*rho relative to z_2(2*pi, rho)/2!; dividing it out makes the value
    directly comparable to ``averaged(system, 2, rho)``.
    """
    a, b = params["a"], params["b"]
    a12, a13, a14 = a[0][1], a[0][2], a[0][3]
    b12, b13, b14 = b[0][1], b[0][2], b[0][3]
    if len(a) > 1:
        a2 = sum(a[1])
        b21, b22, b23, b24 = b[1]
    else:
        a2 = 0.0
        b21 = b22 = b23 = b24 = 0.0
    r2 = math.pi * a2 + 2.0 * (a12 + a13) * (a13 + a14)
    r1 = (math.pi * (a12 + a13) * (b13 - b14)
          - 4.0 * (a14 * b12 + (a12 + a14) * b13
                   + a13 * (b12 + 2.0 * b13 - b14) - a12 * b14
                   - b21 + b22 + b23 - b24))
    r0 = 4.0 * (b12 + b13) * (b13 - b14)
    return (r2 * rho * rho + r1 * rho + r0) / (4.0 * rho)


def log_basis_functions(n):
    """The family {1, r, (r^2-1)/r * ln(1 - r sin(2(j-1)pi/n))} whose
    span contains the quadratic family's first-order averaged function."""
    fns = [lambda r: 1.0, lambda r: r]
    labels = ["1", "r"]
    for j in range(2, n + 1):
        s = math.sin(2 * (j - 1) * math.pi / n)
        fns.append(lambda r, s=s: (r * r - 1.0) / r * math.log(1.0 - r * s))
        labels.append(f"h{j}")
    return fns, labels


# -- constrained parameter families for the rank analysis -------------------

def _pad4(v, i0, count=3):
    return list(v[i0:i0 + count])


def linear_center_family(l):
    """Family callable, base point and fit settings for the rank analysis
    of the linear-center example at order l (1 or 2).

    At order 2 the first-order block is constrained so f_1 vanishes
    identically; f_2 then has a simple pole at 0, so the fit clears one
    power of rho (exactly the published coefficient vector).
    """
    if l == 1:
        def family(v):
            params = {"a": [list(v[0:4])], "b": [list(v[4:8])]}
            inst = build_example(LINEAR_CENTER, params)
            return averaging.AveragedFunction(inst.standard, 1)
        v0 = [0.0] * 8
        return {"family": family, "v0": v0, "degree": 2, "pole": 0,
                "names": [f"a1{j}" for j in range(1, 5)]
                + [f"b1{j}" for j in range(1, 5)]}
    if l == 2:
        def family(v):
            a2 = list(v[0:4])
            b2 = list(v[4:8])
            a1f = list(v[8:11])
            b1f = list(v[11:14])
            a1 = [-(a1f[0] + a1f[1] + a1f[2])] + a1f
            b1 = [b1f[0] + b1f[1] - b1f[2]] + b1f
            params = {"a": [a1, a2], "b": [b1, b2]}
            inst = build_example(LINEAR_CENTER, params)
            return averaging.AveragedFunction(inst.standard, 2)
        v0 = [0.37, -0.24, 0.52, 0.11, 0.29, -0.41, 0.18, 0.33,
              0.61, -0.47, 0.23, 0.39, -0.28, 0.17]
        return {"family": family, "v0": v0, "degree": 2, "pole": 1,
                "names": [f"a2{j}" for j in range(1, 5)]
                + [f"b2{j}" for j in range(1, 5)]
                + ["a12", "a13", "a14", "b12", "b13", "b14"]}
    raise ValueError("rank families are provided for l = 1, 2 only")


def constant_center_family(l):
    """Rank-analysis family for the constant-center example at order l.

    The f_1 = 0 constraint surface has the same shape as for the linear
    center: sum_j a_1j = 0 and b_11 = b_12 + b_13 - b_14.  f_2 is a cubic
    polynomial with zero constant term, so the fit uses degree 3 without
    clearing a pole.
    """
    if l == 1:
        def family(v):
            params = {"a": [list(v[0:4])], "b": [list(v[4:8])]}
            inst = build_example(CONSTANT_CENTER, params)
            return averaging.AveragedFunction(inst.standard, 1)
        v0 = [0.0] * 8
        return {"family": family, "v0": v0, "degree": 2, "pole": 0,
                "names": [f"a1{j}" for j in range(1, 5)]
                + [f"b1{j}" for j in range(1, 5)]}
    if l == 2:
        def family(v):
            a2 = list(v[0:4])
            b2 = list(v[4:8])
            a1f = list(v[8:11])
            b1f = list(v[11:14])
            a1 = [-(a1f[0] + a1f[1] + a1f[2])] + a1f
            b1 = [b1f[0] + b1f[1] - b1f[2]] + b1f
            params = {"a": [a1, a2], "b": [b1, b2]}
            inst = build_example(CONSTANT_CENTER, params)
            return averaging.AveragedFunction(inst.standard, 2)
        v0 = [0.41, -0.19, 0.27, 0.35, -0.23, 0.44, 0.12, -0.31,
              0.53, -0.37, 0.21, 0.29, -0.43, 0.19]
        return {"family": family, "v0": v0, "degree": 3, "pole": 0,
                "names": [f"a2{j}" for j in range(1, 5)]
                + [f"b2{j}" for j in range(1, 5)]
                + ["a12", "a13", "a14", "b12", "b13", "b14"]}
    raise ValueError("rank families are provided for l = 1, 2 only")


def rank_family(example_id, l):
    if example_id == LINEAR_CENTER:
        return linear_center_family(l)
    if example_id == CONSTANT_CENTER:
        return constant_center_family(l)
    raise ConfigError(f"no rank family for example {example_id!r}")


def quadratic_params_for_target_zeros(n, zeros):
    """Quadratic-family parameters whose first-order averaged function has
    (at least) the requested zeros.

    Solves for a coefficient vector of {1, r, h_2..h_n} in the null space
    of the evaluation matrix at the target zeros, then inverts the linear
    parameter-to-coefficient map with a convenient pivot choice (a_1 = 0,
    c_j = 0 for j >= 2, b_j = 0 for j >= 2)."""
    zeros = [float(z) for z in zeros]
    if len(zeros) > n:
        raise ValueError("at most n zeros can be requested")
    fns, _ = log_basis_functions(n)
    mat = np.array([[fn(z) for fn in fns] for z in zeros])
    _, _, vt = np.linalg.svd(mat)
    beta = vt[-1]
    const_target, lin_target = beta[0], beta[1]
    gammas = beta[2:]
    a = [0.0] * n
    for j in range(2, n + 1):
        a[j - 1] = a[j - 2] + gammas[j - 2]
    dsin1 = math.sin(2 * math.pi / n)
    sum_a = sum(a[j - 1] * (math.sin(2 * j * math.pi / n)
                            - math.sin(2 * (j - 1) * math.pi / n))
                for j in range(1, n + 1))
    c = [0.0] * n
    c[0] = (const_target - sum_a) / dsin1
    lam1 = 0.25 * (4 * math.pi / n + math.sin(4 * math.pi / n))
    mu = [0.25 * (math.cos(4 * (j - 1) * math.pi / n)
                  - math.cos(4 * j * math.pi / n)) for j in range(1, n + 1)]
    fixed = sum(mu[j - 1] * (a[j - 1] - c[j - 1]) for j in range(1, n + 1))
    b = [0.0] * n
    b[0] = (lin_target - fixed) / lam1
    return {"n": n, "a": a, "b": b, "c": c}

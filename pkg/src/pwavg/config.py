"""System definition files and run configuration.

A definition file is JSON with a ``system`` object and an optional ``run``
object holding CLI flag defaults (flags always win).  Three system kinds:

builtin
    {"kind": "builtin", "id": "<example id>", "params": {...},
     "domain": [lo, hi]?}

planar
    {"kind": "planar", "alphas": [0, ..., 6.2831853...], "k": K,
     "domain": [lo, hi],
     "sectors": [{"components": [["expr_x", "expr_y"], ...K+1 orders]},
                 ...one per sector]}
    Component expressions use variables x, y (grammar: see pwavg.expr).
    Order 0 is the unperturbed field; the polar chart must be transversal
    (angular velocity nonvanishing), which is checked at evaluation time.

standard
    {"kind": "standard", "alphas": [...], "k": K, "domain": [lo, hi],
     "sectors": [{"f": ["expr order 1", ..."expr order K"]}, ...]}
    Sector expressions use variables r, theta and give F_1..F_K; an
    optional "f0" entry gives the unperturbed F_0 (default 0).

Rational expressions compile onto the fast descriptor path; everything
else falls back to jet-generic evaluators.
"""

import json
import math

from . import expr
from .errors import ConfigError
from .examples import build_example
from .fields import (RationalSectorDescriptor, flat_rcs_mul,
                     rows_from_flat_rcs, xy_mul)
from .model import (CallableSectorField, PlanarPiecewiseField, PlanarSector,
                    PiecewiseStandardSystem, RationalSectorField,
                    SectorPartition, polar_standard_form)

__all__ = ["load_config_file", "build_system", "resolve_system"]


def load_config_file(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}")
    if not isinstance(cfg, dict) or "system" not in cfg:
        raise ConfigError(f"config file {path!r} must contain a 'system' "
                          "object")
    return cfg


def _planar_sector_from_exprs(component_exprs, k):
    if len(component_exprs) != k + 1:
        raise ConfigError(f"each planar sector needs k+1 = {k + 1} "
                          "component pairs (order 0..k)")
    asts = []
    for pair in component_exprs:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError("each component order must be a pair "
                              "[expr_x, expr_y]")
        asts.append((expr.parse(str(pair[0]), {"x", "y"}),
                     expr.parse(str(pair[1]), {"x", "y"})))
    try:
        nx, ny, dens = [], [], []
        for ax, ay in asts:
            numx, denx = expr.lower_xy(ax)
            numy, deny = expr.lower_xy(ay)
            if denx is not None and deny is not None and denx != deny:
                # bring both components of this order over one denominator
                numx = xy_mul(numx, deny)
                numy = xy_mul(numy, denx)
                den = xy_mul(denx, deny)
            else:
                den = denx if denx is not None else deny
                if denx is None and deny is not None:
                    numx = xy_mul(numx, deny)
                if deny is None and denx is not None:
                    numy = xy_mul(numy, denx)
            nx.append(numx)
            ny.append(numy)
            dens.append(den)
        if all(d is None for d in dens):
            dens = None
        return PlanarSector.from_polys(nx, ny, dens=dens)
    except expr.NotLowerable:
        fns = [
            (lambda ax=ax, ay=ay: lambda x, y: (
                expr.evaluate(ax, {"x": x, "y": y}),
                expr.evaluate(ay, {"x": x, "y": y})))()
            for ax, ay in asts
        ]
        return PlanarSector.from_callables(fns)


def _standard_sector_from_exprs(sector_spec, k):
    f_exprs = sector_spec.get("f")
    if not isinstance(f_exprs, list) or len(f_exprs) != k:
        raise ConfigError(f"each standard sector needs a list 'f' of k={k} "
                          "expressions (orders 1..k)")
    f0_expr = sector_spec.get("f0", "0")
    texts = [str(f0_expr)] + [str(e) for e in f_exprs]
    asts = [expr.parse(t, {"r", "theta"}) for t in texts]
    try:
        nums, dens = [], []
        for ast in asts:
            num, den = expr.lower_standard(ast)
            nums.append(num)
            dens.append(den if den is not None else {(0, 0, 0): 1.0})
        distinct = []
        for d in dens:
            if d not in distinct:
                distinct.append(d)
        common = {(0, 0, 0): 1.0}
        for d in distinct:
            common = flat_rcs_mul(common, d)
        rows = []
        for num, d in zip(nums, dens):
            scale = {(0, 0, 0): 1.0}
            for other in distinct:
                if other != d:
                    scale = flat_rcs_mul(scale, other)
            rows.append(rows_from_flat_rcs(flat_rcs_mul(num, scale)))
        desc = RationalSectorDescriptor(
            num=tuple(rows), den=(rows_from_flat_rcs(common),))
        return RationalSectorField(desc)
    except expr.NotLowerable:
        fns = [
            (lambda ast=ast: lambda theta, r: expr.evaluate(
                ast, {"theta": theta, "r": r}))()
            for ast in asts
        ]
        return CallableSectorField(fns)


def build_system(spec):
    """PiecewiseStandardSystem from a validated 'system' object."""
    if not isinstance(spec, dict):
        raise ConfigError("'system' must be an object")
    kind = spec.get("kind", "builtin")
    if kind == "builtin":
        ident = spec.get("id")
        params = spec.get("params")
        if ident is None or params is None:
            raise ConfigError("builtin system needs 'id' and 'params'")
        inst = build_example(ident, params, domain=spec.get("domain"))
        return inst.standard
    try:
        alphas = tuple(float(a) for a in spec["alphas"])
        k = int(spec["k"])
        domain = tuple(float(v) for v in spec["domain"])
        sector_specs = spec["sectors"]
    except KeyError as exc:
        raise ConfigError(f"system spec missing key {exc}")
    if k < 1:
        raise ConfigError("k must be at least 1")
    try:
        partition = SectorPartition(alphas)
    except ValueError as exc:
        raise ConfigError(f"bad partition: {exc}")
    if len(sector_specs) != partition.n:
        raise ConfigError(f"expected {partition.n} sector entries, got "
                          f"{len(sector_specs)}")
    if kind == "planar":
        sectors = [
            _planar_sector_from_exprs(s.get("components"), k)
            for s in sector_specs
        ]
        planar = PlanarPiecewiseField(partition, tuple(sectors), k)
        return polar_standard_form(planar, domain)
    if kind == "standard":
        sectors = [_standard_sector_from_exprs(s, k) for s in sector_specs]
        return PiecewiseStandardSystem(partition, tuple(sectors), k, domain)
    raise ConfigError(f"unknown system kind {kind!r}")


def resolve_system(system_arg, params_json=None):
    """System plus run-flag defaults from a CLI --system argument.

    ``builtin:<id>`` requires --params; a path loads a JSON definition
    whose optional 'run' object supplies flag defaults.
    """
    if system_arg is None:
        raise ConfigError("--system is required")
    if system_arg.startswith("builtin:"):
        ident = system_arg[len("builtin:"):]
        if not params_json:
            raise ConfigError("builtin systems need --params")
        try:
            params = json.loads(params_json)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}")
        return build_system({"kind": "builtin", "id": ident,
                             "params": params}), {}
    cfg = load_config_file(system_arg)
    spec = dict(cfg["system"])
    if params_json:
        try:
            spec["params"] = json.loads(params_json)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}")
    run = cfg.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("'run' must be an object of flag defaults")
    return build_system(spec), run

"""``reslab`` batch driver.

    reslab <subcommand> --config <path> [--out <dir>] [--threads N] [--seed S]

Each run writes CSV tables, ``summary.json`` and ``run.log`` into the
output directory.  CSV and JSON depend only on the configuration and
seed; the thread count only changes how module calls are scheduled.

Exit codes: 0 all checks pass, 1 configuration error, 2 numerical
failure or failed check, 3 partial resonance search.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import birman, growthlab, mode, resonances, specfun
from .errors import DomainError, NumericalError, PreconditionError
from .fitting import ols, theil_sen
from .selftest import run_selftest

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3
KINDS = ("fm-growth", "count-resonances", "monotonicity", "boundary-check",
         "growth-lab", "selftest")


class ConfigError(ValueError):
    pass


# --- configuration ---------------------------------------------------------

COMMON = {"kind": None, "d": 2, "m": 1, "sign": 1, "potential": [[1.0, 1.0]],
          "grid_nodes": 64, "seed": 0}
DEFAULTS = {
    "fm-growth": {"sigmas": [10, 14, 20, 28, 40], "tail_tol": 1e-14,
                  "slope_window": [1.7, 2.3]},
    "count-resonances": {"r_max": 40.0, "tol": 1e-6, "window": [15.0, 40.0],
                         "slope_window": [1.5, 2.3], "min_count": 100},
    "monotonicity": {"pairs": 20, "sigma": 10.0, "signs": [1, -1], "slack": 1e-9,
                     "norm_tol": 1e-8},
    "boundary-check": {"t_values": [10.0, 20.0, 40.0], "fit_radius": 20.0,
                       "test_radii": [10.0, 15.0], "slope_tol": 0.1, "n_points": 9},
    "growth-lab": {"rhos": [0.5, 1.5, 2.5], "n_zeros": 2000, "xs": list(range(4, 65, 4)),
                   "quad_tol": 1e-9, "R": 10.0, "r": 3.0, "products": 10,
                   "product_radius": 6.0},
    "selftest": {},
}


def _num(cfg, key, cond, what):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or not cond(v):
        raise ConfigError(f"{key!r} must be {what}, got {v!r}")
    return v


def _int(cfg, key, cond, what):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, int) or not cond(v):
        raise ConfigError(f"{key!r} must be {what}, got {v!r}")
    return v


def _grid(cfg, key, positive=True):
    v = cfg[key]
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{key!r} must be a non-empty list")
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x) for x in v):
        raise ConfigError(f"{key!r} must contain finite numbers")
    if any(b <= a for a, b in zip(v, v[1:])):
        raise ConfigError(f"{key!r} must be strictly increasing")
    if positive and v[0] <= 0:
        raise ConfigError(f"{key!r} must be positive")
    return [float(x) for x in v]


def load_config(kind: str, text: str, seed=None) -> dict:
    """Parse and validate a JSON config; returns a normalized dict."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    if raw.get("kind", kind) != kind:
        raise ConfigError(f"config kind {raw['kind']!r} does not match subcommand {kind!r}")
    allowed = dict(COMMON, **DEFAULTS[kind])
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = dict(allowed, **raw)
    cfg["kind"] = kind
    if seed is not None:
        cfg["seed"] = seed
    _int(cfg, "seed", lambda s: s >= 0, "a nonnegative integer")
    _int(cfg, "d", lambda d: d >= 2 and d % 2 == 0, "an even integer >= 2")
    _int(cfg, "m", lambda m: True, "an integer")
    if kind in ("fm-growth", "count-resonances", "monotonicity", "boundary-check") and cfg["m"] == 0:
        raise ConfigError("m must be nonzero for growth experiments")
    if cfg["sign"] not in (1, -1) or isinstance(cfg["sign"], bool):
        raise ConfigError("sign must be 1 or -1")
    _int(cfg, "grid_nodes", lambda n: n >= 4, "an integer >= 4")
    pot = cfg["potential"]
    if not isinstance(pot, list) or not all(isinstance(s, list) and len(s) == 2 for s in pot):
        raise ConfigError("potential must be a list of [radius, height] pairs")
    try:
        cfg["_V"] = mode.RadialPotential(tuple((float(a), float(e)) for a, e in pot), cfg["sign"])
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad potential: {exc}") from None
    if kind != "selftest" and kind != "growth-lab" and cfg["_V"].is_zero:
        raise ConfigError("potential must have at least one step")
    _check_kind(kind, cfg)
    return cfg


def _check_kind(kind, cfg):
    pos = (lambda v: v > 0, "positive")
    if kind == "fm-growth":
        cfg["sigmas"] = _grid(cfg, "sigmas")
        _num(cfg, "tail_tol", *pos)
        _grid(cfg, "slope_window", positive=False)
    elif kind == "count-resonances":
        if len(cfg["_V"].steps) != 1:
            raise ConfigError("count-resonances needs a single-step potential")
        _num(cfg, "r_max", *pos)
        _num(cfg, "tol", *pos)
        w = _grid(cfg, "window")
        if len(w) != 2 or w[1] > cfg["r_max"]:
            raise ConfigError("window must be [r_lo, r_hi] with r_hi <= r_max")
        _grid(cfg, "slope_window", positive=False)
        _int(cfg, "min_count", lambda n: n >= 0, "a nonnegative integer")
    elif kind == "monotonicity":
        _int(cfg, "pairs", lambda n: n >= 1, "a positive integer")
        _num(cfg, "sigma", *pos)
        if not cfg["signs"] or any(s not in (1, -1) for s in cfg["signs"]):
            raise ConfigError("signs must be a non-empty list of 1/-1")
        _num(cfg, "slack", lambda v: v >= 0, "nonnegative")
        _num(cfg, "norm_tol", lambda v: v >= 0, "nonnegative")
    elif kind == "boundary-check":
        cfg["t_values"] = _grid(cfg, "t_values")
        cfg["test_radii"] = _grid(cfg, "test_radii")
        _num(cfg, "fit_radius", *pos)
        _num(cfg, "slope_tol", lambda v: True, "a number")
        _int(cfg, "n_points", lambda n: n >= 2, "an integer >= 2")
    elif kind == "growth-lab":
        rhos = _grid(cfg, "rhos")
        if any(r == int(r) for r in rhos):
            raise ConfigError("rhos must be non-integers")
        cfg["xs"] = _grid(cfg, "xs")
        _int(cfg, "n_zeros", lambda n: 1 <= n <= growthlab.MAX_FAMILY,
             f"an integer in [1, {growthlab.MAX_FAMILY}]")
        _num(cfg, "quad_tol", *pos)
        _num(cfg, "R", lambda v: v > 1, "> 1")
        _num(cfg, "r", lambda v: 1 < v < cfg["R"], "in (1, R)")
        _int(cfg, "products", lambda n: n >= 0, "a nonnegative integer")
        _num(cfg, "product_radius", lambda v: v > 1.5, "> 1.5")


# --- experiments ----------------------------------------------------------

def _slopes(x, y):
    lx, ly = np.log(x), np.log(y)
    return {"ols": ols(lx, ly)[0], "theil_sen": theil_sen(lx, ly)[0]}


def _in(v, window):
    return bool(window[0] <= v <= window[1])


def run_fm_growth(cfg, mapper):
    gs = birman.growth_series(cfg["m"], cfg["sigmas"], cfg["_V"], cfg["grid_nodes"],
                              cfg["d"], cfg["tail_tol"], mapper)
    rows = [(s, f, math.log(f) if f > 0 else math.nan, c)
            for s, f, c in zip(gs.sigma_values, gs.log_abs_F, gs.mode_cutoffs)]
    if any(f <= 0 for f in gs.log_abs_F):
        raise NumericalError("log|F| is not positive on the grid; log-log fit undefined")
    sl = _slopes(gs.sigma_values, gs.log_abs_F)
    tables = {"growth.csv": (("sigma", "log_abs_F", "log_log_abs_F", "mode_cutoff"), rows)}
    results = {"sigma": list(gs.sigma_values), "log_abs_F": list(gs.log_abs_F),
               "mode_cutoffs": list(gs.mode_cutoffs), "slope": sl}
    checks = {"slope_in_window": _in(sl["ols"], cfg["slope_window"])}
    return tables, results, checks, False


def run_count(cfg, mapper):
    (a, eps), = cfg["_V"].steps
    rs = resonances.counting_function(cfg["d"], cfg["m"], eps, a, cfg["sign"], cfg["r_max"],
                                      cfg["tol"], mapper)
    zrows = [(z.l, z.lambda0.real, z.lambda0.imag, abs(z.lambda0), z.multiplicity,
              rs.weight(z), z.residual) for z in rs.zeros]
    steps = rs.step_table()
    tables = {"zeros.csv": (("l", "re", "im", "abs", "multiplicity", "weight", "residual"), zrows),
              "counting.csv": (("r", "n"), steps)}
    n_hi = rs.count(cfg["r_max"])
    try:
        order = resonances.order_of_growth(rs, tuple(cfg["window"]))
    except PreconditionError as exc:
        order = math.nan
        rs.report.notes.append(str(exc))
    results = {
        "zeros": [{"l": z.l, "lambda0": [z.lambda0.real, z.lambda0.imag],
                   "multiplicity": z.multiplicity, "residual": z.residual} for z in rs.zeros],
        "step_table": [list(s) for s in steps],
        "count_at_r_max": n_hi, "order_slope": order, "partial": rs.partial,
        "mode_windings": {str(k): v for k, v in sorted(rs.mode_windings.items())},
        "truncation_windings": {str(k): v for k, v in sorted(rs.truncation_windings.items())},
        "unresolved": [list(b) for b in rs.report.unresolved],
        "notes": list(rs.report.notes),
    }
    checks = {
        "complete": not rs.partial,
        "slope_in_window": _in(order, cfg["slope_window"]) if math.isfinite(order) else False,
        "min_count": n_hi >= cfg["min_count"],
        "truncation_clean": all(w == 0 for w in rs.truncation_windings.values()),
    }
    return tables, results, checks, rs.partial


def run_monotonicity(cfg, mapper):
    rng = np.random.default_rng(cfg["seed"])
    pairs = [mode.random_nested_pair(rng) for _ in range(cfg["pairs"])]
    jobs = [(k, s) for k in range(len(pairs)) for s in cfg["signs"]]

    def job(item):
        k, s = item
        V1, V2 = pairs[k]
        sig = birman.admissible_sigma(V2, cfg["sigma"], s)
        f1, f2 = birman.monotonicity_pair(cfg["m"], sig, V1, V2, s, d=cfg["d"],
                                          n_nodes=cfg["grid_nodes"])
        nc = birman.norm_contraction(sig, V1, V2, s, d=cfg["d"], n_nodes=cfg["grid_nodes"])
        return k, s, sig, f1, f2, nc

    out = list(mapper(job, jobs))
    rows = [(k, s, sig, f1, f2, int(f1 <= f2 + cfg["slack"]), nc) for k, s, sig, f1, f2, nc in out]
    tables = {"monotonicity.csv": (("pair", "sign", "sigma", "log_abs_F1", "log_abs_F2",
                                    "monotone", "norm"), rows)}
    results = {"pairs": [{"V1": [list(t) for t in pairs[k][0].steps],
                          "V2": [list(t) for t in pairs[k][1].steps]} for k in range(len(pairs))],
               "violations": sum(1 for r in rows if not r[5]),
               "max_norm": max(r[6] for r in rows)}
    checks = {"monotone": results["violations"] == 0,
              "norm_contraction": results["max_norm"] <= 1.0 + cfg["norm_tol"]}
    return tables, results, checks, False


def run_boundary(cfg, mapper):
    V = cfg["_V"]
    grid = mode.grid_for(V, cfg["grid_nodes"])
    rep_t, rep_u = {}, {}
    trend = birman.boundary_logderiv_check(cfg["m"], V, grid, cfg["t_values"], cfg["d"],
                                           cfg["slope_tol"], rep_t)
    upper = birman.upper_bound_check(cfg["m"], V, grid, cfg["fit_radius"],
                                     tuple(cfg["test_radii"]), cfg["n_points"], cfg["d"], rep_u)
    rows = list(zip(rep_t["t"], rep_t["ratio"]))
    urows = [(r, v[0], v[1]) for r, v in sorted(rep_u["tests"].items())]
    tables = {"boundary.csv": (("t", "abs_logderiv_over_t_pow"), rows),
              "upper_bound.csv": (("radius", "max_log_abs_F", "bound"), urows)}
    results = {"trend": {"t": rep_t["t"], "ratio": rep_t["ratio"], "slope": rep_t["slope"],
                         "skipped": rep_t["skipped"]},
               "upper_bound": {"C": rep_u["C"], "fit_max": rep_u["fit_max"],
                               "tests": [list(r) for r in urows]}}
    checks = {"logderiv_trend": bool(trend), "upper_bound": bool(upper)}
    return tables, results, checks, False


def run_growth_lab(cfg, mapper):
    def ratio_job(rho):
        return growthlab.ratio_test(growthlab.builtin_family(rho, cfg["n_zeros"]), cfg["xs"],
                                    cfg["quad_tol"])

    reps = list(mapper(ratio_job, cfg["rhos"]))
    rows = [(r.rho, x, v) for r in reps for x, v in zip(r.xs, r.ratios)]
    cara = []
    for name, f, rho, C0 in growthlab.analytic_families():
        rep = growthlab.caratheodory_report(f, rho, C0, cfg["R"], cfg["r"])
        cara.append((name, rho, C0, rep.max_on_circle, rep.bound, int(rep.holds)))
    rng = np.random.default_rng(cfg["seed"])
    R = cfg["product_radius"]
    prods = []
    for k in range(cfg["products"]):
        f, expected, zs = growthlab.random_product(rng, R)
        whole = growthlab.halfplane_zero_count(f, R)
        split = (growthlab.halfplane_zero_count(f, R, theta_hi=0.5 * math.pi)
                 + growthlab.halfplane_zero_count(f, R, theta_lo=0.5 * math.pi))
        prods.append((k, expected, whole, split))
    tables = {"logderiv_ratio.csv": (("rho", "x", "ratio"), rows),
              "caratheodory.csv": (("family", "rho", "C0", "max_on_circle", "bound", "holds"), cara),
              "zero_count.csv": (("product", "expected", "counted", "counted_split"), prods)}
    results = {"ratio": [{"rho": r.rho, "spread": r.spread, "slope": r.slope, "passed": r.passed}
                         for r in reps],
               "caratheodory": [{"family": c[0], "holds": bool(c[5])} for c in cara],
               "zero_counts": [list(p) for p in prods]}
    checks = {"logderiv_ratio": all(r.passed for r in reps),
              "caratheodory": all(c[5] for c in cara),
              "zero_counts": all(p[1] == p[2] == p[3] for p in prods)}
    return tables, results, checks, False


def run_selftest_kind(cfg, mapper):
    res = run_selftest(cfg["seed"], mapper)
    rows = [(r.name, int(r.passed), r.value, r.detail) for r in res]
    tables = {"selftest.csv": (("check", "passed", "value", "detail"), rows)}
    results = {"checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in res]}
    checks = {r.name: r.passed for r in res}
    return tables, results, checks, False


RUNNERS = {"fm-growth": run_fm_growth, "count-resonances": run_count,
           "monotonicity": run_monotonicity, "boundary-check": run_boundary,
           "growth-lab": run_growth_lab, "selftest": run_selftest_kind}


# --- output ---------------------------------------------------------------

def _cell(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def write_csv(path, header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    return v


def run(kind: str, cfg: dict, out_dir: str, threads: int = 1, log=None):
    """Run one experiment and write its artifacts; returns the exit code."""
    os.makedirs(out_dir, exist_ok=True)
    lines = []

    def say(msg):
        lines.append(msg)
        if log is not None:
            print(msg, file=log)

    say(f"reslab {kind}: backend={specfun.BACKEND} threads={threads} seed={cfg['seed']}")
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    mapper = pool.map if pool is not None else map
    public = {k: v for k, v in cfg.items() if not k.startswith("_")}
    try:
        tables, results, checks, partial = RUNNERS[kind](cfg, mapper)
    except (NumericalError, PreconditionError, DomainError) as exc:
        say(f"numerical failure: {type(exc).__name__}: {exc}")
        summary = {"kind": kind, "config": public, "status": "numerical-failure",
                   "error": f"{type(exc).__name__}: {exc}"}
        code = EXIT_NUMERICAL
        tables = {}
    else:
        if partial:
            status, code = "partial", EXIT_PARTIAL
        elif all(checks.values()):
            status, code = "pass", EXIT_OK
        else:
            status, code = "fail", EXIT_NUMERICAL
        summary = {"kind": kind, "config": public, "status": status,
                   "checks": checks, "results": results}
        for name, (header, rows) in tables.items():
            write_csv(os.path.join(out_dir, name), header, rows)
            say(f"wrote {name} ({len(rows)} rows)")
        for name, ok in checks.items():
            say(f"check {name}: {'PASS' if ok else 'FAIL'}")
        say(f"status: {status}")
    finally:
        if pool is not None:
            pool.shutdown()
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(_jsonable(summary), indent=2, sort_keys=True, allow_nan=False) + "\n")
    with open(os.path.join(out_dir, "run.log"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="reslab", description="Resonance-growth experiments.")
    p.add_argument("kind", choices=KINDS, metavar="subcommand", help=" | ".join(KINDS))
    p.add_argument("--config", help="JSON configuration file (optional for selftest)")
    p.add_argument("--out", default="reslab_out", help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument("--seed", type=int, default=None, help="random seed (overrides config)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        if args.config is None:
            if args.kind != "selftest":
                raise ConfigError("--config is required")
            text = "{}"
        else:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        cfg = load_config(args.kind, text, args.seed)
    except ConfigError as exc:
        print(f"reslab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.kind, cfg, args.out, args.threads, log=sys.stdout)


if __name__ == "__main__":
    sys.exit(main())

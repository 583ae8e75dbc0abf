"""Fast invariant checks across all modules, for ``reslab selftest``.

Each check is small enough that the whole suite runs in well under a
minute; the heavy sweeps live in the acceptance tests.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import birman, fitting, growthlab, mode, resonances, specfun
from .logcover import LambdaPoint, base_displacement, project, rotate, sheet_of
from .winding import Box, PhaseTracker

__all__ = ["CheckResult", "CHECKS", "run_selftest"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    detail: str


def _logcover(rng):
    worst = 0.0
    for _ in range(50):
        p = LambdaPoint(float(rng.uniform(0.1, 10)), float(rng.uniform(-7, 7)))
        k = int(rng.integers(-4, 5))
        q = rotate(rotate(p, k), -k)
        worst = max(worst, abs(q.arg - p.arg))
        m, th = base_displacement(p)
        assert 0.0 <= th < math.pi and sheet_of(p).m == m
        assert abs(project(p) - cmath.rect(p.modulus, p.arg)) <= 1e-12 * p.modulus
    return worst < 1e-12, worst, "rotation round trip"


def _wronskian_y(rng):
    z = 2 + 1j
    w = specfun.bessel_j(3, z) * specfun.bessel_y_prime(3, z) \
        - specfun.bessel_j_prime(3, z) * specfun.bessel_y(3, z)
    res = abs(w - 2 / (math.pi * z)) / abs(2 / (math.pi * z))
    return res < 1e-10, res, "J Y' - J' Y = 2/(πz) at n=3, z=2+i"


def _continuation(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(0, 30))
        z = cmath.rect(float(rng.uniform(0.5, 30)), float(rng.uniform(0.05, math.pi - 0.05)))
        a = specfun.hankel1_on_cover(n, LambdaPoint.from_complex(z, 1))
        b = specfun.hankel1_half_turn(n, z)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return worst < 1e-12, worst, "monodromy vs half-turn form of H1"


def _backends(rng):
    kern = specfun.available_backends()
    if len(kern) < 2:
        return True, 0.0, "single backend; nothing to compare"
    z = rng.uniform(0.1, 40, 20) * np.exp(1j * rng.uniform(-2, 2, 20))
    outs = [k.jh_scaled_many(z.astype(complex), 40) for k in kern.values()]
    worst = max(float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
                for a, b in zip(outs[0][:2], outs[1][:2]))
    return worst < 1e-11, worst, "compiled vs pure kernels"


def _kernels(rng):
    md = mode.make_mode(2, 3)
    V = mode.chi(1.0, 1.0)
    grid = mode.gauss_grid(1.0, 12)
    lam = LambdaPoint(5.0, 0.7)
    K, _ = mode.kernel_matrices(md, V, grid, mode.bessel_table(lam, grid, 3))
    r, w = grid.nodes, grid.weights
    i, j = 2, 9
    ref = math.sqrt(w[i] * w[j] * r[i] * r[j]) * mode.green_kernel(md, r[i], r[j], lam)
    err = abs(K[i, j] - ref) / abs(ref)
    return err < 1e-11, err, "Nyström matrix vs pointwise Green's kernel"


def _two_path(rng):
    V = mode.chi(1.0, 1.0)
    grid = mode.grid_for(V, 64)
    a, cut = birman.log_abs_fm_on_axis(1, 5.0, V, grid)
    b = birman.log_fm_at(1, LambdaPoint.on_imaginary_axis(5.0), V, grid, cut).real
    err = abs(a - b) / abs(a)
    return err < 1e-10, err, "log|F| via B1 eigenvalues vs LU"


def _contraction(rng):
    ok, worst = birman.contraction_eigen_check(100, 8, int(rng.integers(2**31)), return_worst=True)
    return ok, worst, "eigenvalue moduli of A*BA vs B"


def _monotone(rng):
    V1, V2 = mode.random_nested_pair(rng)
    f1, f2 = birman.monotonicity_pair(1, 10.0, V1, V2, 1)
    nc = birman.norm_contraction(10.0, V1, V2, 1, l_values=range(6))
    return f1 <= f2 + 1e-9 and nc <= 1 + 1e-8, f2 - f1, "nested pair at σ=10"


def _winding(rng):
    f = growthlab.constructed_product([1 + 1j, 1 + 1j, -2 + 0.5j, 5 + 5j])
    w = PhaseTracker(f, 0.1).box_winding(Box(-3, 3, 0.1, 3))
    return w == 3, float(w), "argument principle on a cubic-in-box product"


def _matching(rng):
    md = mode.make_mode(2, 2)
    worst = 0.0
    for _ in range(10):
        z = complex(rng.uniform(-10, 10), rng.uniform(0.1, 5))
        a = resonances.matching_det(md, z, 1, 1.0, 1.0, 1)
        b = resonances.matching_det_reference(md, z, 1, 1.0, 1.0, 1)
        worst = max(worst, abs(a - b) / abs(b))
    return worst < 1e-10, worst, "compiled matching determinant vs reference"


def _mode_zeros(rng):
    md = mode.make_mode(2, 0)
    zs, w = resonances.find_mode_zeros(md, 1, 1.0, 1.0, 1, Box(-6, 6, 1e-3, 6))
    ok = sum(k for _, k in zs) == w and w > 0
    return ok, float(w), f"mode 0: winding {w}, {len(zs)} roots"


def _growthlab(rng):
    e1 = growthlab.canonical_factor(1, 0.5)
    v = growthlab.product_logderiv(growthlab.ZeroFamily(1.5, (1j,)), 1.0)
    c = growthlab.caratheodory_check(lambda z: np.asarray(z) ** 2, 2.5, 1.0, 10.0, 5.0)
    n = growthlab.halfplane_zero_count(growthlab.constructed_product([2j, 2j, 3 + 1j]), 5.0)
    err = max(abs(e1 - 0.5 * math.exp(0.5)), abs(v - 1j))
    return err < 1e-14 and c and n == 3, err, "E_1, reflected log-derivative, Ω_R bound, zero count"


def _fitting(rng):
    x = np.linspace(1, 5, 9)
    s, b = fitting.ols(x, 2.5 * x - 1)
    t, _ = fitting.theil_sen(x, 2.5 * x - 1)
    err = max(abs(s - 2.5), abs(b + 1), abs(t - 2.5))
    return err < 1e-12, err, "exact line"


CHECKS = [
    ("logcover.round_trip", _logcover),
    ("specfun.wronskian_y", _wronskian_y),
    ("specfun.continuation", _continuation),
    ("specfun.backends", _backends),
    ("mode.kernel_matrices", _kernels),
    ("birman.two_path", _two_path),
    ("birman.contraction", _contraction),
    ("birman.monotone_pair", _monotone),
    ("winding.box", _winding),
    ("resonances.matching_det", _matching),
    ("resonances.mode_zeros", _mode_zeros),
    ("growthlab.basics", _growthlab),
    ("fitting.exact_line", _fitting),
]


def run_selftest(seed: int = 0, mapper=map):
    """Run every check; each gets its own generator derived from ``seed``."""
    seeds = np.random.SeedSequence(seed).spawn(len(CHECKS))

    def one(item):
        (name, fn), ss = item
        try:
            ok, val, detail = fn(np.random.default_rng(ss))
        except Exception as exc:  # a crash is a failed check, reported by name
            return CheckResult(name, False, math.nan, f"{type(exc).__name__}: {exc}")
        return CheckResult(name, bool(ok), float(val), detail)

    return list(mapper(one, list(zip(CHECKS, seeds))))

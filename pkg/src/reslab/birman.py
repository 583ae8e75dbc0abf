"""Per-mode Birman-Schwinger operators and the sheet-crossing determinant.

For ``V = sign*|V|`` and ``λ`` in the closed physical sheet,

    F_{m,V}(λ) = Π_l det(I + sign*i*m (I + sign*K_ν)^{-1} T_ν)^{μ(l)},

with ``K_ν``, ``T_ν`` the Nyström matrices of ``mode.kernel_matrices``.  On
the positive imaginary axis both are real symmetric once the constant sign
``-(-1)^ν`` is taken out of ``T_ν``, and

    |F_{m,V}(iσ)| = Π_j sqrt(1 + m² λ_j(B₁)²),
    B₁ = A^{-1/2} T_sym A^{-1/2},  A = I + sign*K.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (DomainError, NotPositiveDefiniteError, NumericalError,
                     PreconditionError)
from .logcover import LambdaPoint, sheet_of, project
from .mode import (ModeSpec, QuadratureGrid, RadialPotential, bessel_table,
                   grid_for, kernel_matrices, make_mode, composite_grid)
from . import specfun

__all__ = [
    "ModeOperator", "GrowthSeries", "assemble_mode_operator", "b1_matrix",
    "b1_eigenvalues", "log_abs_fm_on_axis", "axis_profile", "fm_mode_factor",
    "log_fm_at", "fm_at", "monotonicity_check", "monotonicity_pair",
    "admissible_sigma", "contraction_eigen_check",
    "norm_contraction", "norm_contraction_check", "rayleigh_lower_bound",
    "b1_scaled_error", "logderiv_on_boundary", "boundary_logderiv_check",
    "upper_bound_check", "growth_series", "sign_minus_threshold",
    "NOISE_FLOOR", "PD_FLOOR",
]

NOISE_FLOOR = 1e-10   # B1 eigenvalues below this fraction of the largest are rounding noise
PD_FLOOR = 1e-12      # A must have min eigenvalue above this
SYM_TOL = 1e-10


def sign_minus_threshold(V: RadialPotential) -> float:
    """Smallest σ for which the attractive-sign statements are asserted."""
    return 2.0 * (V.sup_norm + 1.0)


def _is_imag_axis(lam: LambdaPoint) -> bool:
    return lam.arg == math.pi / 2


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Nyström matrices of one partial wave at one spectral point.

    When ``symmetrized`` (only at ``iσ``) ``K`` and ``T`` are real
    symmetric and the physical jump matrix is ``t_sign * T``.
    """

    mode: ModeSpec
    sigma_or_lambda: LambdaPoint
    K: np.ndarray = field(repr=False)
    T: np.ndarray = field(repr=False)
    symmetrized: bool
    t_sign: int = 1


def _rel_max(x, ref):
    scale = float(np.max(np.abs(ref))) if ref.size else 0.0
    return float(np.max(np.abs(x))) / scale if scale > 0 else 0.0


def assemble_mode_operator(mode: ModeSpec, lam: LambdaPoint, V: RadialPotential,
                           grid: QuadratureGrid, table=None) -> ModeOperator:
    if grid.a_max < V.support * (1 - 1e-14):
        raise DomainError("grid does not cover the support of V")
    if table is None or table.nu_max < mode.nu or table.lam != lam:
        table = bessel_table(lam, grid, mode.nu)
    K, T = kernel_matrices(mode, V, grid, table)
    if not _is_imag_axis(lam):
        return ModeOperator(mode, lam, K, T, False, 1)
    # J_ν(iσr) = i^ν I_ν(σr): T = -π(-1)^ν (I I^T), K = I K > 0
    t_sign = -1 if mode.nu % 2 == 0 else 1
    Ts = t_sign * T
    for name, M in (("K", K), ("T", Ts)):
        if _rel_max(M.imag, M) > SYM_TOL or _rel_max(M.real - M.real.T, M) > SYM_TOL:
            raise NumericalError(f"{name} failed the real-symmetry check at iσ")
    Kr = np.ascontiguousarray(0.5 * (K.real + K.real.T))
    Tr = np.ascontiguousarray(0.5 * (Ts.real + Ts.real.T))
    return ModeOperator(mode, lam, Kr, Tr, True, t_sign)


def _inv_sqrt_sym(A):
    w, U = specfun.jacobi_eigh(A)
    wmin = float(np.min(w))
    if wmin <= PD_FLOOR:
        raise NotPositiveDefiniteError(
            wmin, f"I ± K is not positive definite (min eigenvalue {wmin:.3e})")
    return (U * (1.0 / np.sqrt(w))) @ U.T, (U * np.sqrt(w)) @ U.T


def b1_matrix(op: ModeOperator, sign: int) -> np.ndarray:
    if not op.symmetrized:
        raise DomainError("B1 is defined on the positive imaginary axis only")
    n = op.K.shape[0]
    Aih, _ = _inv_sqrt_sym(np.eye(n) + sign * op.K)
    B = Aih @ op.T @ Aih
    return 0.5 * (B + B.T)


def b1_eigenvalues(op: ModeOperator, sign: int) -> list:
    """Eigenvalues of B₁ by decreasing modulus (no noise floor applied)."""
    if not np.any(op.T):
        return [0.0] * op.T.shape[0]
    w, _ = specfun.jacobi_eigh(b1_matrix(op, sign))
    order = sorted(range(w.size), key=lambda k: (-abs(w[k]), -w[k]))
    return [float(w[k]) for k in order]


def _mode_log_contribution(eigs, m):
    """``½ Σ log(1 + m² λ²)`` over eigenvalues above the noise floor."""
    if not eigs:
        return 0.0
    top = abs(eigs[0])
    if top == 0.0:
        return 0.0
    keep = [x for x in eigs if abs(x) > NOISE_FLOOR * top]
    return 0.5 * math.fsum(math.log1p((m * x) ** 2) for x in keep)


def _check_axis_preconditions(m, sigma, V, strict):
    if m == 0:
        raise DomainError("m must be nonzero")
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    if strict and V.sign == -1 and sigma < sign_minus_threshold(V):
        raise PreconditionError(
            f"sign -1 needs sigma >= {sign_minus_threshold(V):g}, got {sigma:g}")


def axis_profile(m: int, sigma: float, V: RadialPotential, grid: QuadratureGrid,
                 tail_tol: float = 1e-14, d: int = 2, strict: bool = True):
    """Per-mode contributions ``μ(l)·½Σ log(1+m²λ_j²)`` to ``log|F_m(iσ)|``."""
    _check_axis_preconditions(m, sigma, V, strict)
    if V.is_zero:
        return []
    lam = LambdaPoint.on_imaginary_axis(sigma)
    a = V.support
    l_min = int(math.floor(2.0 * a * sigma)) + 1   # must pass l > 2aσ
    nu_max = l_min + (d - 2) // 2 + 32
    table = bessel_table(lam, grid, nu_max)
    out = []
    l = 0
    while True:
        md = make_mode(d, l)
        if md.nu > table.nu_max:
            table = bessel_table(lam, grid, 2 * table.nu_max)
        op = assemble_mode_operator(md, lam, V, grid, table)
        c = md.multiplicity * _mode_log_contribution(b1_eigenvalues(op, V.sign), m)
        out.append(c)
        if l >= l_min and c < tail_tol:
            return out
        l += 1
        if l > 100000:
            raise NumericalError("mode series did not terminate")


def log_abs_fm_on_axis(m: int, sigma: float, V: RadialPotential, grid: QuadratureGrid,
                       tail_tol: float = 1e-14, d: int = 2, strict: bool = True):
    """``(log|F_m(iσ)|, cutoff)`` from B₁ eigenvalues; cutoff is the last ``l`` summed."""
    prof = axis_profile(m, sigma, V, grid, tail_tol, d, strict)
    if not prof:
        return 0.0, 0
    return math.fsum(prof), len(prof) - 1


# --- determinant on the closed physical sheet ----------------------------

def _check_closed_sheet(lam):
    s = sheet_of(lam)
    if not (0.0 - 1e-12 <= lam.arg <= math.pi * (1 + 1e-12)):
        raise DomainError("lam must lie on the closed physical sheet 0 <= arg <= π")
    return s


def _mode_logdet(md, V, grid, table, m):
    K, T = kernel_matrices(md, V, grid, table)
    n = K.shape[0]
    s = V.sign
    A = np.eye(n) + s * K
    try:
        X = np.linalg.solve(A, T)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("I ± K is singular at this point") from exc
    if not np.all(np.isfinite(X)):
        raise NumericalError("I ± K is singular at this point")
    sgn, logabs = np.linalg.slogdet(np.eye(n) + (s * 1j * m) * X)
    if sgn == 0:
        return complex(-math.inf, 0.0)
    return complex(logabs, math.atan2(sgn.imag, sgn.real))


def fm_mode_factor(mode: ModeSpec, m: int, lam: LambdaPoint, V: RadialPotential,
                   grid: QuadratureGrid) -> complex:
    """``det(I + sign*i*m (I + sign*K_ν)^{-1} T_ν)`` for one partial wave."""
    _check_closed_sheet(lam)
    table = bessel_table(lam, grid, mode.nu)
    return complex(np.exp(_mode_logdet(mode, V, grid, table, m)))


def log_fm_at(m: int, lam: LambdaPoint, V: RadialPotential, grid: QuadratureGrid,
              cutoff: int, d: int = 2) -> complex:
    """``log F_m(lam)`` (imaginary part is the unwrapped sum of mode phases)."""
    _check_closed_sheet(lam)
    if cutoff < 0:
        raise DomainError("cutoff must be >= 0")
    if V.is_zero:
        return 0j
    nu_top = cutoff + (d - 2) // 2
    table = bessel_table(lam, grid, nu_top)
    re, im = [], []
    for l in range(cutoff + 1):
        md = make_mode(d, l)
        ld = _mode_logdet(md, V, grid, table, m)
        re.append(md.multiplicity * ld.real)
        im.append(md.multiplicity * ld.imag)
    return complex(math.fsum(re), math.fsum(im))


def fm_at(m: int, lam: LambdaPoint, V: RadialPotential, grid: QuadratureGrid,
          cutoff: int, d: int = 2) -> complex:
    """``F_m(lam)`` by per-mode LU determinants (may overflow; see ``log_fm_at``)."""
    return complex(np.exp(log_fm_at(m, lam, V, grid, cutoff, d)))


# --- monotonicity and the contraction checks --------------------------------

def _pair_grid(V1, V2, n_nodes):
    pts = sorted(set(V1.breakpoints()) | set(V2.breakpoints()))
    if len(pts) <= 1:
        return grid_for(V2 if V2.steps else V1, n_nodes)
    lengths = np.diff(np.concatenate(([0.0], pts)))
    counts = [max(8, int(round(n_nodes * h / pts[-1]))) for h in lengths]
    return composite_grid(pts, counts)


def admissible_sigma(V: RadialPotential, sigma: float, sign: int) -> float:
    """``sigma`` raised to the sign -1 threshold ``2(|V|_inf + 1)`` when needed."""
    return max(float(sigma), sign_minus_threshold(V)) if sign == -1 else float(sigma)


def monotonicity_pair(m, sigma, V1: RadialPotential, V2: RadialPotential, sign,
                      grid: QuadratureGrid | None = None, d: int = 2, n_nodes: int = 64):
    """``(log|F_{m,±V1}(iσ)|, log|F_{m,±V2}(iσ)|)`` for a nested pair ``|V1| <= |V2|``."""
    if not V1.dominated_by(V2):
        raise PreconditionError("V1 <= V2 does not hold pointwise")
    if sign == -1 and sigma < sign_minus_threshold(V2):
        raise PreconditionError("sign -1 needs sigma >= 2(|V2|_inf + 1)")
    if grid is None:
        grid = _pair_grid(V1, V2, n_nodes)
    f1, _ = log_abs_fm_on_axis(m, sigma, V1.with_sign(sign), grid, d=d, strict=False)
    f2, _ = log_abs_fm_on_axis(m, sigma, V2.with_sign(sign), grid, d=d, strict=False)
    return f1, f2


def monotonicity_check(m, sigma, V1: RadialPotential, V2: RadialPotential, sign,
                       grid: QuadratureGrid | None = None, d: int = 2,
                       slack: float = 1e-9, n_nodes: int = 64):
    """True iff ``log|F_{m,±V1}(iσ)| <= log|F_{m,±V2}(iσ)| + slack``."""
    f1, f2 = monotonicity_pair(m, sigma, V1, V2, sign, grid, d, n_nodes)
    return f1 <= f2 + slack


def contraction_eigen_check(trials: int, dim: int, seed, tol: float = 1e-10,
                            return_worst: bool = False):
    """Random check that eigenvalue moduli of ``A*BA`` are dominated by those of ``B``.

    ``B`` is random Hermitian, ``A`` random complex scaled to unit norm.
    """
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(int(trials)):
        X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        B = 0.5 * (X + X.conj().T)
        A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        A = A / np.linalg.norm(A, 2)
        C = A.conj().T @ B @ A
        C = 0.5 * (C + C.conj().T)
        lam = np.sort(np.abs(np.linalg.eigvalsh(C)))[::-1]
        mu = np.sort(np.abs(np.linalg.eigvalsh(B)))[::-1]
        worst = max(worst, float(np.max(lam - mu)))
    ok = worst <= tol
    return (ok, worst) if return_worst else ok


def norm_contraction(sigma, V1: RadialPotential, V2: RadialPotential, sign: int,
                     grid: QuadratureGrid | None = None, d: int = 2,
                     l_values=None, n_nodes: int = 64) -> float:
    """Max over modes of ``‖A₁^{-1/2} (V₁/V₂)^{1/2} A₂^{1/2}‖`` at ``iσ``."""
    if not V1.dominated_by(V2):
        raise PreconditionError("V1 <= V2 does not hold pointwise")
    if grid is None:
        grid = _pair_grid(V1, V2, n_nodes)
    lam = LambdaPoint.on_imaginary_axis(sigma)
    P1 = V1.with_sign(1)
    P2 = V2.with_sign(1)
    if l_values is None:
        l_values = range(int(2 * V2.support * sigma) + 2)
    l_values = list(l_values)
    table = bessel_table(lam, grid, max(l_values) + (d - 2) // 2)
    v1 = P1.abs_value(grid.nodes)
    v2 = P2.abs_value(grid.nodes)
    ratio = np.where(v1 > 0, np.sqrt(np.divide(v1, v2, out=np.ones_like(v1), where=v2 > 0)), 0.0)
    n = grid.size
    worst = 0.0
    for l in l_values:
        md = make_mode(d, l)
        K1 = assemble_mode_operator(md, lam, P1, grid, table).K if not P1.is_zero else np.zeros((n, n))
        K2 = assemble_mode_operator(md, lam, P2, grid, table).K
        A1ih, _ = _inv_sqrt_sym(np.eye(n) + sign * K1)
        _, A2h = _inv_sqrt_sym(np.eye(n) + sign * K2)
        C = A1ih @ (ratio[:, None] * A2h)
        w, _ = specfun.jacobi_eigh(C.T @ C)
        worst = max(worst, math.sqrt(max(float(np.max(w)), 0.0)))
    return worst


def norm_contraction_check(sigma, V1, V2, sign, grid=None, d=2, tol=1e-8, **kw) -> bool:
    return norm_contraction(sigma, V1, V2, sign, grid, d, **kw) <= 1.0 + tol


def b1_scaled_error(sigma, l, V: RadialPotential, grid: QuadratureGrid, d: int = 2) -> float:
    """``σ² ‖T_sym - B₁‖ / ‖T_sym‖`` for one partial wave (spectral norms)."""
    lam = LambdaPoint.on_imaginary_axis(sigma)
    op = assemble_mode_operator(make_mode(d, l), lam, V, grid)
    B = b1_matrix(op, V.sign)
    num = float(np.max(np.abs(specfun.jacobi_eigh(op.T - B)[0])))
    den = float(np.max(np.abs(specfun.jacobi_eigh(op.T)[0])))
    return sigma * sigma * num / den


def rayleigh_lower_bound(mode: ModeSpec, sigma: float, eps: float, a: float,
                         n_nodes: int = 48) -> specfun.LogScaledReal:
    """``log(π ε ∫_{a/2}^a I_ν(σr)² r dr)`` by log-sum-exp Gauss quadrature."""
    if not (sigma > 0 and eps > 0 and a > 0):
        raise DomainError("sigma, eps and a must be positive")
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    r = 0.75 * a + 0.25 * a * x
    wt = 0.25 * a * w
    logs = [2.0 * specfun.log_bessel_i(mode.nu, sigma * ri).log_abs + math.log(ri * wi)
            for ri, wi in zip(r, wt)]
    top = max(logs)
    val = top + math.log(math.fsum(math.exp(t - top) for t in logs))
    return specfun.LogScaledReal(val + math.log(math.pi * eps), 1)


# --- boundary and upper-bound diagnostics ---------------------------------

def _boundary_cutoff(t, a):
    return int(math.ceil(1.5 * a * t)) + 10


def logderiv_on_boundary(m: int, V: RadialPotential, grid: QuadratureGrid, t: float,
                         d: int = 2, rel_step: float = 1e-4, cutoff=None) -> complex:
    """``F'/F`` at the real point ``t`` (arg 0) by a centered difference of mode logs."""
    h = rel_step * t
    if cutoff is None:
        cutoff = _boundary_cutoff(t + h, V.support)
    lp = LambdaPoint(t + h, 0.0)
    lm = LambdaPoint(t - h, 0.0)
    tp = bessel_table(lp, grid, cutoff + (d - 2) // 2)
    tm = bessel_table(lm, grid, cutoff + (d - 2) // 2)
    re, im = [], []
    for l in range(cutoff + 1):
        md = make_mode(d, l)
        dp = _mode_logdet(md, V, grid, tp, m)
        dm = _mode_logdet(md, V, grid, tm, m)
        if not (math.isfinite(dp.real) and math.isfinite(dm.real)):
            raise NumericalError("F vanishes near this boundary sample")
        dl = dp - dm
        # unwrap the phase difference into (-π, π]
        ph = math.remainder(dl.imag, 2 * math.pi)
        re.append(md.multiplicity * dl.real)
        im.append(md.multiplicity * ph)
    return complex(math.fsum(re), math.fsum(im)) / (2 * h)


def boundary_logderiv_check(m, V: RadialPotential, grid: QuadratureGrid, t_values,
                            d: int = 2, slope_tol: float = 0.1, report: dict | None = None):
    """Trend test of ``|F'/F(t)| / t^{d-2}`` on the positive real boundary."""
    from .fitting import theil_sen
    ts, ratios, skipped = [], [], []
    for t in t_values:
        if not t > 0:
            raise DomainError("t values must be positive")
        if V.is_zero:
            ts.append(t)
            ratios.append(0.0)
            continue
        try:
            g = logderiv_on_boundary(m, V, grid, t, d)
        except NumericalError:
            warnings.warn(f"F vanishes near t={t:g}; sample skipped")
            skipped.append(t)
            continue
        ts.append(t)
        ratios.append(abs(g) / t ** (d - 2))
    if report is not None:
        report.update(t=ts, ratio=ratios, skipped=skipped,
                      C=max(ratios) if ratios else 0.0)
    pos = [(t, r) for t, r in zip(ts, ratios) if r > 0]
    if len(pos) < 2:
        if report is not None:
            report["slope"] = 0.0
        return True
    slope = theil_sen(np.log([p[0] for p in pos]), np.log([p[1] for p in pos]))[0]
    if report is not None:
        report["slope"] = slope
    return slope <= slope_tol


def quarter_circle_points(radius, n_points=9, delta=1e-3):
    """Points of modulus ``radius`` with arg from ``delta`` to ``π/2``."""
    return [LambdaPoint(radius, delta + (math.pi / 2 - delta) * k / (n_points - 1))
            for k in range(n_points)]


def upper_bound_check(m, V: RadialPotential, grid: QuadratureGrid, fit_radius=20.0,
                      test_radii=(10.0, 15.0), n_points=9, d=2, report=None) -> bool:
    """Fit ``C`` in ``log|F| <= C(1+|λ|^d)`` on one quarter circle; test it on others."""
    def logs(radius):
        cut = _boundary_cutoff(radius, V.support)
        return [log_fm_at(m, p, V, grid, cut, d).real
                for p in quarter_circle_points(radius, n_points)]

    fit = logs(fit_radius)
    C = max(max(fit), 0.0) / (1.0 + fit_radius ** d)
    ok = True
    detail = {}
    for r in test_radii:
        vals = logs(r)
        bound = C * (1.0 + r ** d)
        detail[r] = (max(vals), bound)
        ok = ok and max(vals) <= bound
    if report is not None:
        report.update(C=C, fit_max=max(fit), tests=detail)
    return ok


# --- growth series -----------------------------------------------------------

@dataclass(frozen=True)
class GrowthSeries:
    sigma_values: tuple
    log_abs_F: tuple
    mode_cutoffs: tuple

    def __post_init__(self):
        if not (len(self.sigma_values) == len(self.log_abs_F) == len(self.mode_cutoffs)):
            raise ValueError("lengths disagree")
        if any(b <= a for a, b in zip(self.sigma_values, self.sigma_values[1:])):
            raise ValueError("sigma values must increase")
        if not all(math.isfinite(x) for x in self.log_abs_F):
            raise ValueError("log|F| must be finite")


def growth_series(m, sigmas, V: RadialPotential, n_nodes=64, d=2, tail_tol=1e-14,
                  mapper=map) -> GrowthSeries:
    """``log|F_m(iσ)|`` on a σ grid; ``mapper`` may be a pool's ordered ``map``."""
    grid = grid_for(V, n_nodes)
    res = list(mapper(lambda s: log_abs_fm_on_axis(m, s, V, grid, tail_tol, d), sigmas))
    return GrowthSeries(tuple(float(s) for s in sigmas),
                        tuple(r[0] for r in res), tuple(r[1] for r in res))

"""Checks for the half-plane function theory behind the growth bounds.

Three things live here: reflected canonical products ``Π E_p(z/ā)/E_p(z/a)``
and their logarithmic derivative on the real line, a sampled check of the
Carathéodory-type bound on the half annulus ``Ω_R = {1 <= |z| <= R, Im z >= 0}``,
and argument-principle zero counting in ``Ω_R``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError, PreconditionError
from .fitting import theil_sen
from .winding import PhaseTracker, sector_polygon

__all__ = [
    "ZeroFamily", "builtin_family", "BUILTIN_RHOS", "canonical_factor",
    "product_logderiv", "logderiv_integral", "logderiv_integrals", "ratio_test", "RatioReport",
    "caratheodory_check", "caratheodory_report", "CaratheodoryReport",
    "analytic_families", "halfplane_zero_count", "polygon_zero_count",
    "constructed_product", "random_product",
]

BUILTIN_RHOS = (0.5, 1.5, 2.5)
MAX_FAMILY = 10_000


@dataclass(frozen=True)
class ZeroFamily:
    """Points ``a_j`` in the open upper half plane with ``n(r) <= C0 r^rho`` for ``r >= 1``."""

    rho: float
    zeros: tuple
    C0: float = 1.0
    generator: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        rho = float(self.rho)
        if not (rho > 0 and math.isfinite(rho)) or rho == int(rho):
            raise DomainError(f"rho must be a positive non-integer, got {self.rho!r}")
        object.__setattr__(self, "rho", rho)
        zs = tuple(complex(z) for z in self.zeros)
        if len(zs) > MAX_FAMILY:
            raise DomainError(f"families are capped at {MAX_FAMILY} zeros")
        if any(not z.imag > 0 for z in zs):
            raise DomainError("zeros must lie in the open upper half plane")
        mods = [abs(z) for z in zs]
        if any(b < a for a, b in zip(mods, mods[1:])):
            raise DomainError("zeros must be sorted by modulus")
        object.__setattr__(self, "zeros", zs)
        self._check_counting(mods)

    @property
    def p(self) -> int:
        return int(math.floor(self.rho))

    def __len__(self):
        return len(self.zeros)

    def counting(self, r: float) -> int:
        return sum(1 for z in self.zeros if abs(z) <= r)

    def _check_counting(self, mods):
        # n(r) only jumps at |a_j|; the worst r in each step is its left end
        if not mods:
            return
        n_le_1 = sum(1 for m in mods if m <= 1.0)
        if n_le_1 > self.C0 * (1 + 1e-12):
            raise PreconditionError(f"n(1) = {n_le_1} exceeds C0 = {self.C0}")
        for k, m in enumerate(mods):
            if m <= 1.0 or (k + 1 < len(mods) and mods[k + 1] == m):
                continue
            if k + 1 > self.C0 * m ** self.rho * (1 + 1e-9):
                raise PreconditionError(
                    f"n({m:.6g}) = {k + 1} exceeds C0 r^rho = {self.C0 * m ** self.rho:.6g}")

    def polar(self):
        z = np.asarray(self.zeros, dtype=complex)
        return np.abs(z), np.angle(z)


def builtin_family(rho: float, n_zeros: int = 2000, angle: float = math.pi / 4) -> ZeroFamily:
    """``a_j = j^{1/rho} e^{i angle}``, ``j = 1..n_zeros``; ``n(r) = floor(r^rho)``, so ``C0 = 1``."""
    if not 0 < angle < math.pi:
        raise DomainError("angle must be in (0, pi)")
    ph = cmath.exp(1j * angle)
    zeros = [j ** (1.0 / rho) * ph for j in range(1, int(n_zeros) + 1)]
    return ZeroFamily(rho, tuple(zeros), 1.0,
                      {"kind": "power", "rho": rho, "n_zeros": int(n_zeros), "angle": angle})


def canonical_factor(p: int, z: complex) -> complex:
    """Weierstrass factor ``E_p(z) = (1 - z) exp(z + z²/2 + ... + z^p/p)``."""
    if int(p) != p or p < 0:
        raise DomainError("p must be a nonnegative integer")
    z = complex(z)
    if p == 0:
        return 1.0 - z
    s = 0j
    zk = 1.0 + 0j
    for k in range(1, int(p) + 1):
        zk *= z
        s += zk / k
    return (1.0 - z) * cmath.exp(s)


def _terms(family: ZeroFamily, x: float):
    # reflected pair as a single real number times 2i:
    # |a|^{-2p} x^p (x Im a^p - Im a^{p+1}) / |x - a|^2, written in polar form
    p = family.p
    r, phi = family.polar()
    z = np.asarray(family.zeros, dtype=complex)
    num = x * r ** (-p) * np.sin(p * phi) - r ** (1 - p) * np.sin((p + 1) * phi)
    return 2.0 * x ** p * num / np.abs(x - z) ** 2


def product_logderiv(family: ZeroFamily, x: float, order: str = "ascending") -> complex:
    """``f'(x)/f(x)`` for ``f = Π E_p(z/ā_n)/E_p(z/a_n)``; purely imaginary.

    Terms are combined in ascending (or descending) modulus with a
    correctly rounded sum, so the order only matters through the terms.
    """
    if order not in ("ascending", "descending"):
        raise DomainError("order must be 'ascending' or 'descending'")
    if not family.zeros:
        return 0j
    t = _terms(family, float(x))
    if order == "descending":
        t = t[::-1]
    return complex(0.0, math.fsum(t))


def _simpson(f, a, b, tol, max_level):
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    pieces = []

    def rec(a, b, fa, fm, fb, whole, tol, level):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        err = left + right - whole
        if abs(err) <= 15.0 * tol:
            pieces.append(left + right + err / 15.0)
            return
        if level >= max_level:
            raise NumericalError(
                f"adaptive Simpson did not converge on [{a:.6g}, {b:.6g}] after {max_level} levels")
        rec(a, m, fa, flm, fm, left, 0.5 * tol, level + 1)
        rec(m, b, fm, frm, fb, right, 0.5 * tol, level + 1)

    rec(a, b, fa, fm, fb, whole, tol, 0)
    return math.fsum(pieces)


def _integrand(family: ZeroFamily):
    r, phi = family.polar()
    z = np.asarray(family.zeros, dtype=complex)
    p = family.p
    c1 = r ** (-p) * np.sin(p * phi)
    c0 = r ** (1 - p) * np.sin((p + 1) * phi)

    def g(t):
        return math.fsum(2.0 * t ** p * (t * c1 - c0) / np.abs(t - z) ** 2)
    return g, max(min(float(z.imag.min()), 1.0), 1e-3)


def _integrate(g, width, a, b, quad_tol, max_level):
    # seed the recursion on panels no wider than the closest zero's height,
    # so no narrow peak slips between the first samples
    n = max(1, int(math.ceil(abs(b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    tol = quad_tol / n
    return math.fsum(_simpson(g, float(lo), float(hi), tol, max_level)
                     for lo, hi in zip(edges[:-1], edges[1:]))


def logderiv_integral(family: ZeroFamily, x: float, quad_tol: float = 1e-9,
                      max_level: int = 20) -> complex:
    """``∫_0^x f'(t)/f(t) dt`` by adaptive Simpson with absolute tolerance ``quad_tol``."""
    x = float(x)
    if x == 0.0 or not family.zeros:
        return 0j
    if not quad_tol > 0:
        raise DomainError("quad_tol must be positive")
    g, width = _integrand(family)
    return complex(0.0, _integrate(g, width, 0.0, x, quad_tol, max_level))


def logderiv_integrals(family: ZeroFamily, xs, quad_tol: float = 1e-9,
                       max_level: int = 20):
    """``logderiv_integral`` at several points of one sign, integrating between neighbours."""
    xs = [float(v) for v in xs]
    if not family.zeros:
        return [0j] * len(xs)
    if any(v < 0 for v in xs) and any(v > 0 for v in xs):
        raise DomainError("points must share a sign")
    g, width = _integrand(family)
    order = sorted(range(len(xs)), key=lambda k: abs(xs[k]))
    out = [0j] * len(xs)
    pieces, prev = [], 0.0
    tol = quad_tol / max(1, len(xs))
    for k in order:
        pieces.append(_integrate(g, width, prev, xs[k], tol, max_level) if xs[k] != prev else 0.0)
        prev = xs[k]
        out[k] = complex(0.0, math.fsum(pieces))
    return out


@dataclass
class RatioReport:
    rho: float
    xs: list
    ratios: list
    spread: float
    slope: float
    passed: bool


def ratio_test(family: ZeroFamily, xs=None, quad_tol: float = 1e-9,
               max_spread: float = 10.0, max_slope: float = 0.2) -> RatioReport:
    """Boundedness of ``|∫_0^x f'/f| / |x|^rho`` over ``xs`` (default 4, 8, ..., 64).

    Passes when max/min is below ``max_spread`` and the Theil-Sen slope of
    the log ratio against ``log x`` is below ``max_slope``.
    """
    xs = [float(v) for v in (range(4, 65, 4) if xs is None else xs)]
    vals = logderiv_integrals(family, xs, quad_tol)
    ratios = [abs(v) / abs(x) ** family.rho for v, x in zip(vals, xs)]
    lo, hi = min(ratios), max(ratios)
    if lo <= 0:
        raise NumericalError("ratio vanished; the family is degenerate")
    slope = theil_sen(np.log(np.abs(xs)), np.log(ratios))[0]
    spread = hi / lo
    return RatioReport(family.rho, xs, ratios, spread, slope,
                       bool(spread < max_spread and slope < max_slope))


# --- Carathéodory-type bound --------------------------------------------

def _vec(f):
    def g(z):
        z = np.asarray(z, dtype=complex)
        try:
            out = np.asarray(f(z), dtype=complex)
            if out.shape == z.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([complex(f(complex(w))) for w in z.ravel()]).reshape(z.shape)
    return g


@dataclass
class CaratheodoryReport:
    M: float
    max_re: float
    A: float
    bound: float
    max_on_circle: float
    mesh: tuple
    holds: bool


def _mesh_max(f, R, n_rad, n_ang):
    rr = np.linspace(1.0, R, n_rad)
    th = np.linspace(0.0, math.pi, n_ang)
    z = rr[:, None] * np.exp(1j * th)[None, :]
    return float(np.max(f(z).real))


def caratheodory_report(f, rho: float, C0: float, R: float, r: float,
                        n_rad: int = 41, n_ang: int = 81, max_refine: int = 6,
                        rel_tol: float = 1e-9) -> CaratheodoryReport:
    """Sampled check of ``|f(z)| <= 2 r^rho/(R^rho - r^rho) A(R)`` on ``|z| = r``.

    ``A(R) = max(C0 R^rho, M R^rho, max Re f over Ω_R)`` with ``M`` the
    maximum of ``|f|`` on the unit half circle.  Mesh maxima are refined
    until they move by less than 1%.
    """
    if not (1.0 < r < R):
        raise DomainError("need 1 < r < R")
    if not (rho > 0 and C0 > 0):
        raise DomainError("rho and C0 must be positive")
    f = _vec(f)
    xs = np.linspace(1.0, R, 4 * n_rad)
    real_vals = np.abs(np.concatenate((f(xs.astype(complex)), f((-xs).astype(complex)))))
    if np.any(real_vals > C0 * np.concatenate((xs, xs)) ** rho * (1 + rel_tol)):
        raise PreconditionError("|f(x)| <= C0 |x|^rho fails on the real segments")

    def circle_max(radius, n):
        th = np.linspace(0.0, math.pi, n)
        return float(np.max(np.abs(f(radius * np.exp(1j * th)))))

    prev = None
    for _ in range(max_refine):
        cur = (circle_max(1.0, 4 * n_ang), _mesh_max(f, R, n_rad, n_ang), circle_max(r, 4 * n_ang))
        if prev is not None and all(abs(c - q) <= 0.01 * max(abs(c), 1e-300) for c, q in zip(cur, prev)):
            break
        prev = cur
        n_rad, n_ang = 2 * n_rad - 1, 2 * n_ang - 1
    else:
        raise NumericalError("mesh maxima did not settle under refinement")
    M, max_re, on_r = cur
    A = max(C0 * R ** rho, M * R ** rho, max_re)
    bound = 2.0 * r ** rho / (R ** rho - r ** rho) * A
    return CaratheodoryReport(M, max_re, A, bound, on_r, (n_rad, n_ang),
                              bool(on_r <= bound * (1 + rel_tol)))


def caratheodory_check(f, rho: float, C0: float, R: float, r: float, **kw) -> bool:
    return caratheodory_report(f, rho, C0, R, r, **kw).holds


def _blaschke(points):
    pts = np.asarray(points, dtype=complex)

    def f(z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for a in pts:
            out = out * (z - a) / (z - np.conj(a))
        return out
    return f


def analytic_families():
    """``(name, f, rho, C0)`` tuples analytic near ``Ω_R`` with ``|f(x)| <= C0|x|^rho``."""
    fams = [
        ("const_1", lambda z: np.ones_like(np.asarray(z, dtype=complex)), 0.5, 1.0),
        ("const_-3", lambda z: -3.0 * np.ones_like(np.asarray(z, dtype=complex)), 0.5, 3.0),
        ("z^2", lambda z: np.asarray(z, dtype=complex) ** 2, 2.5, 1.0),
        ("z^3-2z", lambda z: np.asarray(z, dtype=complex) ** 3 - 2 * np.asarray(z, dtype=complex),
         3.5, 3.0),
        ("iz+1", lambda z: 1j * np.asarray(z, dtype=complex) + 1.0, 1.5, 2.0),
        ("exp(iz)", lambda z: np.exp(1j * np.asarray(z, dtype=complex)), 0.5, 1.0),
        ("exp(3iz)", lambda z: np.exp(3j * np.asarray(z, dtype=complex)), 0.5, 1.0),
        ("blaschke_2", _blaschke([1 + 1j, -2 + 0.5j]), 0.5, 1.0),
        ("blaschke_3", _blaschke([0.5j, 3 + 2j, -1 + 4j]), 0.5, 1.0),
        ("z*blaschke", lambda z: np.asarray(z, dtype=complex) * _blaschke([2j])(z), 1.5, 1.0),
    ]
    return fams


# --- zero counting --------------------------------------------------------

def polygon_zero_count(f, polygon, h_max: float, h_min: float = 1e-12) -> int:
    """Zeros of ``f`` inside a counterclockwise polygon, with multiplicity."""
    tracker = PhaseTracker(lambda z: complex(f(z)), h_max, h_min, max_turn=math.pi / 2)
    return tracker.winding(polygon)


def halfplane_zero_count(f, R: float, delta: float = 1e-3, r_in: float = 1.0,
                         theta_lo: float = 0.0, theta_hi: float = math.pi,
                         n_arc: int = 64, h_max: float | None = None) -> int:
    """Zeros of ``f`` in ``{r_in <= |z| <= R, Im z >= delta}`` (optionally an angular slice).

    The outer arc is circumscribed and the inner arc inscribed, so zeros
    within ``R (1/cos(π/(2 n_arc)) - 1)`` of either circle may be counted.
    """
    if not R > r_in >= 0:
        raise DomainError("need R > r_in >= 0")
    poly = sector_polygon(R, delta, n_arc, r_in, theta_lo, theta_hi)
    return polygon_zero_count(f, poly, h_max if h_max is not None else R / 64.0)


def constructed_product(zeros):
    """``Π (z - z_k)`` for the given zeros (repeat entries for multiplicity)."""
    zs = [complex(z) for z in zeros]

    def f(z):
        out = 1.0 + 0j
        for a in zs:
            out *= (z - a)
        return out
    return f


def random_product(rng, R: float, n_zeros: int = 6, delta: float = 1e-3, margin: float = 0.25):
    """A product with random zeros and the number of them in the counting region.

    Zeros keep ``margin`` away from every edge of the region so the
    polygonal contour sees the same content as the exact one.
    """
    zs, inside = [], 0
    while len(zs) < n_zeros:
        z = complex(rng.uniform(-1.3 * R, 1.3 * R), rng.uniform(-0.5 * R, 1.3 * R))
        r = abs(z)
        if min(abs(r - 1.0), abs(r - R), abs(z.imag - delta)) < margin:
            continue
        k = int(rng.integers(1, 3))
        zs.extend([z] * k)
        if 1.0 < r < R and z.imag > delta:
            inside += k
    return constructed_product(zs), inside, zs

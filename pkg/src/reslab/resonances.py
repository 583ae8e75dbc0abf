"""Resonances of ``-Δ ± ε χ_a`` on the sheets of the cover, mode by mode.

A resonance of partial wave ``l`` on sheet ``m`` is ``e^{imπ} λ₀`` with
``λ₀`` in the upper half plane a zero of the matching condition between
the interior solution ``J_ν(μ r)``, ``μ² = λ₀² ∓ ε``, and the exterior
outgoing solution continued to sheet ``m``,
``(-1)^{νm}(H1_ν - 2m J_ν)(λ₀ r)``.  The matching function used here is

    D(λ₀) = (λ₀/μ)^ν [μ J_ν'(μa) H^{[m]}(λ₀a) - λ₀ J_ν(μa) H^{[m]}'(λ₀a)],

analytic in ``λ₀`` and even in ``μ``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import DomainError, NumericalError, PreconditionError
from .logcover import LambdaPoint, rotate
from .mode import ModeSpec, RadialPotential, make_mode
from . import specfun
from .winding import Box, NearZeroError, PhaseTracker, sector_polygon
from .fitting import ols

__all__ = [
    "interior_wavenumber", "matching_det", "matching_det_reference",
    "Zero", "SearchReport", "ResonanceSet", "find_mode_zeros",
    "mode_search", "halfdisc_winding", "counting_function", "order_of_growth", "fit_order", "nu_cap",
    "DELTA_INSET",
]

DELTA_INSET = 1e-3
MAX_PERTURB = 5
PERTURB = 1e-6


def interior_wavenumber(lambda0: complex, eps: float, sign: int) -> complex:
    """Principal square root of ``λ₀² - sign*ε``."""
    lam = complex(lambda0)
    return cmath.sqrt(lam * lam - sign * eps)


def _kernel(nu, m, eps, a, sign):
    k = specfun.matching_kernel
    return lambda z: k(nu, z, m, eps, a, sign)


def matching_det(mode: ModeSpec, lambda0: complex, m: int, eps: float, a: float,
                 sign: int, normalized: bool = False) -> complex:
    """Matching function ``D(λ₀)``; ``normalized`` divides by the positive scale
    ``(|J|+|J'|)(|H^{[m]}|+|H^{[m]}'|)`` (same zeros and phase, modulus ``<= 1``)."""
    lam = complex(lambda0)
    if lam == 0:
        raise DomainError("λ₀ must be nonzero")
    dwin, logfac = specfun.matching_kernel(mode.nu, lam, m, eps, a, sign)
    if normalized:
        return dwin
    return dwin * math.exp(logfac)


def matching_det_reference(mode: ModeSpec, lambda0: complex, m: int, eps: float, a: float,
                           sign: int, mu: complex | None = None) -> complex:
    """``D(λ₀)`` from the public Bessel functions on the cover, with an optional
    explicit interior wavenumber (either root of ``λ₀² - sign*ε``)."""
    lam = complex(lambda0)
    nu = mode.nu
    if mu is None:
        mu = interior_wavenumber(lam, eps, sign)
    mu = complex(mu)
    p = rotate(LambdaPoint.from_complex(lam), m)
    par = -1.0 if (nu * m) % 2 else 1.0
    zi = mu * a
    ze = lam * a
    jv = specfun.bessel_j(nu, zi)
    jp = specfun.bessel_j_prime(nu, zi)
    hv = specfun.hankel1_on_cover(nu, p, a)
    hp = par * (specfun.hankel1_prime(nu, ze) - 2.0 * m * specfun.bessel_j_prime(nu, ze))
    d = mu * jp * hv - lam * jv * hp
    return d * (lam / mu) ** nu


@dataclass(frozen=True)
class Zero:
    lambda0: complex
    l: int
    multiplicity: int
    residual: float


@dataclass
class SearchReport:
    boxes_examined: int = 0
    windings_computed: int = 0
    newton_iterations: int = 0
    evaluations: int = 0
    perturbations: int = 0
    unresolved: list = field(default_factory=list)
    split_mismatches: int = 0
    notes: list = field(default_factory=list)

    def merge(self, other: "SearchReport"):
        self.boxes_examined += other.boxes_examined
        self.windings_computed += other.windings_computed
        self.newton_iterations += other.newton_iterations
        self.evaluations += other.evaluations
        self.perturbations += other.perturbations
        self.unresolved += other.unresolved
        self.split_mismatches += other.split_mismatches
        self.notes += other.notes


def _log_abs(dwin, logfac):
    return math.log(abs(dwin)) + logfac if dwin != 0 else -math.inf


class _Newton:
    def __init__(self, kern, report):
        self.kern = kern
        self.report = report

    def run(self, z0, mult=1, max_iter=60, radius=math.inf):
        z = complex(z0)
        start = z
        d0, l0 = self.kern(z)
        for _ in range(max_iter):
            self.report.newton_iterations += 1
            dz, lz = self.kern(z)
            if not (math.isfinite(lz) and cmath.isfinite(dz)):
                return None
            if dz == 0:
                return z
            g = dz * math.exp(lz - l0)
            h = 1e-6 * abs(z)
            dp, lp = self.kern(z + h)
            dm, lm = self.kern(z - h)
            gp = (dp * math.exp(lp - l0) - dm * math.exp(lm - l0)) / (2 * h)
            if gp == 0 or not cmath.isfinite(gp):
                return None
            step = mult * g / gp
            z = z - step
            if not cmath.isfinite(z) or z.imag <= 0 or abs(z - start) > radius:
                return None
            if abs(step) <= 1e-13 * max(1.0, abs(z)):
                return z
        return None


def find_mode_zeros(mode: ModeSpec, m: int, eps: float, a: float, sign: int,
                    box, tol: float = 1e-6, report: SearchReport | None = None,
                    h_max: float | None = None, details: list | None = None):
    """Zeros of ``D`` in ``box`` (``(x0, x1, y0, y1)`` or ``Box``) as ``(λ₀, k)`` pairs.

    Recursive bisection on winding numbers; a box of winding 1 is resolved
    by Newton from its center when that converges inside the box.
    """
    if not isinstance(box, Box):
        box = Box(*box)
    if box.y0 < DELTA_INSET * (1 - 1e-12):
        raise DomainError(f"search box must satisfy Im >= {DELTA_INSET}")
    rep = report if report is not None else SearchReport()
    kern = _kernel(mode.nu, m, eps, a, sign)
    if h_max is None:
        h_max = 0.25 / a
    tracker = PhaseTracker(lambda z: kern(z)[0], h_max=h_max,
                           h_min=1e-13 * max(1.0, box.diameter))
    newton = _Newton(kern, rep)
    found = []

    def winding(b):
        rep.windings_computed += 1
        return tracker.box_winding(b)

    # outer box, perturbed outward if a zero sits on its boundary
    outer = box
    w_outer = None
    for k in range(MAX_PERTURB + 1):
        try:
            w_outer = winding(outer)
            break
        except NearZeroError:
            rep.perturbations += 1
            s = PERTURB * (k + 1) * max(1.0, box.diameter)
            outer = Box(box.x0 - s, box.x1 + s, max(box.y0 - s * 0.5, DELTA_INSET * 0.5), box.y1 + s)
    if w_outer is None:
        rep.unresolved.append((box, None))
        rep.evaluations += tracker.evaluations
        return [], None

    stack = [(outer, w_outer)]
    while stack:
        b, w = stack.pop()
        rep.boxes_examined += 1
        if w == 0:
            continue
        if w < 0:
            rep.unresolved.append((b, w))
            continue
        if w == 1:
            z = newton.run(b.center, radius=b.diameter)
            if z is not None and b.contains(z):
                found.append(_polished(z, 1, b, kern, tracker))
                continue
        if b.diameter < tol:
            z = newton.run(b.center, mult=w, radius=b.diameter)
            if z is None or not b.contains(z):
                z = b.center
                rep.notes.append(f"cluster of {w} at {z!r} kept at box center")
            found.append(_polished(z, w, b, kern, tracker))
            continue
        children = None
        for k in range(MAX_PERTURB + 1):
            f = 0.5 + (PERTURB * k * (1 if k % 2 else -1))
            try:
                kids = b.split(f, f)
                ws = [winding(c) for c in kids]
            except NearZeroError:
                rep.perturbations += 1
                continue
            if sum(ws) != w:
                rep.split_mismatches += 1
                rep.perturbations += 1
                continue
            children = list(zip(kids, ws))
            break
        if children is None:
            rep.unresolved.append((b, w))
            continue
        # push in reverse so the stack pops children in a fixed order
        for c, cw in reversed(children):
            if cw:
                stack.append((c, cw))
    rep.evaluations += tracker.evaluations
    if details is not None:
        details.extend(found)
    zeros = sorted(((z, k) for z, k, _res in found), key=lambda t: (abs(t[0]), t[0].real))
    return zeros, w_outer


def _polished(z, k, b, kern, tracker):
    dz, lz = kern(z)
    num = _log_abs(dz, lz)
    c = b.corners()
    pts = list(c) + [0.5 * (p + q) for p, q in zip(c, c[1:] + c[:1])]
    den = max(_log_abs(*kern(p)) for p in pts)
    res = math.exp(num - den) if num > -math.inf else 0.0
    return z, k, res


def nu_cap(a: float, r_max: float) -> int:
    return int(math.ceil(1.5 * a * r_max)) + 10


@dataclass
class ResonanceSet:
    d: int
    m: int
    potential: RadialPotential
    zeros: tuple
    search_box: tuple
    tol: float
    partial: bool = False
    report: SearchReport = field(default_factory=SearchReport)
    mode_windings: dict = field(default_factory=dict)
    truncation_windings: dict = field(default_factory=dict)

    def weight(self, z: Zero) -> int:
        return make_mode(self.d, z.l).multiplicity * z.multiplicity

    def count(self, r: float) -> int:
        return sum(self.weight(z) for z in self.zeros if abs(z.lambda0) <= r)

    def step_table(self):
        """``(radius, n_m(radius))`` at every jump, increasing."""
        pts = sorted((abs(z.lambda0), self.weight(z)) for z in self.zeros)
        out = []
        total = 0
        for r, w in pts:
            total += w
            if out and out[-1][0] == r:
                out[-1] = (r, total)
            else:
                out.append((r, total))
        return out

    def zeros_of_mode(self, l: int):
        return [z for z in self.zeros if z.l == l]


def mode_search(d, l, m, eps, a, sign, box, tol):
    """One partial wave: ``(l, zeros, outer_winding, report)``."""
    rep = SearchReport()
    md = make_mode(d, l)
    details = []
    _zs, w = find_mode_zeros(md, m, eps, a, sign, box, tol, rep, details=details)
    zeros = tuple(Zero(z, l, k, res) for z, k, res in details)
    return l, zeros, w, rep


def halfdisc_winding(d, l, m, eps, a, sign, r_max, delta=DELTA_INSET) -> int:
    """Winding of ``D`` around ``{|λ₀| <= r_max, Im λ₀ >= δ}`` (circumscribed polygon)."""
    kern = _kernel(make_mode(d, l).nu, m, eps, a, sign)
    tracker = PhaseTracker(lambda z: kern(z)[0], h_max=0.25 / a, h_min=1e-13 * max(1.0, r_max))
    return tracker.winding(sector_polygon(r_max, delta, n_arc=max(64, int(8 * r_max))))


def counting_function(d, m, eps, a, sign, r_max, tol=1e-6, mapper=map,
                      delta: float = DELTA_INSET, check_modes: int = 3) -> ResonanceSet:
    """All zeros with ``ν <= ν_cap`` in ``[-r_max, r_max] x [δ, r_max]`` and ``n_m(r)``.

    The first ``check_modes`` partial waves above the cap must have winding 0
    on the half disc of radius ``r_max``; ``truncation_windings`` records it.
    """
    if r_max <= delta:
        raise DomainError("r_max must exceed the inset δ")
    box = Box(-r_max, r_max, delta, r_max)
    shift = (d - 2) // 2
    cap = nu_cap(a, r_max)
    ls = list(range(0, cap - shift + 1))
    extra = list(range(cap - shift + 1, cap - shift + 1 + check_modes))

    def job(l):
        if l in extra:
            try:
                return l, (), halfdisc_winding(d, l, m, eps, a, sign, r_max, delta), SearchReport()
            except NumericalError as exc:
                r = SearchReport()
                r.notes.append(f"truncation check for mode {l} failed: {exc}")
                return l, (), None, r
        return mode_search(d, l, m, eps, a, sign, box, tol)

    results = list(mapper(job, ls + extra))
    rep = SearchReport()
    rep.notes.append(f"zeros with Im λ₀ < {delta:g} are excluded from n_m by the inset")
    zeros = []
    windings = {}
    trunc = {}
    for l, zs, w, r in results:
        rep.merge(r)
        if l in extra:
            trunc[l] = w
            continue
        windings[l] = w
        zeros.extend(zs)
        if w is not None and sum(z.multiplicity for z in zs) != w:
            rep.notes.append(f"mode {l}: winding {w} but {len(zs)} roots")
    zeros.sort(key=lambda z: (z.l, abs(z.lambda0), z.lambda0.real))
    partial = bool(rep.unresolved) or any(w is None for w in windings.values()) or any(
        sum(z.multiplicity for z in zeros if z.l == l) != w for l, w in windings.items())
    V = RadialPotential(((a, eps),), sign)
    return ResonanceSet(d, m, V, tuple(zeros), (box.x0, box.x1, box.y0, box.y1), tol,
                        partial, rep, windings, trunc)


def fit_order(count, window, n_samples: int = 50) -> float:
    """OLS slope of ``log count(r)`` against ``log r`` on log-spaced samples."""
    r_lo, r_hi = window
    if not 0 < r_lo < r_hi:
        raise DomainError("window must satisfy 0 < r_lo < r_hi")
    if count(r_lo) < 10:
        raise PreconditionError(
            f"only {count(r_lo)} zeros below r={r_lo:g}; enlarge r_max or lower the window")
    xs, ys = [], []
    for k in range(n_samples):
        r = r_lo * (r_hi / r_lo) ** (k / (n_samples - 1))
        xs.append(math.log(r))
        ys.append(math.log(count(r)))
    return ols(xs, ys)[0]


def order_of_growth(rs: ResonanceSet, window=(15.0, 40.0), n_samples: int = 50) -> float:
    return fit_order(rs.count, window, n_samples)

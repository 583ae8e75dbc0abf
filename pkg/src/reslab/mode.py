"""Partial waves, radial quadrature and the per-mode free kernels.

The free outgoing resolvent of ``-Δ - λ²`` restricted to angular momentum
``l`` has radial kernel

    G_ν(r, r'; λ) = (iπ/2) (r r')^{-(d-2)/2} J_ν(λ r_<) H1_ν(λ r_>),

and crossing one sheet changes it by the separable jump

    G_ν(r, r'; e^{iπ}λ) - G_ν(r, r'; λ) = -iπ (r r')^{-(d-2)/2} J_ν(λ r) J_ν(λ r').

At ``λ = iσ`` the first is ``I_ν(σ r_<) K_ν(σ r_>) (r r')^{-(d-2)/2} > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .logcover import LambdaPoint, base_displacement
from . import specfun

__all__ = [
    "ModeSpec", "make_mode", "QuadratureGrid", "gauss_grid", "composite_grid",
    "grid_for", "RadialPotential", "chi", "random_nested_pair", "green_kernel", "jump_kernel",
    "BesselTable", "bessel_table", "kernel_matrices",
]


@dataclass(frozen=True)
class ModeSpec:
    d: int
    l: int
    nu: int
    multiplicity: int


def _multiplicity(d, l):
    if d == 2:
        return 1 if l == 0 else 2
    # (2l+d-2)/(d-2) * C(l+d-3, d-3), exact in integers
    return (2 * l + d - 2) * math.comb(l + d - 3, d - 3) // (d - 2)


def make_mode(d: int, l: int) -> ModeSpec:
    if int(d) != d or d < 2 or d % 2:
        raise DomainError(f"dimension must be an even integer >= 2, got {d!r}")
    if int(l) != l or l < 0:
        raise DomainError(f"l must be a nonnegative integer, got {l!r}")
    d, l = int(d), int(l)
    return ModeSpec(d, l, l + (d - 2) // 2, _multiplicity(d, l))


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray
    a_max: float

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise DomainError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if self.nodes[0] <= 0 or self.nodes[-1] >= self.a_max or np.any(self.weights <= 0):
            raise DomainError("nodes must be interior and weights positive")

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_grid(a_max: float, n_nodes: int) -> QuadratureGrid:
    """Gauss-Legendre rule on ``[0, a_max]``."""
    if n_nodes < 2:
        raise DomainError("gauss_grid needs at least 2 nodes")
    if not a_max > 0:
        raise DomainError("a_max must be positive")
    x, w = np.polynomial.legendre.leggauss(int(n_nodes))
    return QuadratureGrid(0.5 * a_max * (x + 1.0), 0.5 * a_max * w, float(a_max))


def composite_grid(breaks, n_per_panel) -> QuadratureGrid:
    """Gauss-Legendre panels on ``[0, b_1], [b_1, b_2], ...``.

    ``n_per_panel`` is an int or one count per panel.
    """
    b = np.concatenate(([0.0], np.asarray(breaks, dtype=float)))
    if np.any(np.diff(b) <= 0):
        raise DomainError("breakpoints must be positive and increasing")
    counts = ([int(n_per_panel)] * (b.size - 1) if np.isscalar(n_per_panel)
              else [int(c) for c in n_per_panel])
    nodes, weights = [], []
    for lo, hi, n in zip(b[:-1], b[1:], counts):
        x, w = np.polynomial.legendre.leggauss(max(n, 2))
        nodes.append(lo + 0.5 * (hi - lo) * (x + 1.0))
        weights.append(0.5 * (hi - lo) * w)
    return QuadratureGrid(np.concatenate(nodes), np.concatenate(weights), float(b[-1]))


def grid_for(V: "RadialPotential", n_nodes: int = 64, min_panel: int = 8) -> QuadratureGrid:
    """Composite grid with a panel per step of ``V`` and about ``n_nodes`` nodes."""
    radii = [a for a, _ in V.steps] or [1.0]
    if len(radii) == 1:
        return gauss_grid(radii[0], n_nodes)
    lengths = np.diff(np.concatenate(([0.0], radii)))
    counts = [max(min_panel, int(round(n_nodes * h / radii[-1]))) for h in lengths]
    return composite_grid(radii, counts)


@dataclass(frozen=True)
class RadialPotential:
    """``V(r) = sign * sum_i eps_i [r <= a_i]`` with every ``eps_i > 0``."""

    steps: tuple = ()
    sign: int = 1

    def __post_init__(self):
        steps = tuple((float(a), float(e)) for a, e in self.steps)
        object.__setattr__(self, "steps", steps)
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")
        radii = [a for a, _ in steps]
        if any(a <= 0 or not math.isfinite(a) for a in radii):
            raise DomainError("step radii must be positive")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError("step radii must be strictly increasing")
        if any(not (e > 0) or not math.isfinite(e) for _, e in steps):
            raise DomainError("step heights must be positive")

    @property
    def support(self) -> float:
        return self.steps[-1][0] if self.steps else 0.0

    @property
    def sup_norm(self) -> float:
        return math.fsum(e for _, e in self.steps)

    @property
    def is_zero(self) -> bool:
        return not self.steps

    def abs_value(self, r):
        """``|V|`` at radii ``r`` (array or scalar)."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for a, e in self.steps:
            out = out + np.where(r <= a, e, 0.0)
        return out

    def value(self, r):
        return self.sign * self.abs_value(r)

    def with_sign(self, sign: int) -> "RadialPotential":
        return RadialPotential(self.steps, sign)

    def scaled(self, c: float) -> "RadialPotential":
        return RadialPotential(tuple((a, c * e) for a, e in self.steps), self.sign)

    def breakpoints(self):
        return [a for a, _ in self.steps]

    def dominated_by(self, other: "RadialPotential") -> bool:
        """``|self| <= |other|`` everywhere; checked on every piece of both step sets."""
        pts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        if not pts:
            return True
        probes = []
        lo = 0.0
        for p in pts:
            probes += [0.5 * (lo + p), p]
            lo = p
        probes.append(pts[-1] * 1.5 + 1.0)
        return bool(np.all(self.abs_value(probes) <= other.abs_value(probes)))


def chi(a: float = 1.0, eps: float = 1.0, sign: int = 1) -> RadialPotential:
    """``sign * eps`` times the indicator of the ball of radius ``a``."""
    return RadialPotential(((a, eps),), sign)


def random_nested_pair(rng, max_steps: int = 3, a_max: float = 1.0, eps_max: float = 1.5):
    """Random step potentials ``(V1, V2)`` with ``|V1| <= |V2|`` (both sign +1).

    ``V1`` is ``c |V2|`` cut off at a radius inside the support of ``V2``.
    """
    k = int(rng.integers(1, max_steps + 1))
    radii = np.sort(rng.uniform(0.2 * a_max, a_max, size=k))
    radii[-1] = a_max
    heights = rng.uniform(0.2, eps_max, size=k) / k
    V2 = RadialPotential(tuple(zip(radii.tolist(), heights.tolist())))
    cut = float(rng.uniform(0.3, 1.0)) * a_max
    c = float(rng.uniform(0.3, 1.0))
    steps = [(a, c * e) for a, e in V2.steps if a < cut]
    # the step straddling ``cut`` keeps its height up to ``cut``
    steps.append((cut, c * math.fsum(e for a, e in V2.steps if a >= cut)))
    V1 = RadialPotential(tuple(steps))
    return V1, V2


# --- pointwise kernels --------------------------------------------------

def _weight(mode, r, rp):
    return (r * rp) ** (-(mode.d - 2) / 2.0)


def green_kernel(mode: ModeSpec, r: float, rp: float, lam: LambdaPoint) -> complex:
    """Free radial Green's kernel of the mode at ``lam`` on the cover."""
    if not (r > 0 and rp > 0):
        raise DomainError("radii must be positive")
    lo, hi = (r, rp) if r <= rp else (rp, r)
    return (0.5j * math.pi) * _weight(mode, r, rp) * (
        specfun.bessel_j_on_cover(mode.nu, lam, lo) * specfun.hankel1_on_cover(mode.nu, lam, hi))


def jump_kernel(mode: ModeSpec, r: float, rp: float, lam: LambdaPoint) -> complex:
    """``G(e^{iπ}lam) - G(lam)``: the separable one-sheet jump."""
    if not (r > 0 and rp > 0):
        raise DomainError("radii must be positive")
    return (-1j * math.pi) * _weight(mode, r, rp) * (
        specfun.bessel_j_on_cover(mode.nu, lam, r) * specfun.bessel_j_on_cover(mode.nu, lam, rp))


# --- vectorized assembly ------------------------------------------------

@dataclass(frozen=True, eq=False)
class BesselTable:
    """Scaled ``J``, ``H1`` at ``base * r_i`` for all grid nodes and orders ``<= nu_max``.

    ``m`` is the sheet displacement of ``lam``; continuation is applied in
    ``kernel_matrices``.
    """

    lam: LambdaPoint
    m: int
    nu_max: int
    jhat: np.ndarray = field(repr=False)
    hhat: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)


def bessel_table(lam: LambdaPoint, grid: QuadratureGrid, nu_max: int) -> BesselTable:
    m, theta = base_displacement(lam)
    z = lam.modulus * grid.nodes * complex(math.cos(theta), math.sin(theta))
    if theta == 0.0:
        z = (lam.modulus * grid.nodes).astype(complex)
    jh, hh, s = specfun.jh_scaled_many(z, int(nu_max))
    return BesselTable(lam, m, int(nu_max), jh, hh, s)


def kernel_matrices(mode: ModeSpec, V: RadialPotential, grid: QuadratureGrid,
                    table: BesselTable):
    """Nyström matrices ``(K, T)`` of ``|V|^{1/2} R0 |V|^{1/2}`` and ``|V|^{1/2} T |V|^{1/2}``.

    Entries carry ``sqrt(w_i w_j) (r_i r_j)^{(d-1)/2}`` so that matrix
    eigenvalues approximate those on ``L²((0,a), r^{d-1} dr)``; ``T`` is the
    jump divided by ``i``, so ``R0`` on the next sheet is ``K + i T``.
    """
    if grid.a_max < V.support * (1 - 1e-14):
        raise DomainError("grid does not cover the support of V")
    nu = mode.nu
    if nu > table.nu_max:
        raise DomainError("Bessel table too short for this mode")
    n = grid.size
    if V.is_zero:
        z = np.zeros((n, n), dtype=complex)
        return z, z.copy()
    r = grid.nodes
    amp = np.sqrt(grid.weights * V.abs_value(r)) * np.sqrt(r)
    jh = table.jhat[:, nu]
    hh = table.hhat[:, nu]
    s = table.s[:, nu]
    m = table.m
    lr = np.log(r)
    # J(z_i) H^{[m]}(z_j) for i <= j is jh_i (hh_j - 2m jh_j e^{2 s_j}) e^{s_i - s_j};
    # the parities (-1)^{nu m} of the two factors cancel.
    ej = np.exp(s)
    jfull = jh * ej
    hcont = hh - 2.0 * m * jh * ej * ej if m else hh
    ratio = np.exp(nu * (lr[:, None] - lr[None, :]))  # (r_i/r_j)^nu
    upper = jh[:, None] * hcont[None, :] * ratio
    ii, jj = np.triu_indices(n)
    gm = np.empty((n, n), dtype=complex)
    gm[ii, jj] = upper[ii, jj]
    gm[jj, ii] = upper[ii, jj]
    K = (0.5j * math.pi) * amp[:, None] * amp[None, :] * gm
    T = (-math.pi) * np.outer(amp * jfull, amp * jfull)
    return K, T

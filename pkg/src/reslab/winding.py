"""Argument-principle machinery: phase tracking along segments and boxes.

``PhaseTracker`` accumulates ``Δ arg f`` along straight segments by dyadic
refinement, accepting a piece once both of its halves turn by less than
``max_turn``.  Segment results and point values are cached, so the boxes
of a bisection tree share the work done on common edges.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NumericalError

__all__ = ["NearZeroError", "PhaseTracker", "Box", "box_winding", "sector_polygon"]

TWO_PI = 2.0 * math.pi


class NearZeroError(NumericalError):
    """A zero of ``f`` lies (numerically) on the contour."""


@dataclass(frozen=True)
class Box:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def diameter(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, z: complex) -> bool:
        return self.x0 <= z.real <= self.x1 and self.y0 <= z.imag <= self.y1

    def corners(self):
        return (complex(self.x0, self.y0), complex(self.x1, self.y0),
                complex(self.x1, self.y1), complex(self.x0, self.y1))

    def split(self, fx: float = 0.5, fy: float = 0.5):
        # exact midpoints so child edges reuse the parent's cached segments
        xm = 0.5 * (self.x0 + self.x1) if fx == 0.5 else self.x0 + fx * (self.x1 - self.x0)
        ym = 0.5 * (self.y0 + self.y1) if fy == 0.5 else self.y0 + fy * (self.y1 - self.y0)
        return (Box(self.x0, xm, self.y0, ym), Box(xm, self.x1, self.y0, ym),
                Box(xm, self.x1, ym, self.y1), Box(self.x0, xm, ym, self.y1))


class PhaseTracker:
    """Cached phase accumulation of a nonvanishing function along segments.

    ``f`` returns a complex number whose argument is that of the analytic
    function of interest (any positive normalization is allowed).
    """

    def __init__(self, f, h_max: float, h_min: float = 1e-12, max_turn: float = math.pi / 4,
                 tiny: float = 1e-300):
        self.f = f
        self.h_max = float(h_max)
        self.h_min = float(h_min)
        self.max_turn = float(max_turn)
        self.tiny = tiny
        self._vals = {}
        self._segs = {}
        self.evaluations = 0

    def value(self, z: complex) -> complex:
        v = self._vals.get(z)
        if v is None:
            v = complex(self.f(z))
            self.evaluations += 1
            if not (math.isfinite(v.real) and math.isfinite(v.imag)) or abs(v) <= self.tiny:
                raise NearZeroError(f"f vanishes or is not finite at {z!r}")
            self._vals[z] = v
        return v

    def _raw_phase(self, a: complex, b: complex) -> float:
        key = (a, b)
        got = self._segs.get(key)
        if got is not None:
            return got
        rev = self._segs.get((b, a))
        if rev is not None:
            return -rev
        length = abs(b - a)
        fa = self.value(a)
        fb = self.value(b)
        mid = 0.5 * (a + b)
        if length > self.h_max:
            ph = self._raw_phase(a, mid) + self._raw_phase(mid, b)
        else:
            fm = self.value(mid)
            d1 = cmath.phase(fm / fa)
            d2 = cmath.phase(fb / fm)
            if abs(d1) < self.max_turn and abs(d2) < self.max_turn:
                ph = d1 + d2
            else:
                if length < self.h_min:
                    raise NearZeroError(
                        f"phase not resolved on a segment of length {length:.3e} near {mid!r}")
                ph = self._raw_phase(a, mid) + self._raw_phase(mid, b)
        self._segs[key] = ph
        return ph

    def segment_phase(self, a: complex, b: complex) -> float:
        return self._raw_phase(complex(a), complex(b))

    def contour_phase(self, points) -> float:
        """Total phase change along a closed polygon (last point joins the first)."""
        pts = list(points)
        return math.fsum(self.segment_phase(p, q) for p, q in zip(pts, pts[1:] + pts[:1]))

    def winding(self, points) -> int:
        tot = self.contour_phase(points)
        w = round(tot / TWO_PI)
        if abs(tot - w * TWO_PI) > 1e-3:
            raise NumericalError(f"phase total {tot:.6g} is not a multiple of 2π")
        return int(w)

    def box_winding(self, box: Box) -> int:
        return self.winding(box.corners())

    def max_abs_on_box(self, box: Box) -> float:
        """Largest ``|f|`` over the corners and edge midpoints of ``box``."""
        c = box.corners()
        pts = list(c) + [0.5 * (p + q) for p, q in zip(c, c[1:] + c[:1])]
        return max(abs(self.value(z)) for z in pts)


def box_winding(f, box: Box, h_max: float, h_min: float = 1e-12) -> int:
    """Winding number of ``f`` around ``box`` (counterclockwise)."""
    return PhaseTracker(f, h_max, h_min).box_winding(box)


def sector_polygon(r_out: float, delta: float, n_arc: int = 64, r_in: float = 0.0,
                   theta_lo: float = 0.0, theta_hi: float = math.pi):
    """Counterclockwise polygon around ``{r_in <= |z| <= r_out, Im z >= delta}``
    cut to ``theta_lo <= arg z <= theta_hi``.

    The outer arc is circumscribed, so the polygon contains that part of the
    true region; the inner arc, if any, is inscribed.
    """
    def ends(r):
        a0 = math.asin(min(1.0, delta / r))
        lo = max(theta_lo, a0)
        hi = min(theta_hi, math.pi - a0)
        return lo, hi, lo == a0, hi == math.pi - a0

    def arc(r, lo, hi, lo_line, hi_line):
        step = (hi - lo) / n_arc
        pts = [cmath.rect(r, lo + k * step) for k in range(n_arc)] + [cmath.rect(r, hi)]
        x = math.sqrt(max(r * r - delta * delta, 0.0))
        if lo_line:
            pts[0] = complex(x, delta)
        if hi_line:
            pts[-1] = complex(-x, delta)
        return pts

    lo, hi, lo_line, hi_line = ends(r_out)
    big = r_out / math.cos(0.5 * (hi - lo) / n_arc)
    outer = arc(big, lo, hi, lo_line, hi_line)
    if r_in <= 0.0:
        # an angular cut ends on the line Im = delta, where its ray crosses it
        tail = []
        if not hi_line:
            tail.append(complex(delta / math.tan(hi), delta))
        if not lo_line:
            tail.append(complex(delta / math.tan(lo), delta))
        return outer + tail
    ilo, ihi, ilo_line, ihi_line = ends(r_in)
    inner = arc(r_in, ilo, ihi, ilo_line, ihi_line)
    return outer + inner[::-1]

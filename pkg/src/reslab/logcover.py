"""Points on the logarithmic cover of C \\ {0}.

A point keeps its argument unreduced, so ``(r, theta)`` and
``(r, theta + 2*pi)`` are distinct points over the same complex number.
Sheet ``m`` is the open strip ``m*pi < arg < (m+1)*pi``; sheet 0 is the
physical half plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "LambdaPoint",
    "SheetIndex",
    "make_lambda",
    "sheet_of",
    "rotate",
    "project",
    "BOUNDARY_TOL",
]

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class LambdaPoint:
    modulus: float
    arg: float

    def __post_init__(self):
        if not (self.modulus > 0.0) or not math.isfinite(self.modulus):
            raise DomainError(f"modulus must be positive and finite, got {self.modulus!r}")
        if not math.isfinite(self.arg):
            raise DomainError(f"arg must be finite, got {self.arg!r}")

    @classmethod
    def on_imaginary_axis(cls, sigma: float) -> "LambdaPoint":
        """The point ``i*sigma`` of the physical sheet."""
        return cls(float(sigma), math.pi / 2)

    @classmethod
    def from_complex(cls, z: complex, turns: int = 0) -> "LambdaPoint":
        """Lift ``z`` with its principal argument, then rotate by ``turns*pi``."""
        z = complex(z)
        if z == 0:
            raise DomainError("0 has no lift to the logarithmic cover")
        return cls(abs(z), math.atan2(z.imag, z.real) + turns * math.pi)

    def __complex__(self) -> complex:
        return project(self)


@dataclass(frozen=True)
class SheetIndex:
    m: int
    on_boundary: bool


def make_lambda(modulus: float, arg: float) -> LambdaPoint:
    return LambdaPoint(float(modulus), float(arg))


def sheet_of(p: LambdaPoint) -> SheetIndex:
    q = p.arg / math.pi
    k = round(q)
    if abs(q - k) <= BOUNDARY_TOL * max(1.0, abs(q)):
        return SheetIndex(int(k), True)
    return SheetIndex(math.floor(q), False)


def rotate(p: LambdaPoint, k: int) -> LambdaPoint:
    """Multiply by ``exp(i*k*pi)`` on the cover."""
    return LambdaPoint(p.modulus, p.arg + k * math.pi)


def project(p: LambdaPoint) -> complex:
    return complex(p.modulus * math.cos(p.arg), p.modulus * math.sin(p.arg))


def base_displacement(p: LambdaPoint) -> tuple[int, float]:
    """Split ``p.arg`` as ``m*pi + theta`` with ``theta`` in ``[0, pi)``.

    The base direction lies in the closed upper half plane, where the
    principal-branch Hankel function is evaluated without cancellation.
    Arguments within ``BOUNDARY_TOL`` of a multiple of pi snap to it.
    """
    q = p.arg / math.pi
    k = round(q)
    if abs(q - k) <= BOUNDARY_TOL * max(1.0, abs(q)):
        return int(k), 0.0
    m = math.floor(q)
    return m, p.arg - m * math.pi

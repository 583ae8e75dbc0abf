"""Integer-order Bessel functions on the logarithmic cover.

Principal-branch ``J_n``, ``Y_n``, ``H1_n`` plus their continuation to any
sheet by the monodromy relations

    J_n(e^{imπ} z) = (-1)^{nm} J_n(z)
    H1_n(e^{imπ} z) = (-1)^{nm} (H1_n(z) - 2m J_n(z))

and a log-scaled ``I_n`` for large orders.  The hot kernels come from a
compiled extension when available; set ``RESLAB_PURE_PYTHON=1`` to force
the pure-Python twin.
"""
import math
import os
import warnings
from dataclasses import dataclass

from ..errors import DomainError, UncertifiedAccuracyWarning
from ..logcover import LambdaPoint, base_displacement
from . import _pykernels

_kern = _pykernels
if os.environ.get("RESLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _kern
    except ImportError:  # extension not built
        _kern = _pykernels

BACKEND = _kern.BACKEND
jh_scaled = _kern.jh_scaled
jh_scaled_many = _kern.jh_scaled_many
matching_kernel = _kern.matching_det
jacobi_eigh = _kern.jacobi_eigh

# certified domain of the principal-branch evaluators
MAX_ORDER = 60
MAX_MODULUS = 100.0

__all__ = [
    "BACKEND", "LogScaledReal", "available_backends",
    "bessel_j", "bessel_y", "hankel1",
    "bessel_j_prime", "bessel_y_prime", "hankel1_prime",
    "bessel_j_on_cover", "hankel1_on_cover", "hankel1_half_turn",
    "log_bessel_i", "jh_scaled", "jh_scaled_many", "matching_kernel",
    "jacobi_eigh",
]


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out


@dataclass(frozen=True)
class LogScaledReal:
    """The real number ``sign * exp(log_abs)``."""

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign == 0 and self.log_abs != -math.inf:
            object.__setattr__(self, "log_abs", -math.inf)

    @classmethod
    def from_float(cls, x):
        if x == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def __float__(self):
        return self.sign * math.exp(self.log_abs) if self.sign else 0.0


def _check_order(n):
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a nonnegative integer, got {n!r}")
    return int(n)


def _flag(n, z):
    if n > MAX_ORDER or abs(z) > MAX_MODULUS:
        warnings.warn(
            f"accuracy not certified for n={n}, |z|={abs(z):.3g}",
            UncertifiedAccuracyWarning,
            stacklevel=3,
        )


def _unscale(hat, s):
    # hat * exp(s) without spurious overflow of exp(s) alone
    if hat == 0:
        return 0j
    return complex(hat) * math.exp(s) if abs(s) < 700 else complex(
        math.exp(s + math.log(abs(hat)))) * (hat / abs(hat))


def bessel_j(n, z):
    """``J_n(z)`` on the principal branch."""
    n = _check_order(n)
    z = complex(z)
    _flag(n, z)
    if z == 0:
        return 1.0 + 0j if n == 0 else 0j
    jh, _hh, s = jh_scaled(z, n)
    return _unscale(jh[n], s[n])


def hankel1(n, z):
    """``H1_n(z) = J_n(z) + i Y_n(z)`` on the principal branch."""
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        raise DomainError("H1_n has a singularity at 0")
    _flag(n, z)
    _jhat, hh, s = jh_scaled(z, n)
    return _unscale(hh[n], -s[n])


def bessel_y(n, z):
    """``Y_n(z)`` on the principal branch."""
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        raise DomainError("Y_n has a logarithmic singularity at 0")
    _flag(n, z)
    jh, hh, s = jh_scaled(z, n)
    return (_unscale(hh[n], -s[n]) - _unscale(jh[n], s[n])) / 1j


def _prime(kind, n, z):
    # C_n' = C_{n-1} - (n/z) C_n ;  C_0' = -C_1
    fn = {"j": bessel_j, "y": bessel_y, "h": hankel1}[kind]
    if n == 0:
        return -fn(1, z)
    return fn(n - 1, z) - (n / z) * fn(n, z)


def bessel_j_prime(n, z):
    """``J_n'(z)`` by the order recurrence."""
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        return {0: 0j, 1: 0.5 + 0j}.get(n, 0j)
    return _prime("j", n, z)


def bessel_y_prime(n, z):
    """``Y_n'(z)`` by the order recurrence."""
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        raise DomainError("Y_n' is singular at 0")
    return _prime("y", n, z)


def hankel1_prime(n, z):
    """``H1_n'(z)`` by the order recurrence."""
    n = _check_order(n)
    z = complex(z)
    if z == 0:
        raise DomainError("H1_n' is singular at 0")
    return _prime("h", n, z)


def _base(p, scale):
    if not isinstance(p, LambdaPoint):
        raise TypeError("expected a LambdaPoint")
    if not (scale > 0):
        raise DomainError("scale must be positive")
    m, theta = base_displacement(p)
    r = p.modulus * scale
    z = complex(r * math.cos(theta), r * math.sin(theta))
    if theta == 0.0:
        z = complex(r, 0.0)
    return m, z


def _parity(k):
    return -1.0 if k % 2 else 1.0


def bessel_j_on_cover(n, p, scale=1.0):
    """``J_n(scale * lam)`` for ``lam`` on the cover (any integer ``n``)."""
    n = int(n)
    m, z = _base(p, scale)
    sgn = _parity(n) if n < 0 else 1.0
    return sgn * _parity(abs(n) * m) * bessel_j(abs(n), z)


def hankel1_on_cover(n, p, scale=1.0):
    """``H1_n(scale * lam)`` continued to the sheet of ``lam`` (any integer ``n``)."""
    n = int(n)
    m, z = _base(p, scale)
    k = abs(n)
    sgn = _parity(n) if n < 0 else 1.0
    return sgn * _parity(k * m) * (hankel1(k, z) - 2.0 * m * bessel_j(k, z))


def hankel1_half_turn(n, z):
    """``H1_n(e^{iπ} z)`` from the single-step relations ``e^{iπn}(-J_n + i Y_n)``."""
    n = _check_order(n)
    return _parity(n) * (-bessel_j(n, z) + 1j * bessel_y(n, z))


def log_bessel_i(n, x):
    """``log I_n(x)`` for ``x > 0`` by a log-sum-exp of the ascending series."""
    n = _check_order(n)
    x = float(x)
    if not (x > 0) or not math.isfinite(x):
        raise DomainError("log_bessel_i requires finite x > 0")
    lh = math.log(0.5 * x)
    # terms t_k = (2k+n) log(x/2) - lgamma(k+1) - lgamma(n+k+1), peak near
    # the root of k(n+k) = (x/2)^2
    h2 = 0.25 * x * x
    kpk = int(0.5 * (-n + math.sqrt(n * n + 4.0 * h2)))

    def term(k):
        return (2 * k + n) * lh - math.lgamma(k + 1.0) - math.lgamma(n + k + 1.0)

    tmax = term(kpk)
    acc = 0.0
    k = kpk
    while True:
        t = term(k) - tmax
        acc += math.exp(t)
        if t < -40.0:
            break
        k += 1
    k = kpk - 1
    while k >= 0:
        t = term(k) - tmax
        acc += math.exp(t)
        if t < -40.0:
            break
        k -= 1
    return LogScaledReal(tmax + math.log(acc), 1)

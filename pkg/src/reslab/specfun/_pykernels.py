"""Pure-Python hot kernels.

Reference implementation of the compiled core in ``_ckernels.pyx``; both
modules expose the same functions with the same numerics, so results agree
to rounding.  Selected at import by ``reslab.specfun`` when the extension is
missing or ``RESLAB_PURE_PYTHON`` is set.

Scaled Bessel arrays
--------------------
For ``z != 0`` and order ``n`` let ``s_n = n*log(|z|/2) - lgamma(n+1)``.
``jh_scaled`` returns ``jhat_n = J_n(z) exp(-s_n)`` and
``hhat_n = H1_n(z) exp(s_n)``.  Both stay O(1) times ``exp(|Im z|)`` for
all orders, so products ``J_n(z1) H1_n(z2)`` of points on one ray are
formed without overflow as ``jhat(z1) hhat(z2) (|z1|/|z2|)**n``.
"""
import cmath
import math

import numpy as np

BACKEND = "python"

_LN_RESCALE = 250.0 * math.log(10.0)
_RESCALE = 1e-250
_BIG = 1e250
_EULER = 0.57721566490153286061
_TWO_OVER_PI = 2.0 / math.pi
_SERIES_RADIUS = 2.0
_CF2_MAXIT = 20000
_EPS = 1e-16


def _scale_exponents(az, nmax):
    s = np.empty(nmax + 1)
    la = math.log(0.5 * az)
    for n in range(nmax + 1):
        s[n] = n * la - math.lgamma(n + 1.0)
    return s


def _jhat_series(n, z, az):
    # J_n(z) exp(-s_n) = (z/|z|)^n * sum_k (-z^2/4)^k / (k! (n+1)_k)
    q = -0.25 * z * z
    term = 1.0 + 0j
    total = 1.0 + 0j
    k = 0
    while True:
        k += 1
        term = term * q / (k * (n + k))
        total += term
        if abs(term) <= _EPS * abs(total):
            break
        if k > 500:
            break
    if n == 0:
        return total
    return total * (z / az) ** n


def _jhat_miller(z, az, n_mil, s):
    """J_n(z) exp(-s_n), n <= n_mil, by normalized backward recurrence (Im z >= 0)."""
    n_top = max(n_mil, int(math.ceil(az)))
    start = n_top + int(math.sqrt(160.0 * n_top)) + 20
    stored = [0j] * (n_mil + 1)
    counts = [0] * (n_mil + 1)
    f_next = 0j
    f = 1e-280 + 0j
    rescales = 0
    # normalization: exp(-iz) = J_0 + 2 sum_{n>=1} (-i)^n J_n
    norm = 0j
    phase = [1 + 0j, -1j, -1 + 0j, 1j]
    for n in range(start, 0, -1):
        if n <= n_mil:
            stored[n] = f
            counts[n] = rescales
        norm += 2.0 * phase[n % 4] * f
        f_prev = (2.0 * n / z) * f - f_next
        f_next = f
        f = f_prev
        if abs(f) > _BIG:
            f *= _RESCALE
            f_next *= _RESCALE
            norm *= _RESCALE
            rescales += 1
    stored[0] = f
    counts[0] = rescales
    norm += f
    # J_n = f_n * 10^(-250 (K - k_n)) * exp(-iz) / norm
    log_c = -1j * z - cmath.log(norm)
    out = np.empty(n_mil + 1, dtype=complex)
    for n in range(n_mil + 1):
        fn = stored[n]
        if fn == 0:
            out[n] = 0
            continue
        e = cmath.log(fn) + log_c - (rescales - counts[n]) * _LN_RESCALE - s[n]
        out[n] = cmath.exp(e) if e.real > -745.0 else 0j
    return out


def _y01_series(z):
    """Y_0(z), Y_1(z) from the ascending series (principal branch)."""
    q = -0.25 * z * z
    lg = cmath.log(0.5 * z)
    # J_0, J_1
    j0 = 1.0 + 0j
    t = 1.0 + 0j
    s0 = 0j          # sum_{k>=1} H_k q^k/(k!)^2
    harm = 0.0
    k = 0
    while True:
        k += 1
        t = t * q / (k * k)
        harm += 1.0 / k
        j0 += t
        s0 += harm * t
        if abs(t) * max(1.0, harm) <= _EPS * max(abs(j0), 1e-300) and k > 2:
            break
    y0 = _TWO_OVER_PI * ((lg + _EULER) * j0 - s0)
    # Y_1 = -2/(pi z) + (2/pi) ln(z/2) J_1 - (1/pi)(z/2) sum_k [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    t = 1.0 + 0j
    j1s = 1.0 + 0j
    psis = (-_EULER) + (1.0 - _EULER)
    acc = psis * t
    hk = 0.0
    k = 0
    while True:
        k += 1
        t = t * q / (k * (k + 1))
        hk += 1.0 / k
        psis = (-_EULER + hk) + (-_EULER + hk + 1.0 / (k + 1))
        j1s += t
        acc += psis * t
        if abs(t) * max(1.0, abs(psis)) <= _EPS * max(abs(j1s), 1e-300) and k > 2:
            break
    j1 = 0.5 * z * j1s
    y1 = -_TWO_OVER_PI / z + _TWO_OVER_PI * lg * j1 - 0.5 * z * acc / math.pi
    return j0, j1, y0, y1


def k01_cf2(w):
    """K_0(w), K_1(w) for Re w >= 0, |w| >= 2 (Steed/Temme continued fraction)."""
    b = 2.0 * (1.0 + w)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0j
    q2 = 1.0 + 0j
    a1 = 0.25
    q = a1 + 0j
    c = a1 + 0j
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _CF2_MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels) < _EPS * abs(s):
            break
    h = a1 * h
    k0 = cmath.sqrt(math.pi / (2.0 * w)) * cmath.exp(-w) / s
    k1 = k0 * (w + 0.5 - h) / w
    return k0, k1


def _upper_arrays(z, nmax):
    """(jhat, hhat, s) for Im z >= 0, z != 0."""
    az = abs(z)
    s = _scale_exponents(az, nmax)
    jhat = np.empty(nmax + 1, dtype=complex)
    if az <= _SERIES_RADIUS:
        for n in range(nmax + 1):
            jhat[n] = _jhat_series(n, z, az)
        j0, j1, y0, y1 = _y01_series(z)
        h0 = j0 + 1j * y0
        h1 = j1 + 1j * y1
    else:
        n_mil = min(nmax, int(0.5 * az * az))
        jhat[: n_mil + 1] = _jhat_miller(z, az, n_mil, s)
        for n in range(n_mil + 1, nmax + 1):
            jhat[n] = _jhat_series(n, z, az)
        k0, k1 = k01_cf2(-1j * z)
        h0 = -1j * _TWO_OVER_PI * k0
        h1 = -_TWO_OVER_PI * k1
    hhat = np.empty(nmax + 1, dtype=complex)
    half = 0.5 * az
    hhat[0] = h0
    if nmax >= 1:
        hhat[1] = h1 * half
    for n in range(1, nmax):
        hhat[n + 1] = (2.0 * n / z) * (half / (n + 1)) * hhat[n] - hhat[n - 1] * (
            half * half / (n * (n + 1.0))
        )
    return jhat, hhat, s


def jh_scaled(z, nmax):
    """Scaled ``J_n`` and ``H1_n`` for ``n = 0..nmax`` at ``z != 0``.

    Returns ``(jhat, hhat, s)``; see the module docstring.
    """
    z = complex(z)
    nmax = int(nmax)
    if z == 0:
        raise ValueError("jh_scaled requires z != 0")
    if not cmath.isfinite(z):
        nan = np.full(nmax + 1, complex("nan"))
        return nan, nan.copy(), np.zeros(nmax + 1)
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    if z.imag >= 0.0:
        return _upper_arrays(z, nmax)
    # lower half plane: reflect, J(zbar)=conj J(z), Y(zbar)=conj Y(z)
    jb, hb, s = _upper_arrays(z.conjugate(), nmax)
    e2s = np.exp(np.minimum(2.0 * s, 700.0))
    yb = (hb - jb * e2s) / 1j          # Y(zbar) exp(s)
    jhat = np.conj(jb)
    hhat = jhat * e2s + 1j * np.conj(yb)
    return jhat, hhat, s


def jh_scaled_many(z, nmax):
    """Row-wise ``jh_scaled`` over a 1-D array of points."""
    z = np.asarray(z, dtype=complex).ravel()
    nmax = int(nmax)
    jh = np.empty((z.size, nmax + 1), dtype=complex)
    hh = np.empty_like(jh)
    s = np.empty((z.size, nmax + 1))
    for i, zi in enumerate(z):
        jh[i], hh[i], s[i] = jh_scaled(zi, nmax)
    return jh, hh, s


def matching_det(nu, lam0, m, eps, a, sign):
    """Normalized log-derivative matching determinant for one partial wave.

    Returns ``(dwin, logfac)``: ``dwin`` has modulus <= 1, and
    ``dwin * exp(logfac)`` is analytic in ``lam0`` (even in the interior
    wavenumber), with the same zeros as the matching determinant.
    """
    lam0 = complex(lam0)
    if lam0 == 0 or not cmath.isfinite(lam0):
        return complex("nan"), 0.0
    mu = cmath.sqrt(lam0 * lam0 - sign * eps)
    if mu == 0:
        return complex("nan"), 0.0
    zi = mu * a
    ze = lam0 * a
    nmax = nu + 1
    ji, _hi, _si = jh_scaled(zi, nmax)
    je, he, se = jh_scaled(ze, nmax)
    azi = abs(zi)
    aze = abs(ze)
    # interior J_nu and J_nu' in exp(-s_nu) scaling
    if nu == 0:
        jv = ji[0]
        jp = -ji[1] * (0.5 * azi)
    else:
        jv = ji[nu]
        jp = ji[nu - 1] * (2.0 * nu / azi) - (nu / zi) * ji[nu]
    # exterior continued Hankel (-1)^{nu m} (H - 2m J) in exp(+s_nu) scaling
    e2 = math.exp(min(2.0 * se[nu], 700.0))
    par = -1.0 if (nu * m) % 2 else 1.0
    if nu == 0:
        hv = he[0] - 2.0 * m * je[0]
        # H_0' = -H_1, J_0' = -J_1 with s_1 = log(|z|/2)
        hp = -he[1] * (2.0 / aze) + 2.0 * m * je[1] * (0.5 * aze)
    else:
        hv = he[nu] - 2.0 * m * je[nu] * e2
        hp_h = he[nu - 1] * (aze / (2.0 * nu)) - (nu / ze) * he[nu]
        jp_e = je[nu - 1] * (2.0 * nu / aze) - (nu / ze) * je[nu]
        hp = hp_h - 2.0 * m * jp_e * e2
    hv *= par
    hp *= par
    dhat = mu * jp * hv - lam0 * jv * hp
    nrm = (abs(jv) + abs(jp)) * (abs(hv) + abs(hp))
    if nrm == 0.0 or not math.isfinite(nrm):
        return complex("nan"), 0.0
    ph = 1.0 + 0j
    if nu:
        amu = abs(mu)
        ph = ((amu / mu) * (lam0 / abs(lam0))) ** nu if amu > 0 else 1.0
    return dhat * ph / nrm, math.log(nrm)


def jacobi_eigh(a, tol=1e-15, max_sweeps=60):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ``a @ v[:, k] = w[k] * v[:, k]``, unsorted.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = np.sqrt(np.sum(a * a))
    if scale == 0.0:
        return np.zeros(n), v
    for _sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * min(abs(app), abs(aqq)):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    return a.diagonal().copy(), v

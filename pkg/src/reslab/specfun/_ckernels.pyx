# cython: language_level=3
"""Compiled hot kernels; same contract and numerics as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, sqrt, fabs, lgamma, ceil, copysign, pi, isfinite, NAN

cnp.import_array()

BACKEND = "cython"

cdef double _LN_RESCALE = 250.0 * log(10.0)
cdef double _RESCALE = 1e-250
cdef double _BIG = 1e250
cdef double _EULER = 0.57721566490153286061
cdef double _TWO_OVER_PI = 2.0 / pi
cdef double _SERIES_RADIUS = 2.0
cdef int _CF2_MAXIT = 20000
cdef double _EPS = 1e-16

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double complex csqrt(double complex)
    double cabs(double complex)
    double complex conj(double complex)
    double complex cpow(double complex, double complex)


cdef extern from "stdlib.h" nogil:
    void* PyMem_Malloc_nogil "malloc"(size_t)
    void PyMem_Free_nogil "free"(void*)


cdef inline double complex _ipow(double complex x, int n) noexcept nogil:
    cdef double complex r = 1.0
    while n > 0:
        if n & 1:
            r = r * x
        x = x * x
        n >>= 1
    return r


cdef double complex _jhat_series(int n, double complex z, double az) noexcept nogil:
    cdef double complex q = -0.25 * z * z
    cdef double complex term = 1.0
    cdef double complex total = 1.0
    cdef int k = 0
    while True:
        k += 1
        term = term * q / (k * (n + k))
        total = total + term
        if cabs(term) <= _EPS * cabs(total):
            break
        if k > 500:
            break
    if n == 0:
        return total
    return total * _ipow(z / az, n)


cdef void _jhat_miller(double complex z, double az, int n_mil, double* s,
                       double complex* out) noexcept nogil:
    cdef int n_top = n_mil
    if <int>ceil(az) > n_top:
        n_top = <int>ceil(az)
    cdef int start = n_top + <int>sqrt(160.0 * n_top) + 20
    cdef double complex f_next = 0.0
    cdef double complex f = 1e-280
    cdef double complex f_prev, norm = 0.0, fn, e, log_c
    cdef int rescales = 0
    cdef int n
    cdef double complex phase[4]
    phase[0] = 1.0
    phase[1] = -1j
    phase[2] = -1.0
    phase[3] = 1j
    # reuse out[] for stored values and a small count array on the heap
    cdef int* counts = <int*>PyMem_Malloc_nogil((n_mil + 1) * sizeof(int))
    for n in range(start, 0, -1):
        if n <= n_mil:
            out[n] = f
            counts[n] = rescales
        norm = norm + 2.0 * phase[n % 4] * f
        f_prev = (2.0 * n / z) * f - f_next
        f_next = f
        f = f_prev
        if cabs(f) > _BIG:
            f = f * _RESCALE
            f_next = f_next * _RESCALE
            norm = norm * _RESCALE
            rescales += 1
    out[0] = f
    counts[0] = rescales
    norm = norm + f
    log_c = -1j * z - clog(norm)
    for n in range(n_mil + 1):
        fn = out[n]
        if fn == 0:
            out[n] = 0
            continue
        e = clog(fn) + log_c - (rescales - counts[n]) * _LN_RESCALE - s[n]
        if e.real > -745.0:
            out[n] = cexp(e)
        else:
            out[n] = 0
    PyMem_Free_nogil(counts)


cdef void _y01_series(double complex z, double complex* res) noexcept nogil:
    cdef double complex q = -0.25 * z * z
    cdef double complex lg = clog(0.5 * z)
    cdef double complex j0 = 1.0, t = 1.0, s0 = 0.0
    cdef double harm = 0.0, hk = 0.0, psis
    cdef int k = 0
    while True:
        k += 1
        t = t * q / (k * k)
        harm += 1.0 / k
        j0 = j0 + t
        s0 = s0 + harm * t
        if cabs(t) * (harm if harm > 1.0 else 1.0) <= _EPS * (cabs(j0) if cabs(j0) > 1e-300 else 1e-300) and k > 2:
            break
    cdef double complex y0 = _TWO_OVER_PI * ((lg + _EULER) * j0 - s0)
    t = 1.0
    cdef double complex j1s = 1.0
    psis = (-_EULER) + (1.0 - _EULER)
    cdef double complex acc = psis * t
    k = 0
    while True:
        k += 1
        t = t * q / (k * (k + 1))
        hk += 1.0 / k
        psis = (-_EULER + hk) + (-_EULER + hk + 1.0 / (k + 1))
        j1s = j1s + t
        acc = acc + psis * t
        if cabs(t) * (fabs(psis) if fabs(psis) > 1.0 else 1.0) <= _EPS * (cabs(j1s) if cabs(j1s) > 1e-300 else 1e-300) and k > 2:
            break
    cdef double complex j1 = 0.5 * z * j1s
    cdef double complex y1 = -_TWO_OVER_PI / z + _TWO_OVER_PI * lg * j1 - 0.5 * z * acc / pi
    res[0] = j0
    res[1] = j1
    res[2] = y0
    res[3] = y1


cdef void _k01(double complex w, double complex* res) noexcept nogil:
    cdef double complex b = 2.0 * (1.0 + w)
    cdef double complex d = 1.0 / b
    cdef double complex h = d, delh = d
    cdef double complex q1 = 0.0, q2 = 1.0, qnew, dels
    cdef double a1 = 0.25
    cdef double complex q = a1, c = a1
    cdef double a = -a1
    cdef double complex s = 1.0 + q * delh
    cdef int i
    for i in range(2, _CF2_MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if cabs(dels) < _EPS * cabs(s):
            break
    h = a1 * h
    cdef double complex k0 = csqrt(pi / (2.0 * w)) * cexp(-w) / s
    res[0] = k0
    res[1] = k0 * (w + 0.5 - h) / w


def k01_cf2(w):
    """K_0(w), K_1(w) for Re w >= 0, |w| >= 2 (Steed/Temme continued fraction)."""
    cdef double complex res[2]
    _k01(complex(w), res)
    return complex(res[0]), complex(res[1])


cdef void _upper(double complex z, int nmax, double* s, double complex* jh,
                 double complex* hh) noexcept nogil:
    cdef double az = cabs(z)
    cdef double la = log(0.5 * az)
    cdef int n, n_mil
    cdef double complex h0, h1
    cdef double complex tmp[4]
    for n in range(nmax + 1):
        s[n] = n * la - lgamma(n + 1.0)
    if az <= _SERIES_RADIUS:
        for n in range(nmax + 1):
            jh[n] = _jhat_series(n, z, az)
        _y01_series(z, tmp)
        h0 = tmp[0] + 1j * tmp[2]
        h1 = tmp[1] + 1j * tmp[3]
    else:
        if 0.5 * az * az >= nmax:
            n_mil = nmax
        else:
            n_mil = <int>(0.5 * az * az)
        _jhat_miller(z, az, n_mil, s, jh)
        for n in range(n_mil + 1, nmax + 1):
            jh[n] = _jhat_series(n, z, az)
        _k01(-1j * z, tmp)
        h0 = -1j * _TWO_OVER_PI * tmp[0]
        h1 = -_TWO_OVER_PI * tmp[1]
    cdef double half = 0.5 * az
    hh[0] = h0
    if nmax >= 1:
        hh[1] = h1 * half
    for n in range(1, nmax):
        hh[n + 1] = (2.0 * n / z) * (half / (n + 1)) * hh[n] - hh[n - 1] * (
            half * half / (n * (n + 1.0)))


cdef void _jh(double complex z, int nmax, double* s, double complex* jh,
              double complex* hh) noexcept nogil:
    cdef int n
    cdef double complex yb
    cdef double e2
    if not (isfinite(z.real) and isfinite(z.imag)):
        for n in range(nmax + 1):
            s[n] = 0.0
            jh[n] = NAN
            hh[n] = NAN
        return
    if z.imag == 0.0:
        z = z.real + 0j
    if z.imag >= 0.0:
        _upper(z, nmax, s, jh, hh)
        return
    _upper(conj(z), nmax, s, jh, hh)
    for n in range(nmax + 1):
        e2 = 2.0 * s[n]
        if e2 > 700.0:
            e2 = 700.0
        e2 = exp(e2)
        yb = (hh[n] - jh[n] * e2) / 1j
        jh[n] = conj(jh[n])
        hh[n] = jh[n] * e2 + 1j * conj(yb)


def jh_scaled(z, nmax):
    """Scaled ``J_n`` and ``H1_n`` for ``n = 0..nmax`` at ``z != 0``."""
    cdef double complex zc = complex(z)
    cdef int nm = int(nmax)
    if zc == 0:
        raise ValueError("jh_scaled requires z != 0")
    cdef cnp.ndarray[cnp.complex128_t] jh = np.empty(nm + 1, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t] hh = np.empty(nm + 1, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t] s = np.empty(nm + 1)
    with nogil:
        _jh(zc, nm, &s[0], &jh[0], &hh[0])
    return jh, hh, s


def jh_scaled_many(z, int nmax):
    """Row-wise ``jh_scaled`` over a 1-D array of points."""
    cdef cnp.ndarray[cnp.complex128_t] zz = np.ascontiguousarray(z, dtype=complex)
    cdef Py_ssize_t m = zz.shape[0], i
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] jh = np.empty((m, nmax + 1), dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] hh = np.empty((m, nmax + 1), dtype=complex)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s = np.empty((m, nmax + 1))
    for i in range(m):
        if zz[i] == 0:
            raise ValueError("jh_scaled requires z != 0")
    with nogil:
        for i in range(m):
            _jh(zz[i], nmax, &s[i, 0], &jh[i, 0], &hh[i, 0])
    return jh, hh, s


def matching_det(int nu, lam0, int m, double eps, double a, int sign):
    """Normalized matching determinant; see ``_pykernels.matching_det``."""
    cdef double complex lam = complex(lam0)
    cdef double complex mu = csqrt(lam * lam - sign * eps)
    cdef double complex zi = mu * a, ze = lam * a
    cdef int nmax = nu + 1
    cdef cnp.ndarray[cnp.complex128_t] bji = np.empty(nmax + 1, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t] bhi = np.empty(nmax + 1, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t] bsi = np.empty(nmax + 1)
    cdef cnp.ndarray[cnp.complex128_t] bje = np.empty(nmax + 1, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t] bhe = np.empty(nmax + 1, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t] bse = np.empty(nmax + 1)
    cdef double complex jv, jp, hv, hp, hp_h, jp_e, dhat, ph
    cdef double azi, aze, e2, par, nrm, amu
    if zi == 0 or ze == 0 or not (isfinite(ze.real) and isfinite(ze.imag)
                                  and isfinite(zi.real) and isfinite(zi.imag)):
        return complex("nan"), 0.0
    with nogil:
        _jh(zi, nmax, &bsi[0], &bji[0], &bhi[0])
        _jh(ze, nmax, &bse[0], &bje[0], &bhe[0])
        azi = cabs(zi)
        aze = cabs(ze)
        if nu == 0:
            jv = bji[0]
            jp = -bji[1] * (0.5 * azi)
        else:
            jv = bji[nu]
            jp = bji[nu - 1] * (2.0 * nu / azi) - (nu / zi) * bji[nu]
        e2 = 2.0 * bse[nu]
        if e2 > 700.0:
            e2 = 700.0
        e2 = exp(e2)
        par = -1.0 if (nu * m) % 2 else 1.0
        if nu == 0:
            hv = bhe[0] - 2.0 * m * bje[0]
            hp = -bhe[1] * (2.0 / aze) + 2.0 * m * bje[1] * (0.5 * aze)
        else:
            hv = bhe[nu] - 2.0 * m * bje[nu] * e2
            hp_h = bhe[nu - 1] * (aze / (2.0 * nu)) - (nu / ze) * bhe[nu]
            jp_e = bje[nu - 1] * (2.0 * nu / aze) - (nu / ze) * bje[nu]
            hp = hp_h - 2.0 * m * jp_e * e2
        hv = hv * par
        hp = hp * par
        dhat = mu * jp * hv - lam * jv * hp
        nrm = (cabs(jv) + cabs(jp)) * (cabs(hv) + cabs(hp))
    if nrm == 0.0 or not isfinite(nrm):
        return complex("nan"), 0.0
    ph = 1.0
    if nu:
        amu = cabs(mu)
        if amu > 0:
            ph = _ipow((amu / mu) * (lam / cabs(lam)), nu)
    return complex(dhat * ph / nrm), log(nrm)


def jacobi_eigh(a, double tol=1e-15, int max_sweeps=60):
    """Cyclic Jacobi eigen-decomposition of a real symmetric matrix (unsorted)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.array(a, dtype=float, order="C", copy=True)
    cdef Py_ssize_t n = A.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V = np.eye(n)
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double scale = 0.0, off, apq, app, aqq, theta, t, c, sn, x, y
    for p in range(n):
        for q in range(n):
            scale += A[p, q] * A[p, q]
    scale = sqrt(scale)
    if n == 1 or scale == 0.0:
        return A.diagonal().copy(), V
    with nogil:
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off += A[p, q] * A[p, q]
            if sqrt(off) <= tol * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if apq == 0.0:
                        continue
                    app = A[p, p]
                    aqq = A[q, q]
                    if fabs(apq) <= 1e-300 or fabs(apq) < 1e-18 * (fabs(app) if fabs(app) < fabs(aqq) else fabs(aqq)):
                        A[p, q] = 0.0
                        A[q, p] = 0.0
                        continue
                    theta = (aqq - app) / (2.0 * apq)
                    t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    sn = t * c
                    for k in range(n):
                        x = A[k, p]
                        y = A[k, q]
                        A[k, p] = c * x - sn * y
                        A[k, q] = sn * x + c * y
                    for k in range(n):
                        x = A[p, k]
                        y = A[q, k]
                        A[p, k] = c * x - sn * y
                        A[q, k] = sn * x + c * y
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    for k in range(n):
                        x = V[k, p]
                        y = V[k, q]
                        V[k, p] = c * x - sn * y
                        V[k, q] = sn * x + c * y
    return A.diagonal().copy(), V

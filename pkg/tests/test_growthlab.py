import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from reslab import growthlab as gl
from reslab.errors import DomainError, NumericalError, PreconditionError

mp.mp.dps = 30


def mp_log_ratio(family, x):
    # ∫_0^x f'/f = Σ log E_p(x/ā) - log E_p(x/a) = -2i Σ arg E_p(x/a);
    # 1 - x/a never crosses the negative axis for real x, so principal args are continuous
    p = family.p
    tot = mp.mpf(0)
    for a in family.zeros:
        w = mp.mpf(x) / mp.mpc(a)
        tot += mp.arg(1 - w) + mp.im(sum(w ** k / k for k in range(1, p + 1)))
    return complex(0, -2 * tot)


def test_canonical_factor_examples():
    assert gl.canonical_factor(0, 0.5) == 0.5
    assert gl.canonical_factor(1, 0.5) == pytest.approx(0.8243606354, abs=1e-10)
    for p in range(5):
        assert gl.canonical_factor(p, 0) == 1


@given(st.integers(0, 4), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_canonical_factor_log_derivative(p, z):
    # E_p'/E_p = -z^p/(1-z)
    if abs(1 - z) < 0.1:
        return
    h = 1e-6
    num = (gl.canonical_factor(p, z + h) - gl.canonical_factor(p, z - h)) / (2 * h)
    ref = -(z ** p) / (1 - z) * gl.canonical_factor(p, z)
    assert abs(num - ref) <= 1e-6 * max(1.0, abs(ref))


def test_family_validation():
    with pytest.raises(DomainError):
        gl.ZeroFamily(2.0, (1j,))
    with pytest.raises(DomainError):
        gl.ZeroFamily(1.5, (1 + 0j,))
    with pytest.raises(DomainError):
        gl.ZeroFamily(1.5, (2j, 1j))
    with pytest.raises(PreconditionError):
        gl.ZeroFamily(0.5, (1j, 1.1j, 1.2j), C0=1.0)  # n(1.2) = 3 > 1.2^0.5


def test_builtin_family():
    fam = gl.builtin_family(1.5, 500)
    assert fam.p == 1 and len(fam) == 500
    assert fam.counting(10.0) == math.floor(10.0 ** 1.5)
    assert all(z.imag > 0 for z in fam.zeros)


def test_product_logderiv_examples():
    assert gl.product_logderiv(gl.ZeroFamily(1.5, ()), 3.0) == 0
    assert gl.product_logderiv(gl.ZeroFamily(1.5, (1j,)), 1.0) == pytest.approx(1j, abs=1e-15)


@pytest.mark.parametrize("rho", gl.BUILTIN_RHOS)
def test_product_logderiv_matches_definition(rho):
    fam = gl.builtin_family(rho, 300)
    p = fam.p
    for x in (-7.5, 0.3, 4.0, 50.0):
        terms = [(x / a.conjugate()) ** p / (x - a.conjugate()) - (x / a) ** p / (x - a)
                 for a in fam.zeros]
        direct = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
        got = gl.product_logderiv(fam, x)
        assert got.real == 0.0
        assert abs(got - direct) <= 1e-12 * max(1.0, abs(direct))


@pytest.mark.parametrize("rho", gl.BUILTIN_RHOS)
def test_forward_backward(rho):
    fam = gl.builtin_family(rho)
    for x in (4.0, 17.0, 64.0):
        a = gl.product_logderiv(fam, x, "ascending")
        b = gl.product_logderiv(fam, x, "descending")
        assert abs(a - b) <= 1e-10 * abs(a)
        # plain left-to-right sums in both orders agree too
        t = gl._terms(fam, x)
        s1 = sum(t.tolist())
        s2 = sum(t[::-1].tolist())
        assert abs(s1 - s2) <= 1e-10 * abs(s1)


@pytest.mark.parametrize("rho,x", [(0.5, 4.0), (1.5, 8.0), (1.5, -12.0), (2.5, 20.0)])
def test_logderiv_integral_against_closed_form(rho, x):
    fam = gl.builtin_family(rho, 200)
    got = gl.logderiv_integral(fam, x, quad_tol=1e-10)
    ref = mp_log_ratio(fam, x)
    assert abs(got - ref) <= 1e-8


def test_logderiv_integrals_match_single():
    fam = gl.builtin_family(1.5, 200)
    xs = [4.0, 9.0, 20.0]
    many = gl.logderiv_integrals(fam, xs, 1e-10)
    for x, v in zip(xs, many):
        assert abs(v - gl.logderiv_integral(fam, x, 1e-10)) <= 1e-8
    with pytest.raises(DomainError):
        gl.logderiv_integrals(fam, [-1.0, 1.0])


def test_logderiv_integral_zero_and_odd():
    fam = gl.ZeroFamily(0.5, (1j,))
    assert gl.logderiv_integral(fam, 0.0) == 0
    # a zero on the imaginary axis makes the integrand even, so the integral is odd
    a = gl.logderiv_integral(fam, 3.0)
    b = gl.logderiv_integral(fam, -3.0)
    assert a == pytest.approx(-b, abs=1e-10)


def test_simpson_level_cap():
    with pytest.raises(NumericalError):
        gl.logderiv_integral(gl.builtin_family(1.5, 50), 30.0, quad_tol=1e-300, max_level=3)


@pytest.mark.parametrize("rho", gl.BUILTIN_RHOS)
def test_ratio_test(rho):
    rep = gl.ratio_test(gl.builtin_family(rho))
    assert rep.passed and rep.spread < 10 and rep.slope < 0.2


@pytest.mark.parametrize("name,f,rho,C0", gl.analytic_families(), ids=lambda v: v if isinstance(v, str) else "")
def test_caratheodory_families(name, f, rho, C0):
    for R, r in ((4.0, 2.0), (10.0, 3.0), (10.0, 8.0)):
        assert gl.caratheodory_check(f, rho, C0, R, r)


def test_caratheodory_examples():
    one = lambda z: np.ones_like(np.asarray(z, dtype=complex))
    assert gl.caratheodory_check(one, 0.5, 1.0, 4.0, 2.0)
    assert gl.caratheodory_check(lambda z: np.asarray(z) ** 2, 2.5, 1.0, 10.0, 5.0)
    assert gl.caratheodory_check(lambda z: np.exp(1j * np.asarray(z)), 0.5, 1.0, 10.0, 3.0)


def test_caratheodory_report_values():
    rep = gl.caratheodory_report(lambda z: np.asarray(z) ** 2, 2.5, 1.0, 10.0, 5.0)
    assert rep.M == pytest.approx(1.0)
    assert rep.max_re == pytest.approx(100.0)
    assert rep.A == pytest.approx(10.0 ** 2.5)
    assert rep.max_on_circle == pytest.approx(25.0)


def test_caratheodory_preconditions():
    with pytest.raises(DomainError):
        gl.caratheodory_check(lambda z: z, 1.5, 1.0, 3.0, 4.0)
    with pytest.raises(PreconditionError):
        gl.caratheodory_check(lambda z: np.asarray(z) ** 3, 1.5, 1.0, 5.0, 2.0)


def test_caratheodory_scalar_callable():
    assert gl.caratheodory_check(lambda z: complex(z) * 0.5, 1.5, 1.0, 5.0, 2.0)


def test_zero_count_examples():
    assert gl.halfplane_zero_count(lambda z: z - 2j, 4.0) == 1
    assert gl.halfplane_zero_count(cmath.exp, 6.0) == 0
    assert gl.halfplane_zero_count(lambda z: (z - 2j) ** 2 * (z - 3 - 1j), 5.0) == 3
    # excluded parts of the plane: inside the unit disc and below the axis
    assert gl.halfplane_zero_count(gl.constructed_product([0.5j, 2 - 1j, 7j]), 5.0) == 0


def test_zero_count_additive_and_random():
    rng = np.random.default_rng(5)
    for _ in range(8):
        f, expected, _ = gl.random_product(rng, 6.0)
        whole = gl.halfplane_zero_count(f, 6.0)
        assert whole == expected
        assert whole == (gl.halfplane_zero_count(f, 6.0, theta_hi=0.5 * math.pi)
                         + gl.halfplane_zero_count(f, 6.0, theta_lo=0.5 * math.pi))
        assert whole == (gl.halfplane_zero_count(f, 3.0) + gl.halfplane_zero_count(f, 6.0, r_in=3.0)
                         ) or any(abs(abs(z) - 3.0) < 0.1 for z in _)

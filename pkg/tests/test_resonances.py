import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from reslab import resonances as rs
from reslab import specfun as sf
from reslab.logcover import LambdaPoint
from reslab.errors import DomainError, PreconditionError
from reslab.mode import make_mode
from reslab.winding import Box

mp.mp.dps = 40


def mp_matching(nu, lam, m, eps, a, sign):
    mu = mp.sqrt(mp.mpc(lam) ** 2 - sign * eps)
    par = (-1) ** (nu * m)
    J = lambda z: mp.besselj(nu, z)
    Jp = lambda z: mp.besselj(nu, z, 1)
    H = lambda z: mp.hankel1(nu, z)
    Hp = lambda z: mp.besselj(nu, z, 1) + 1j * mp.bessely(nu, z, 1)
    hm = par * (H(lam * a) - 2 * m * J(lam * a))
    hpm = par * (Hp(lam * a) - 2 * m * Jp(lam * a))
    return complex((lam / mu) ** nu * (mu * Jp(mu * a) * hm - lam * J(mu * a) * hpm))


def test_interior_wavenumber():
    assert rs.interior_wavenumber(2j, 1.0, 1) == pytest.approx(1j * math.sqrt(5))
    assert rs.interior_wavenumber(3 + 1j, 0.0, 1) == 3 + 1j


@pytest.mark.parametrize("nu,lam,m,sign", [(0, 2 + 1j, 1, 1), (3, -5 + 0.5j, 1, -1),
                                           (7, 9 + 3j, 2, 1), (2, 0.7 + 0.2j, -1, 1),
                                           (12, 14 + 1e-3j, 1, 1)])
def test_matching_det_against_mpmath(nu, lam, m, sign):
    got = rs.matching_det(make_mode(2, nu), lam, m, 1.0, 1.0, sign)
    with mp.workdps(40 + int(abs(lam.imag))):
        ref = mp_matching(nu, lam, m, 1.0, 1.0, sign)
    assert abs(got - ref) <= 1e-11 * abs(ref)


@given(st.integers(0, 20), st.floats(-20, 20), st.floats(0.01, 10), st.integers(-2, 2),
       st.sampled_from([1, -1]))
def test_kernel_matches_reference(nu, x, y, m, sign):
    md = make_mode(2, nu)
    lam = complex(x, y)
    a = rs.matching_det(md, lam, m, 1.0, 1.0, sign)
    b = rs.matching_det_reference(md, lam, m, 1.0, 1.0, sign)
    assert abs(a - b) <= 1e-9 * abs(b)


@given(st.integers(0, 15), st.floats(-15, 15), st.floats(0.01, 8))
def test_branch_invariance(nu, x, y):
    md = make_mode(2, nu)
    lam = complex(x, y)
    mu = rs.interior_wavenumber(lam, 1.0, 1)
    a = rs.matching_det_reference(md, lam, 1, 1.0, 1.0, 1, mu=mu)
    b = rs.matching_det_reference(md, lam, 1, 1.0, 1.0, 1, mu=-mu)
    # D is a difference of two products; compare on the scale of those terms
    p = LambdaPoint.from_complex(lam, 1)
    terms = abs((lam / mu) ** nu) * (
        abs(mu * sf.bessel_j_prime(nu, mu) * sf.hankel1_on_cover(nu, p))
        + abs(lam * sf.bessel_j(nu, mu)) * abs(sf.hankel1_prime(nu, lam) - 2 * sf.bessel_j_prime(nu, lam)))
    assert abs(a - b) <= 1e-12 * terms


def test_normalized_has_same_phase():
    md = make_mode(2, 4)
    lam = 6 + 2j
    a = rs.matching_det(md, lam, 1, 1.0, 1.0, 1)
    b = rs.matching_det(md, lam, 1, 1.0, 1.0, 1, normalized=True)
    assert abs(b) <= 1.0
    assert cmath.phase(a) == pytest.approx(cmath.phase(b), abs=1e-14)


@pytest.mark.parametrize("nu,m", [(0, 0), (3, 1), (4, 2), (5, -1)])
def test_free_limit_is_wronskian(nu, m):
    # μ = λ: D = -λ (J H' - J' H)(λa) = -2i/(πa) on every sheet, up to (-1)^{νm}
    lam = 3 + 1.5j
    d = rs.matching_det_reference(make_mode(2, nu), lam, m, 0.0, 1.0, 1)
    assert d == pytest.approx((-1) ** (nu * m) * (-2j / math.pi), rel=1e-11)


def test_physical_sheet_no_zeros_deep():
    md = make_mode(2, 2)
    vals = [abs(rs.matching_det(md, complex(x, 6.0), 0, 0.1, 1.0, 1, normalized=True))
            for x in np.linspace(-10, 10, 41)]
    assert min(vals) > 0.1


def test_zero_lambda_rejected():
    with pytest.raises(DomainError):
        rs.matching_det(make_mode(2, 0), 0j, 1, 1.0, 1.0, 1)


def test_empty_box():
    zs, w = rs.find_mode_zeros(make_mode(2, 0), 1, 1.0, 1.0, 1, Box(0.1, 0.5, 5.0, 6.0))
    assert zs == [] and w == 0


@pytest.fixture(scope="module")
def mode0_zeros():
    rep = rs.SearchReport()
    zs, w = rs.find_mode_zeros(make_mode(2, 0), 1, 1.0, 1.0, 1, Box(0.1, 12, 1e-3, 12), report=rep)
    return zs, w, rep


def test_mode0_count_matches_winding(mode0_zeros):
    zs, w, rep = mode0_zeros
    assert w > 0 and sum(k for _, k in zs) == w
    assert not rep.unresolved
    for z, _ in zs:
        assert abs(rs.matching_det(make_mode(2, 0), z, 1, 1.0, 1.0, 1, normalized=True)) < 1e-8


def test_mode0_stable_under_enlargement(mode0_zeros):
    zs, _, _ = mode0_zeros
    big, _ = rs.find_mode_zeros(make_mode(2, 0), 1, 1.0, 1.0, 1, Box(0.1, 13.2, 1e-3, 13.2))
    inner = [z for z, _ in big if z.real <= 12 and z.imag <= 12]
    assert len(inner) == len(zs)
    for a, b in zip(sorted(inner, key=abs), sorted((z for z, _ in zs), key=abs)):
        assert abs(a - b) < 1e-8 * abs(b)


def test_nu_cap():
    assert rs.nu_cap(1.0, 40.0) == 70
    assert rs.nu_cap(2.0, 10.0) == 40


def test_fit_order_power_law():
    assert rs.fit_order(lambda r: r ** 2, (15.0, 40.0)) == pytest.approx(2.0, abs=1e-10)


def test_fit_order_needs_zeros():
    with pytest.raises(PreconditionError):
        rs.fit_order(lambda r: 3, (15.0, 40.0))
    with pytest.raises(DomainError):
        rs.fit_order(lambda r: r, (5.0, 2.0))


@pytest.fixture(scope="module")
def small_set():
    return rs.counting_function(2, 1, 1.0, 1.0, 1, 10.0)


def test_counting_function_structure(small_set):
    s = small_set
    assert not s.partial and not s.report.unresolved
    assert all(w == 0 for w in s.truncation_windings.values())
    keys = [(z.l, abs(z.lambda0), z.lambda0.real) for z in s.zeros]
    assert keys == sorted(keys)
    steps = s.step_table()
    assert all(b[1] > a[1] and b[0] > a[0] for a, b in zip(steps, steps[1:]))
    assert s.count(min(abs(z.lambda0) for z in s.zeros) * 0.999) == 0
    # the box reaches past |λ₀| = 10 in its corners
    assert s.count(10.0) == sum(s.weight(z) for z in s.zeros if abs(z.lambda0) <= 10.0)
    assert s.count(10.0) <= steps[-1][1]
    for z in s.zeros:
        assert z.multiplicity >= 1 and z.residual < 1e-8 and z.lambda0.imag > 0
        assert s.weight(z) == make_mode(2, z.l).multiplicity * z.multiplicity


def test_counting_function_m_minus_one():
    s = rs.counting_function(2, -1, 1.0, 1.0, 1, 6.0)
    assert not s.partial and s.count(6.0) > 0

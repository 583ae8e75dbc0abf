import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from reslab import mode
from reslab.errors import DomainError
from reslab.logcover import LambdaPoint, rotate

mp.mp.dps = 30


def harmonic_dim(d, l):
    # harmonic polynomials of degree l in d variables
    c = math.comb
    return c(l + d - 1, d - 1) - (c(l + d - 3, d - 1) if l >= 2 else 0)


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_multiplicity(d):
    for l in range(12):
        md = mode.make_mode(d, l)
        assert md.multiplicity == harmonic_dim(d, l)
        assert md.nu == l + (d - 2) // 2


@pytest.mark.parametrize("d,l", [(3, 0), (0, 1), (2, -1), (2, 1.5)])
def test_make_mode_rejects(d, l):
    with pytest.raises(DomainError):
        mode.make_mode(d, l)


def test_gauss_grid_exact_polynomials():
    g = mode.gauss_grid(2.0, 8)
    for k in range(16):
        assert g.integrate(lambda r: r ** k) == pytest.approx(2.0 ** (k + 1) / (k + 1), rel=1e-13)


def test_composite_grid():
    g = mode.composite_grid([0.5, 1.0, 3.0], [4, 6, 10])
    assert g.size == 20 and g.a_max == 3.0
    assert g.integrate(np.sin) == pytest.approx(1 - math.cos(3.0), rel=1e-13)
    # nodes never straddle a breakpoint
    assert np.sum(g.nodes < 0.5) == 4 and np.sum(g.nodes < 1.0) == 10


def test_grid_arrays_read_only():
    g = mode.gauss_grid(1.0, 4)
    with pytest.raises(ValueError):
        g.nodes[0] = 0.3


def test_grid_for_panels():
    V = mode.RadialPotential(((0.3, 1.0), (1.0, 0.5)))
    g = mode.grid_for(V, 40)
    assert g.a_max == 1.0 and np.sum(g.nodes < 0.3) == 12


def test_potential_validation():
    with pytest.raises(DomainError):
        mode.RadialPotential(((1.0, 1.0), (0.5, 1.0)))
    with pytest.raises(DomainError):
        mode.RadialPotential(((1.0, -1.0),))
    with pytest.raises(DomainError):
        mode.RadialPotential(((1.0, 1.0),), sign=2)


def test_potential_values():
    V = mode.RadialPotential(((0.5, 2.0), (1.0, 1.0)), -1)
    assert V.sup_norm == 3.0 and V.support == 1.0
    assert list(V.value([0.2, 0.7, 1.2])) == [-3.0, -1.0, 0.0]
    assert mode.chi(1.0, 1.0).dominated_by(V)
    assert not mode.chi(1.0, 2.0).dominated_by(V)
    assert not mode.chi(1.1, 0.5).dominated_by(V)
    assert mode.RadialPotential().is_zero


def test_random_nested_pair():
    rng = np.random.default_rng(0)
    for _ in range(50):
        V1, V2 = mode.random_nested_pair(rng)
        assert V1.dominated_by(V2) and V2.support == 1.0
        r = np.linspace(0.001, 1.2, 500)
        assert np.all(V1.abs_value(r) <= V2.abs_value(r))


@pytest.mark.parametrize("d,nu", [(2, 0), (2, 3), (4, 2)])
def test_green_kernel_on_imaginary_axis(d, nu):
    md = mode.make_mode(d, nu - (d - 2) // 2)
    sigma, r, rp = 3.0, 0.4, 0.9
    g = mode.green_kernel(md, r, rp, LambdaPoint.on_imaginary_axis(sigma))
    ref = float(mp.besseli(nu, sigma * r) * mp.besselk(nu, sigma * rp)) * (r * rp) ** (-(d - 2) / 2)
    assert abs(g.imag) <= 1e-13 * ref
    assert g.real == pytest.approx(ref, rel=1e-12)


@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.5, 20.0),
       st.floats(0.01, math.pi - 0.01), st.integers(0, 8), st.sampled_from([2, 4]))
def test_jump_identity(r, rp, mod, arg, l, d):
    md = mode.make_mode(d, l)
    lam = LambdaPoint(mod, arg)
    diff = mode.green_kernel(md, r, rp, rotate(lam, 1)) - mode.green_kernel(md, r, rp, lam)
    jump = mode.jump_kernel(md, r, rp, lam)
    scale = max(abs(mode.green_kernel(md, r, rp, lam)), abs(jump))
    assert abs(diff - jump) <= 1e-11 * scale


def test_green_symmetric():
    md = mode.make_mode(2, 2)
    lam = LambdaPoint(4.0, 2.0)
    assert mode.green_kernel(md, 0.3, 0.8, lam) == mode.green_kernel(md, 0.8, 0.3, lam)


@pytest.mark.parametrize("d,l,mod,arg", [(2, 0, 5.0, 0.3), (2, 4, 12.0, math.pi / 2),
                                          (4, 1, 3.0, 1.7 + math.pi), (2, 2, 8.0, -2.5)])
def test_kernel_matrices_pointwise(d, l, mod, arg):
    md = mode.make_mode(d, l)
    V = mode.RadialPotential(((0.5, 1.5), (1.0, 0.7)))
    grid = mode.grid_for(V, 16)
    lam = LambdaPoint(mod, arg)
    K, T = mode.kernel_matrices(md, V, grid, mode.bessel_table(lam, grid, md.nu))
    r, w = grid.nodes, grid.weights
    v = V.abs_value(r)
    for i, j in [(0, 0), (1, 7), (9, 3), (15, 15)]:
        f = math.sqrt(w[i] * w[j] * v[i] * v[j]) * (r[i] * r[j]) ** ((d - 1) / 2)
        g = mode.green_kernel(md, r[i], r[j], lam)
        t = mode.jump_kernel(md, r[i], r[j], lam) / 1j
        assert abs(K[i, j] - f * g) <= 1e-12 * abs(f * g)
        assert abs(T[i, j] - f * t) <= 1e-12 * abs(f * t)


def test_kernel_matrices_errors():
    md = mode.make_mode(2, 3)
    V = mode.chi(1.0)
    grid = mode.gauss_grid(0.5, 8)
    lam = LambdaPoint(1.0, 1.0)
    with pytest.raises(DomainError):
        mode.kernel_matrices(md, V, grid, mode.bessel_table(lam, grid, 3))
    grid = mode.gauss_grid(1.0, 8)
    with pytest.raises(DomainError):
        mode.kernel_matrices(md, V, grid, mode.bessel_table(lam, grid, 2))


def test_zero_potential_matrices():
    md = mode.make_mode(2, 0)
    grid = mode.gauss_grid(1.0, 6)
    K, T = mode.kernel_matrices(md, mode.RadialPotential(), grid,
                                mode.bessel_table(LambdaPoint(1.0, 1.0), grid, 0))
    assert not K.any() and not T.any()

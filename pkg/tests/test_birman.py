import math

import mpmath as mp
import numpy as np
import pytest

from reslab import birman, mode, resonances
from reslab.errors import DomainError, NotPositiveDefiniteError, PreconditionError
from reslab.logcover import LambdaPoint
from reslab.winding import Box

CHI = mode.chi(1.0, 1.0)


@pytest.fixture(scope="module")
def grid():
    return mode.grid_for(CHI, 64)


@pytest.mark.parametrize("sigma", [2.0, 5.0, 10.0, 14.0])
@pytest.mark.parametrize("sign", [1, -1])
def test_two_paths_agree(grid, sigma, sign):
    V = CHI.with_sign(sign)
    a, cut = birman.log_abs_fm_on_axis(1, sigma, V, grid, strict=False)
    b = birman.log_fm_at(1, LambdaPoint.on_imaginary_axis(sigma), V, grid, cut)
    assert abs(a - b.real) <= 1e-10 * abs(a)


def test_free_potential(grid):
    assert birman.log_abs_fm_on_axis(1, 5.0, mode.RadialPotential(), grid) == (0.0, 0)
    assert birman.log_fm_at(2, LambdaPoint(3.0, 1.0), mode.RadialPotential(), grid, 5) == 0


def test_cutoff_passes_two_a_sigma(grid):
    _, cut = birman.log_abs_fm_on_axis(1, 10.0, CHI, grid)
    assert cut >= 21


def test_sign_minus_threshold(grid):
    V = CHI.with_sign(-1)
    assert birman.sign_minus_threshold(V) == 4.0
    with pytest.raises(PreconditionError):
        birman.log_abs_fm_on_axis(1, 3.0, V, grid)
    birman.log_abs_fm_on_axis(1, 3.0, V, grid, strict=False)


def test_m_zero_rejected(grid):
    with pytest.raises(DomainError):
        birman.log_abs_fm_on_axis(0, 3.0, CHI, grid)


def test_b1_rank_one(grid):
    op = birman.assemble_mode_operator(mode.make_mode(2, 3), LambdaPoint.on_imaginary_axis(6.0),
                                       CHI, grid)
    assert op.symmetrized
    eig = birman.b1_eigenvalues(op, 1)
    assert eig[0] > 0
    assert abs(eig[1]) < 1e-10 * eig[0]


def test_not_positive_definite():
    V = mode.chi(1.0, 50.0, -1)
    g = mode.gauss_grid(1.0, 24)
    op = birman.assemble_mode_operator(mode.make_mode(2, 0), LambdaPoint.on_imaginary_axis(0.5), V, g)
    with pytest.raises(NotPositiveDefiniteError) as exc:
        birman.b1_matrix(op, -1)
    assert exc.value.min_eigenvalue < 0


def test_b1_off_axis_rejected(grid):
    op = birman.assemble_mode_operator(mode.make_mode(2, 0), LambdaPoint(3.0, 1.0), CHI, grid)
    assert not op.symmetrized
    with pytest.raises(DomainError):
        birman.b1_matrix(op, 1)


@pytest.mark.parametrize("l", [0, 1, 4])
@pytest.mark.parametrize("t", [0.7, 3.0, 9.5])
def test_mode_factor_unimodular_on_real_axis(grid, l, t):
    f = birman.fm_mode_factor(mode.make_mode(2, l), 1, LambdaPoint(t, 0.0), CHI, grid)
    assert abs(abs(f) - 1.0) < 1e-10


def test_mode_factor_vanishes_at_resonance():
    md = mode.make_mode(2, 1)
    zs, w = resonances.find_mode_zeros(md, 1, 1.0, 1.0, 1, Box(-8, 8, 1e-3, 8))
    assert w == len(zs) > 0
    g = mode.grid_for(CHI, 128)
    for z, _ in zs:
        f = birman.fm_mode_factor(md, 1, LambdaPoint.from_complex(z), CHI, g)
        assert abs(f) < 1e-5


def test_closed_sheet_only(grid):
    with pytest.raises(DomainError):
        birman.fm_mode_factor(mode.make_mode(2, 0), 1, LambdaPoint(1.0, -0.5), CHI, grid)


def test_monotonicity_pairs():
    rng = np.random.default_rng(7)
    for _ in range(3):
        V1, V2 = mode.random_nested_pair(rng)
        for sign in (1, -1):
            s = birman.admissible_sigma(V2, 8.0, sign)
            assert birman.monotonicity_check(1, s, V1, V2, sign)


def test_monotonicity_requires_nesting():
    with pytest.raises(PreconditionError):
        birman.monotonicity_check(1, 5.0, mode.chi(1.0, 2.0), CHI, 1)


def test_admissible_sigma():
    assert birman.admissible_sigma(CHI, 1.0, 1) == 1.0
    assert birman.admissible_sigma(CHI, 1.0, -1) == 4.0
    assert birman.admissible_sigma(CHI, 9.0, -1) == 9.0


def test_contraction_eigen_check():
    ok, worst = birman.contraction_eigen_check(200, 6, 1, return_worst=True)
    assert ok and worst <= 1e-10


def test_norm_contraction():
    V1 = mode.RadialPotential(((0.6, 0.8),))
    assert birman.norm_contraction(6.0, V1, CHI, 1) <= 1 + 1e-8
    assert birman.norm_contraction(6.0, V1, CHI, -1) <= 1 + 1e-8
    # equal potentials give the identity
    same = birman.norm_contraction(6.0, CHI, CHI, 1, l_values=range(4))
    assert same == pytest.approx(1.0, abs=1e-10)


def test_b1_scaled_error_stable():
    g = mode.grid_for(CHI, 96)
    for l in (0, 5):
        r = [birman.b1_scaled_error(s, l, CHI, g) for s in (10.0, 20.0, 40.0)]
        assert max(r) / min(r) < 5


def test_rayleigh_linear_in_eps():
    md = mode.make_mode(2, 4)
    a = birman.rayleigh_lower_bound(md, 10.0, 1.0, 1.0).log_abs
    b = birman.rayleigh_lower_bound(md, 10.0, 2.0, 1.0).log_abs
    assert b - a == pytest.approx(math.log(2.0), abs=1e-13)


def test_rayleigh_against_quadrature_and_norm(grid):
    md = mode.make_mode(2, 3)
    sigma = 8.0
    val = birman.rayleigh_lower_bound(md, sigma, 1.0, 1.0).log_abs
    ref = mp.log(mp.pi * mp.quad(lambda r: mp.besseli(3, sigma * r) ** 2 * r, [0.5, 1]))
    assert val == pytest.approx(float(ref), rel=1e-12)
    # the jump is rank one with norm π ε ∫_0^a I² r dr, which dominates
    op = birman.assemble_mode_operator(md, LambdaPoint.on_imaginary_axis(sigma), CHI, grid)
    top = max(abs(np.linalg.eigvalsh(op.T)))
    assert val <= math.log(top)


def test_rayleigh_grows_in_mode_window():
    sigma = 60.0
    vals = [birman.rayleigh_lower_bound(mode.make_mode(2, l), sigma, 1.0, 1.0).log_abs
            for l in range(6, 10)]
    assert all(v >= 1.0 * l for v, l in zip(vals, range(6, 10)))


def test_boundary_check_reports(grid):
    rep = {}
    assert birman.boundary_logderiv_check(1, CHI, grid, [10.0, 20.0], report=rep)
    assert len(rep["ratio"]) == 2 and rep["slope"] < 0.1
    assert birman.boundary_logderiv_check(1, mode.RadialPotential(), grid, [5.0])


def test_upper_bound_check(grid):
    rep = {}
    assert birman.upper_bound_check(1, CHI, grid, 10.0, (5.0,), n_points=5, report=rep)
    assert rep["C"] > 0


def test_growth_series_validation():
    with pytest.raises(ValueError):
        birman.GrowthSeries((2.0, 1.0), (1.0, 2.0), (3, 4))
    gs = birman.growth_series(1, [4.0, 8.0], CHI, n_nodes=32)
    assert gs.log_abs_F[1] > gs.log_abs_F[0] > 0

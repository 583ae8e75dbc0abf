import cmath
import math

import pytest
from hypothesis import given, strategies as st

from reslab.errors import DomainError
from reslab.logcover import (LambdaPoint, base_displacement, make_lambda, project,
                             rotate, sheet_of)

moduli = st.floats(1e-3, 1e3)
args = st.floats(-40.0, 40.0)


@given(moduli, args, st.integers(-20, 20))
def test_rotate_round_trip(r, a, k):
    p = make_lambda(r, a)
    q = rotate(rotate(p, k), -k)
    assert q.modulus == p.modulus
    assert abs(q.arg - p.arg) <= 1e-12 * max(1.0, abs(a))


@given(moduli, args)
def test_base_displacement_splits_arg(r, a):
    p = make_lambda(r, a)
    m, th = base_displacement(p)
    assert 0.0 <= th < math.pi
    assert abs(m * math.pi + th - a) <= 1e-12 * max(1.0, abs(a))
    assert sheet_of(p).m == m


@given(moduli, args)
def test_project_matches_polar(r, a):
    p = make_lambda(r, a)
    assert abs(project(p) - cmath.rect(r, a)) <= 1e-12 * r


def test_boundary_snapping():
    p = LambdaPoint(2.0, 3 * math.pi * (1 + 1e-14))
    assert base_displacement(p) == (3, 0.0)
    s = sheet_of(p)
    assert s.m == 3 and s.on_boundary
    assert not sheet_of(LambdaPoint(1.0, 0.5)).on_boundary


def test_physical_sheet_examples():
    assert sheet_of(LambdaPoint.on_imaginary_axis(3.0)).m == 0
    assert sheet_of(LambdaPoint(1.0, 1.5 * math.pi)).m == 1
    assert sheet_of(LambdaPoint(1.0, -0.5 * math.pi)).m == -1


def test_from_complex_turns():
    p = LambdaPoint.from_complex(1j, turns=2)
    assert p.arg == pytest.approx(2.5 * math.pi)
    assert complex(p) == pytest.approx(1j)


@pytest.mark.parametrize("r,a", [(0.0, 1.0), (-1.0, 0.0), (math.inf, 0.0), (1.0, math.nan)])
def test_invalid_points(r, a):
    with pytest.raises(DomainError):
        LambdaPoint(r, a)


def test_zero_has_no_lift():
    with pytest.raises(DomainError):
        LambdaPoint.from_complex(0j)

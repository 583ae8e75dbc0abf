import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from shapely.geometry import Point, Polygon

from reslab.errors import NumericalError
from reslab.winding import Box, NearZeroError, PhaseTracker, box_winding, sector_polygon


def poly(zeros):
    def f(z):
        out = 1.0 + 0j
        for a in zeros:
            out *= z - a
        return out
    return f


points = st.complex_numbers(max_magnitude=4.0, allow_nan=False, allow_infinity=False)


@given(st.lists(points, min_size=0, max_size=6))
def test_box_winding_counts_zeros(zeros):
    box = Box(-2.0, 2.0, -1.5, 1.5)
    # keep zeros off the contour
    zeros = [z for z in zeros
             if min(abs(z.real - 2), abs(z.real + 2), abs(z.imag - 1.5), abs(z.imag + 1.5)) > 0.05]
    inside = sum(1 for z in zeros if box.contains(z))
    assert box_winding(poly(zeros), box, h_max=0.25) == inside


def test_multiplicity_and_exp_factor():
    f = lambda z: (z - 0.5j) ** 3 * cmath.exp(2j * z)
    assert box_winding(f, Box(-1, 1, 0.1, 1), 0.1) == 3


def test_split_reuses_edges():
    box = Box(-1.0, 1.0, 0.0, 2.0)
    kids = box.split()
    assert kids[0].x1 == kids[1].x0 == 0.0 and kids[0].y1 == kids[3].y0 == 1.0
    tr = PhaseTracker(poly([0.3 + 0.4j, -0.5 + 1.5j]), 0.1)
    total = sum(tr.box_winding(b) for b in kids)
    assert total == tr.box_winding(box) == 2


def test_near_zero_raises():
    with pytest.raises(NearZeroError):
        box_winding(poly([1.0 + 0.5j]), Box(0.0, 1.0, 0.0, 1.0), 0.1)


def test_nonclosed_phase_rejected():
    tr = PhaseTracker(lambda z: cmath.sqrt(z), 0.05)
    with pytest.raises(NumericalError):
        tr.winding([1 + 0j, 1j, -1 + 0j, -1j])


def test_max_abs_on_box():
    tr = PhaseTracker(lambda z: z, 1.0)
    assert tr.max_abs_on_box(Box(1.0, 3.0, 1.0, 4.0)) == 5.0


@pytest.mark.parametrize("r_in", [0.0, 1.0])
@pytest.mark.parametrize("lo,hi", [(0.0, math.pi), (0.0, 1.0), (1.0, math.pi)])
def test_sector_polygon_contains_region(r_in, lo, hi):
    R, delta = 5.0, 1e-3
    pts = sector_polygon(R, delta, 32, r_in, lo, hi)
    shape = Polygon([(z.real, z.imag) for z in pts])
    assert shape.is_valid and shape.exterior.is_ccw
    rng = np.random.default_rng(0)
    for _ in range(2000):
        z = cmath.rect(rng.uniform(max(r_in, 0.01), R), rng.uniform(lo, hi))
        if z.imag < delta or abs(z) < r_in:
            continue
        # the circumscribed outer arc means every region point is covered
        if abs(abs(z) - r_in) > 0.02 or r_in == 0:
            assert shape.buffer(1e-12).contains(Point(z.real, z.imag))

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reslab.fitting import loglog_slopes, ols, theil_sen


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=30, unique=True),
       st.floats(-5, 5), st.floats(-5, 5))
def test_ols_matches_polyfit(xs, a, b):
    x = np.array(xs)
    rng = np.random.default_rng(len(xs))
    y = a * x + b + rng.standard_normal(x.size)
    s, c = ols(x, y)
    ps, pc = np.polyfit(x, y, 1)
    assert s == pytest.approx(ps, rel=1e-9, abs=1e-9)
    assert c == pytest.approx(pc, rel=1e-9, abs=1e-7)


def test_ols_errors():
    with pytest.raises(ValueError):
        ols([1.0], [2.0])
    with pytest.raises(ValueError):
        ols([1.0, 1.0], [2.0, 3.0])


def test_theil_sen_resists_outlier():
    x = np.arange(10.0)
    y = 3 * x + 1
    y[7] = 500.0
    assert theil_sen(x, y)[0] == pytest.approx(3.0)
    assert ols(x, y)[0] > 10


def test_loglog_power_law():
    x = np.array([10.0, 14.0, 20.0, 28.0, 40.0])
    out = loglog_slopes(x, 3.0 * x ** 2)
    assert out["ols"] == pytest.approx(2.0) and out["theil_sen"] == pytest.approx(2.0)

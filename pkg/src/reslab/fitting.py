"""Slope fits used by the growth experiments."""
import math

import numpy as np
from scipy import stats

__all__ = ["ols", "theil_sen", "loglog_slopes"]


def ols(x, y):
    """Least-squares ``(slope, intercept)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points")
    xm = math.fsum(x) / x.size
    ym = math.fsum(y) / y.size
    sxx = math.fsum((x - xm) ** 2)
    if sxx == 0:
        raise ValueError("x values are all equal")
    slope = math.fsum((x - xm) * (y - ym)) / sxx
    return slope, ym - slope * xm


def theil_sen(x, y):
    """Median-of-slopes ``(slope, intercept)``."""
    res = stats.theilslopes(np.asarray(y, dtype=float), np.asarray(x, dtype=float))
    return float(res[0]), float(res[1])


def loglog_slopes(x, y):
    """OLS and Theil-Sen slopes of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return {"ols": ols(lx, ly)[0], "theil_sen": theil_sen(lx, ly)[0]}

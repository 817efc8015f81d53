"""Independent reference implementations used as test oracles.

None of these share code with the package: they are deliberately naive
(day walks, dense solves, full DP tables, direct kernel sums) so that
agreement is evidence of correctness rather than of shared assumptions.
"""

from __future__ import annotations

import datetime as dt
import math

import numpy as np


# ------------------------------------------------------------------ calendar

def week1_sunday(year: int) -> dt.date:
    """First Sunday whose Sunday-Saturday week has at least 4 days in ``year``."""
    d = dt.date(year - 1, 12, 20)
    while True:
        if d.weekday() == 6:
            days_in_year = sum((d + dt.timedelta(k)).year == year for k in range(7))
            if days_in_year >= 4:
                return d
        d += dt.timedelta(1)


def day_walk_labels(first_year: int, last_year: int) -> dict[dt.date, tuple[int, int]]:
    """Label every day of ``first_year..last_year`` with (epi_year, week) by walking Sundays."""
    labels = {}
    for year in range(first_year - 1, last_year + 2):
        start = week1_sunday(year)
        stop = week1_sunday(year + 1)
        week = 1
        s = start
        while s < stop:
            for k in range(7):
                day = s + dt.timedelta(k)
                if first_year <= day.year <= last_year:
                    labels[day] = (year, week)
            s += dt.timedelta(7)
            week += 1
    return labels


def oracle_weeks_in_year(year: int) -> int:
    return (week1_sunday(year + 1) - week1_sunday(year)).days // 7


# ------------------------------------------------------------------ spline

def not_a_knot_moments(x, y) -> np.ndarray:
    """Second derivatives at the knots of the not-a-knot cubic spline, by a dense solve.

    Moment form: continuity of the first derivative at interior knots plus
    continuity of the third derivative at the second and penultimate knots.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = x.size
    if n == 2:
        return np.zeros(2)
    h = np.diff(x)
    if n == 3:
        # the not-a-knot spline through three points is the interpolating parabola
        c2 = np.polyfit(x, y, 2)[0]
        return np.full(3, 2.0 * c2)
    A = np.zeros((n, n))
    rhs = np.zeros(n)
    for i in range(1, n - 1):
        A[i, i - 1] = h[i - 1]
        A[i, i] = 2.0 * (h[i - 1] + h[i])
        A[i, i + 1] = h[i]
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1])
    # third derivative (M[i+1]-M[i])/h[i] equal across knot 1 and knot n-2
    A[0, 0] = h[1]
    A[0, 1] = -(h[0] + h[1])
    A[0, 2] = h[0]
    A[-1, -3] = h[-1]
    A[-1, -2] = -(h[-2] + h[-1])
    A[-1, -1] = h[-2]
    return np.linalg.solve(A, rhs)


def eval_moment_spline(x, y, M, t) -> np.ndarray:
    """Evaluate the moment-form spline; outside the knots the end pieces are extended."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    t = np.asarray(t, float)
    idx = np.clip(np.searchsorted(x, t, side="right") - 1, 0, x.size - 2)
    x0, x1 = x[idx], x[idx + 1]
    h = x1 - x0
    a = (x1 - t) / h
    b = (t - x0) / h
    return (
        a * y[idx]
        + b * y[idx + 1]
        + ((a**3 - a) * M[idx] + (b**3 - b) * M[idx + 1]) * h * h / 6.0
    )


def oracle_spline_base(values, counts) -> np.ndarray:
    """Pre-renormalisation weekly samples under the month-centre knot convention."""
    values = np.asarray(values, float)
    counts = np.asarray(counts, int)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    centres = offsets + (counts - 1) / 2.0
    x = np.concatenate(([centres[0] - counts[0]], centres))
    level = values / counts
    y = np.concatenate(([level[0]], level))
    M = not_a_knot_moments(x, y)
    return eval_moment_spline(x, y, M, np.arange(counts.sum()))


# ------------------------------------------------------------------ metrics

def dtw_table(x, y) -> float:
    n, m = len(x), len(y)
    D = [[math.inf] * (m + 1) for _ in range(n + 1)]
    D[0][0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            D[i][j] = abs(x[i - 1] - y[j - 1]) + min(D[i - 1][j], D[i][j - 1], D[i - 1][j - 1])
    return D[n][m]


def dtw_numpy(x, y) -> float:
    """Row-at-a-time DP, for inputs too long for the pure-Python table."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    prev = np.cumsum(np.abs(x[0] - y))
    for i in range(1, x.size):
        cost = np.abs(x[i] - y)
        cur = np.empty_like(prev)
        cur[0] = prev[0] + cost[0]
        vert = np.minimum(prev[1:], prev[:-1])
        for j in range(1, y.size):
            cur[j] = cost[j] + min(vert[j - 1], cur[j - 1])
        prev = cur
    return float(prev[-1])


def ks_scan(x, y) -> float:
    best = 0.0
    for t in list(x) + list(y):
        fx = sum(v <= t for v in x) / len(x)
        fy = sum(v <= t for v in y) / len(y)
        best = max(best, abs(fx - fy))
    return best


def kolmogorov_series(lam: float, terms: int = 100) -> float:
    if lam == 0:
        return 1.0
    total = sum((-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam) for k in range(1, terms + 1))
    return min(max(2.0 * total, 0.0), 1.0)


def kernel_mass(sample, bandwidth, grid, flush=1e-300) -> np.ndarray:
    sample = np.asarray(sample, float)
    grid = np.asarray(grid, float)
    dens = np.array([sum(math.exp(-0.5 * ((g - s) / bandwidth) ** 2) for s in sample) for g in grid])
    dens[dens < flush] = 0.0
    return dens / dens.sum()


def naive_kl(p, q) -> float:
    total = 0.0
    for a, b in zip(p, q):
        if a > 0:
            if b == 0:
                return math.inf
            total += a * math.log(a / b)
    return max(total, 0.0)

"""Agreement metrics between an interpolated weekly series X and an observed reference Y.

Pointwise: MAE, RMSE, R². Distributional and temporal: KL and Jensen-Shannon
divergence between Gaussian KDEs evaluated on a shared grid, DTW, and the
two-sample Kolmogorov-Smirnov test with its asymptotic p-value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import kolmogorov

from ._dtw import dtw_cost
from ._kde import gaussian_sums
from .errors import DomainError, UndefinedMetricError

MIN_BANDWIDTH = 0.1
GRID_SIZE = 512
GRID_PAD = 3.0
LN2 = math.log(2.0)
# kernel sums below this count as exact zeros, so the support seen by KL does
# not depend on how the sums were accumulated near the underflow limit
FLUSH_BELOW = 1e-300


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DomainError("inputs must be 1-D")
    if x.size == 0 or x.size != y.size:
        raise DomainError(f"need equal non-zero lengths, got {x.size} and {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("inputs must be finite")
    return x, y


def _sample(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("sample must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample must be finite")
    return x


def mae(x, y) -> float:
    x, y = _pair(x, y)
    return float(np.mean(np.abs(x - y)))


def rmse(x, y) -> float:
    x, y = _pair(x, y)
    d = x - y
    return float(np.sqrt(np.mean(d * d)))


def r_squared(pred, obs) -> float:
    """``1 - SS_res / SS_tot`` with the total sum of squares taken about mean(obs).

    Raises:
        UndefinedMetricError: if ``obs`` is constant.
    """
    x, y = _pair(pred, obs)
    if y.size < 2:
        raise DomainError("R² needs at least two observations")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedMetricError("R² undefined: reference series has zero variance")
    return 1.0 - float(np.sum((y - x) ** 2)) / ss_tot


def silverman_bandwidth(sample) -> float:
    """Gaussian rule-of-thumb bandwidth ``1.06 min(sd, IQR/1.34) n^(-1/5)``, floored at 0.1."""
    x = _sample(sample)
    n = x.size
    sd = float(np.std(x, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, float(q75 - q25) / 1.34)
    return max(1.06 * spread * n ** (-0.2), MIN_BANDWIDTH)


@dataclass(frozen=True)
class DensityEstimate:
    grid: np.ndarray
    mass: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.shape != self.mass.shape:
            raise DomainError("grid and mass must have the same shape")


def kde_grid(x, y, bandwidth: float, size: int = GRID_SIZE) -> np.ndarray:
    """Evenly spaced grid spanning both samples padded by three bandwidths."""
    pooled = np.concatenate([_sample(x), _sample(y)])
    return np.linspace(pooled.min() - GRID_PAD * bandwidth, pooled.max() + GRID_PAD * bandwidth, size)


def _kernel_sums(sample: np.ndarray, grid: np.ndarray, bandwidth: float) -> np.ndarray:
    # repeated values collapse into integer weights
    values, weights = np.unique(sample, return_counts=True)
    step = (grid[-1] - grid[0]) / (grid.size - 1)
    if np.allclose(np.diff(grid), step, rtol=1e-9, atol=0.0):
        dens = gaussian_sums(values, weights.astype(float), float(grid[0]), float(step), grid.size, float(bandwidth))
    else:
        z = (grid[:, None] - values[None, :]) / bandwidth
        dens = np.exp(-0.5 * z * z) @ weights
    dens[dens < FLUSH_BELOW] = 0.0
    return dens


def kde_pdf(sample, bandwidth: float, grid) -> DensityEstimate:
    """Gaussian KDE of ``sample`` on ``grid``, normalised to unit total mass.

    If every kernel underflows on the grid (bandwidth far below the grid
    spacing), each observation's mass goes to its nearest grid point.
    """
    x = _sample(sample)
    grid = np.asarray(grid, dtype=float)
    if not (bandwidth > 0 and math.isfinite(bandwidth)):
        raise DomainError(f"bandwidth must be positive and finite, got {bandwidth}")
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing with at least two points")
    dens = _kernel_sums(x, grid, bandwidth)
    total = dens.sum()
    if total == 0.0:
        idx = np.clip(np.searchsorted(grid, x), 1, grid.size - 1)
        idx -= (x - grid[idx - 1]) <= (grid[idx] - x)
        dens = np.bincount(idx, minlength=grid.size).astype(float)
        total = dens.sum()
    grid = grid.copy()
    grid.setflags(write=False)
    return DensityEstimate(grid=grid, mass=dens / total)


def _same_grid(p: DensityEstimate, q: DensityEstimate) -> None:
    if p.grid.shape != q.grid.shape or not np.array_equal(p.grid, q.grid):
        raise DomainError("densities must share the same grid")


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    ps = p[support]
    return max(float(np.sum(ps * np.log(ps / q[support]))), 0.0)


def kl_divergence(p: DensityEstimate, q: DensityEstimate) -> float:
    """``sum p ln(p/q)``; +inf when p has mass where q has none."""
    _same_grid(p, q)
    return _kl(p.mass, q.mass)


def jsd(p: DensityEstimate, q: DensityEstimate) -> float:
    """Jensen-Shannon divergence (natural log), in ``[0, ln 2]``."""
    _same_grid(p, q)
    mid = 0.5 * (p.mass + q.mass)
    value = 0.5 * _kl(p.mass, mid) + 0.5 * _kl(q.mass, mid)
    return min(max(value, 0.0), LN2)


def dtw(x, y) -> tuple[float, float]:
    """DTW distance with L1 local cost; returns ``(raw, raw / (len(x) + len(y)))``."""
    x = np.ascontiguousarray(_sample(x))
    y = np.ascontiguousarray(_sample(y))
    raw = float(dtw_cost(x, y))
    return raw, raw / (x.size + y.size)


def ks_statistic(x, y) -> float:
    xs = np.sort(_sample(x))
    ys = np.sort(_sample(y))
    pooled = np.concatenate([xs, ys])
    cdf_x = np.searchsorted(xs, pooled, side="right") / xs.size
    cdf_y = np.searchsorted(ys, pooled, side="right") / ys.size
    return float(np.max(np.abs(cdf_x - cdf_y)))


def ks_two_sample(x, y) -> tuple[float, float]:
    """KS statistic and asymptotic p-value ``Q(d sqrt(nm/(n+m)))``, clamped to (0, 1]."""
    x = _sample(x)
    y = _sample(y)
    d = ks_statistic(x, y)
    n, m = x.size, y.size
    lam = d * math.sqrt(n * m / (n + m))
    p = float(kolmogorov(lam))
    return d, min(max(p, np.finfo(float).tiny), 1.0)


@dataclass
class MetricsRecord:
    unit_id: str
    method: str
    mae: float
    rmse: float
    r2: Optional[float]
    kl: float
    jsd: float
    dtw: float
    dtw_norm: float
    ks_d: float
    ks_p: float
    flags: str = ""


METRIC_NAMES = ("mae", "rmse", "r2", "kl", "jsd", "dtw", "dtw_norm", "ks_d", "ks_p")


def compare(unit_id: str, method: str, interpolated, reference, bandwidth: Optional[float] = None) -> MetricsRecord:
    """Every metric for one unit and method.

    ``bandwidth`` defaults to Silverman's rule on ``reference``; pass the
    same value for all methods of a unit so their KL/JSD are comparable.
    KL is ``KL(reference || interpolated)``.
    """
    x, y = _pair(interpolated, reference)
    if bandwidth is None:
        bandwidth = silverman_bandwidth(y)
    flags = []
    try:
        r2: Optional[float] = r_squared(x, y)
    except UndefinedMetricError:
        r2 = None
        flags.append("all_zero_reference" if not np.any(y) else "constant_reference")
    grid = kde_grid(x, y, bandwidth)
    p_ref = kde_pdf(y, bandwidth, grid)
    q_int = kde_pdf(x, bandwidth, grid)
    raw, norm = dtw(x, y)
    d, p = ks_two_sample(x, y)
    return MetricsRecord(
        unit_id=unit_id,
        method=method,
        mae=mae(x, y),
        rmse=rmse(x, y),
        r2=r2,
        kl=kl_divergence(p_ref, q_int),
        jsd=jsd(p_ref, q_int),
        dtw=raw,
        dtw_norm=norm,
        ks_d=d,
        ks_p=p,
        flags=";".join(flags),
    )

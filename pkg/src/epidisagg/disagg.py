"""Monthly -> epi-week disaggregation.

Additive targets (case counts) go through Linear, Jitter or CubicSpline,
each ending with a per-month multiplicative correction so the weeks of a
month sum back to the observed monthly total. Non-additive covariates are
propagated unchanged to every week of their month.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Union

import numpy as np

from .epicalendar import EpiWeekId, MonthKey, MonthWeekMap
from .errors import DomainError, InsufficientDataError
from .spline import SplineFit, fit_not_a_knot


@dataclass(frozen=True)
class MonthlySeries:
    unit_id: str
    start: MonthKey
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError(f"unit {self.unit_id!r}: monthly values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise DomainError(f"unit {self.unit_id!r}: monthly values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def months(self) -> list[MonthKey]:
        return [self.start.shift(i) for i in range(len(self))]

    @property
    def end(self) -> MonthKey:
        return self.start.shift(len(self) - 1)


@dataclass(frozen=True)
class WeeklySeries:
    unit_id: str
    start: EpiWeekId
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError(f"unit {self.unit_id!r}: weekly values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise DomainError(f"unit {self.unit_id!r}: weekly values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def weeks(self) -> list[EpiWeekId]:
        return [self.start.shift(i) for i in range(len(self))]


@dataclass(frozen=True)
class Linear:
    name = "linear"


@dataclass(frozen=True)
class Jitter:
    seed: int = 0
    noise_frac: float = 0.05
    name = "jitter"

    def __post_init__(self) -> None:
        if not (self.noise_frac >= 0 and np.isfinite(self.noise_frac)):
            raise DomainError(f"noise_frac must be finite and >= 0, got {self.noise_frac}")


@dataclass(frozen=True)
class CubicSpline:
    name = "spline"


MethodKind = Union[Linear, Jitter, CubicSpline]

METHOD_NAMES = ("linear", "jitter", "spline")


def parse_method(name: str, seed: int = 0, noise_frac: float = 0.05) -> MethodKind:
    key = name.strip().lower()
    if key == "linear":
        return Linear()
    if key in ("jitter", "jittering"):
        return Jitter(seed=seed, noise_frac=noise_frac)
    if key in ("spline", "cubic", "cubicspline", "cubic_spline"):
        return CubicSpline()
    raise DomainError(f"unknown method {name!r}; expected one of {', '.join(METHOD_NAMES)}")


def unit_seed(seed: int, unit_id: str) -> int:
    """Stable per-unit seed derived from a run seed, independent of unit ordering."""
    return int(np.random.SeedSequence([seed, zlib.crc32(unit_id.encode())]).generate_state(1)[0])


def for_unit(method: MethodKind, unit_id: str) -> MethodKind:
    """``method`` with a jitter seed specialised to ``unit_id``."""
    if isinstance(method, Jitter):
        return Jitter(seed=unit_seed(method.seed, unit_id), noise_frac=method.noise_frac)
    return method


def renormalize_month(base, total: float) -> np.ndarray:
    """Scale one month's weekly ``base`` values so they sum to ``total``.

    A zero total gives zeros; a positive total over an all-zero base is
    split uniformly.
    """
    base = np.asarray(base, dtype=float)
    if base.size == 0:
        raise DomainError("a month needs at least one week")
    return _renormalize(base, np.array([base.size]), np.array([total], dtype=float))


def _renormalize(base: np.ndarray, counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    # Vectorised renormalize_month over consecutive month segments of ``base``.
    if np.any(totals < 0) or np.any(base < 0):
        raise DomainError("monthly totals and weekly base values must be non-negative")
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    sums = np.add.reduceat(base, starts)
    uniform = sums == 0
    phi = np.divide(totals, sums, out=np.zeros_like(totals), where=~uniform)
    out = base * np.repeat(phi, counts)
    fallback = uniform & (totals > 0)
    if np.any(fallback):
        fill = np.repeat(np.where(fallback, totals / counts, np.nan), counts)
        out = np.where(np.isnan(fill), out, fill)
    return out


def _layout(m: MonthlySeries, wmap: MonthWeekMap) -> tuple[np.ndarray, EpiWeekId]:
    counts = np.array(wmap.week_counts(m.start, len(m)))
    return counts, wmap.weeks(m.start)[0]


def _check_additive(m: MonthlySeries) -> None:
    if np.any(m.values < 0):
        raise DomainError(f"unit {m.unit_id!r}: additive monthly values must be non-negative")


def disaggregate_linear(m: MonthlySeries, wmap: MonthWeekMap) -> WeeklySeries:
    """Split each month's total evenly across its epi-weeks."""
    _check_additive(m)
    counts, first = _layout(m, wmap)
    base = np.repeat(m.values / counts, counts)
    return WeeklySeries(m.unit_id, first, _renormalize(base, counts, m.values))


def disaggregate_jitter(
    m: MonthlySeries, wmap: MonthWeekMap, seed: int, noise_frac: float = 0.05
) -> WeeklySeries:
    """Even split plus Gaussian noise, clipped at zero and renormalised per month.

    The noise for week j of month m has standard deviation
    ``noise_frac * V_m / n_m``. Draws come from numpy's PCG64 generator
    seeded with ``seed``, one standard normal per week in chronological order.
    """
    _check_additive(m)
    if not (noise_frac >= 0 and np.isfinite(noise_frac)):
        raise DomainError(f"noise_frac must be finite and >= 0, got {noise_frac}")
    counts, first = _layout(m, wmap)
    mean = np.repeat(m.values / counts, counts)
    z = np.random.default_rng(seed).standard_normal(mean.size)
    base = np.maximum(mean + z * (noise_frac * mean), 0.0)
    return WeeklySeries(m.unit_id, first, _renormalize(base, counts, m.values))


def spline_knots(counts) -> tuple[np.ndarray, np.ndarray]:
    """Knot abscissae in week-index coordinates and the month each knot reads.

    Month ``k`` sits at the centre of its weeks, ``offset_k + (n_k - 1) / 2``.
    An auxiliary knot one month-width before the first centre repeats the
    first month's value.
    """
    counts = np.asarray(counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    centres = offsets + (counts - 1) / 2.0
    knots = np.concatenate(([centres[0] - counts[0]], centres))
    source = np.concatenate(([0], np.arange(counts.size)))
    return knots, source


def fit_monthly_spline(m: MonthlySeries, wmap: MonthWeekMap) -> SplineFit:
    """Spline through the mean weekly level ``V_m / n_m`` of every month."""
    if len(m) < 2:
        raise InsufficientDataError(f"unit {m.unit_id!r}: cubic spline needs at least 2 months, got {len(m)}")
    counts, _ = _layout(m, wmap)
    knots, source = spline_knots(counts)
    return fit_not_a_knot(knots, (m.values / counts)[source])


def spline_base(m: MonthlySeries, wmap: MonthWeekMap) -> np.ndarray:
    """Spline samples at integer week indices, before clipping and renormalisation."""
    fit = fit_monthly_spline(m, wmap)
    n = int(sum(wmap.week_counts(m.start, len(m))))
    return fit(np.arange(n, dtype=float))


def disaggregate_spline(m: MonthlySeries, wmap: MonthWeekMap) -> WeeklySeries:
    _check_additive(m)
    counts, first = _layout(m, wmap)
    base = np.maximum(spline_base(m, wmap), 0.0)
    return WeeklySeries(m.unit_id, first, _renormalize(base, counts, m.values))


def propagate_covariate(m: MonthlySeries, wmap: MonthWeekMap) -> WeeklySeries:
    """Copy every monthly value to each epi-week of its month, without conservation."""
    counts, first = _layout(m, wmap)
    return WeeklySeries(m.unit_id, first, np.repeat(m.values, counts))


def disaggregate(m: MonthlySeries, wmap: MonthWeekMap, method: MethodKind) -> WeeklySeries:
    if isinstance(method, Linear):
        return disaggregate_linear(m, wmap)
    if isinstance(method, Jitter):
        return disaggregate_jitter(m, wmap, method.seed, method.noise_frac)
    if isinstance(method, CubicSpline):
        return disaggregate_spline(m, wmap)
    raise DomainError(f"unsupported method {method!r}")


def compute_rate(hospitalizations, population):
    """Hospitalisation rate, ``hospitalizations / population``. Works element-wise."""
    h = np.asarray(hospitalizations, dtype=float)
    p = np.asarray(population, dtype=float)
    if np.any(p <= 0):
        raise DomainError("population must be positive")
    if np.any(h < 0):
        raise DomainError("hospitalizations must be non-negative")
    rate = h / p
    return float(rate) if rate.ndim == 0 else rate

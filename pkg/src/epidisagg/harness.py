"""Synthetic weekly ground truth for desk-scale method comparisons.

Two regimes are modelled: smooth, bell-shaped outbreaks (one per epi-year)
and zero-inflated sparse series with isolated events. Weekly truth is
aggregated to months, disaggregated back, and scored against the truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disagg import MonthlySeries, WeeklySeries, unit_seed
from .epicalendar import EpiWeekId, MonthWeekMap, month_week_map
from .errors import AlignmentError, DomainError


@dataclass(frozen=True)
class OutbreakSpec:
    peak_week: float
    peak_height: float
    width: float
    baseline: float = 0.0
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        fields = (self.peak_week, self.peak_height, self.width, self.baseline, self.noise_sd)
        if not all(math.isfinite(v) for v in fields):
            raise DomainError("outbreak parameters must be finite")
        if self.width <= 0:
            raise DomainError(f"width must be positive, got {self.width}")
        if self.peak_height < 0 or self.baseline < 0 or self.noise_sd < 0:
            raise DomainError("peak height, baseline and noise sd must be non-negative")


def outbreak_values(spec: OutbreakSpec, n_weeks: int) -> np.ndarray:
    if n_weeks < 1:
        raise DomainError(f"n_weeks must be >= 1, got {n_weeks}")
    t = np.arange(n_weeks, dtype=float)
    bump = spec.peak_height * np.exp(-0.5 * ((t - spec.peak_week) / spec.width) ** 2)
    noise = np.random.default_rng(spec.seed).normal(0.0, 1.0, n_weeks) * spec.noise_sd
    return np.maximum(spec.baseline + bump + noise, 0.0)


def gen_outbreak_series(
    spec: OutbreakSpec, n_weeks: int, start: EpiWeekId = EpiWeekId(2024, 1), unit_id: str = "synthetic"
) -> WeeklySeries:
    """Gaussian bump over a baseline, plus seeded white noise, clipped at zero."""
    return WeeklySeries(unit_id, start, outbreak_values(spec, n_weeks))


def gen_sparse_series(
    zero_prob: float,
    event_height: float,
    n_weeks: int,
    seed: int,
    start: EpiWeekId = EpiWeekId(2024, 1),
    unit_id: str = "synthetic",
) -> WeeklySeries:
    """Each week is independently 0 with probability ``zero_prob``, else ``event_height``."""
    if not 0.0 <= zero_prob <= 1.0:
        raise DomainError(f"zero_prob must be in [0, 1], got {zero_prob}")
    if not (event_height >= 0 and math.isfinite(event_height)):
        raise DomainError(f"event_height must be finite and >= 0, got {event_height}")
    if n_weeks < 1:
        raise DomainError(f"n_weeks must be >= 1, got {n_weeks}")
    hits = np.random.default_rng(seed).random(n_weeks) >= zero_prob
    return WeeklySeries(unit_id, start, np.where(hits, float(event_height), 0.0))


def aggregate_to_monthly(w: WeeklySeries, wmap: MonthWeekMap) -> MonthlySeries:
    """Sum weekly values over each month. The series must cover whole months."""
    first = wmap.position(w.start)
    last_week = w.start.shift(len(w) - 1)
    last = wmap.position(last_week)
    if last - first + 1 != len(w):
        raise AlignmentError(f"unit {w.unit_id!r}: weekly series is not contiguous in the calendar map")
    start_month = wmap.month_of_week(w.start)
    end_month = wmap.month_of_week(last_week)
    if wmap.weeks(start_month)[0] != w.start or wmap.weeks(end_month)[-1] != last_week:
        raise AlignmentError(f"unit {w.unit_id!r}: weekly series must start and end on month boundaries")
    n_months = end_month.months_since(start_month) + 1
    counts = np.array(wmap.week_counts(start_month, n_months))
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    return MonthlySeries(w.unit_id, start_month, np.add.reduceat(w.values, starts))


@dataclass(frozen=True)
class CorpusConfig:
    """Fixed parameters of a synthetic corpus; change the version when editing them."""

    kind: str
    first_year: int = 2024
    last_year: int = 2024
    # smooth regime: one outbreak per epi-year
    peak_range: tuple[float, float] = (8.0, 40.0)
    width_range: tuple[float, float] = (3.0, 7.0)
    height_range: tuple[float, float] = (30.0, 600.0)
    baseline_range: tuple[float, float] = (0.0, 5.0)
    noise_frac: float = 0.03
    # sparse regime
    zero_prob: float = 0.8
    event_range: tuple[float, float] = (1.0, 3.0)
    version: str = "1"

    def __post_init__(self) -> None:
        if self.kind not in ("smooth", "sparse"):
            raise DomainError(f"corpus kind must be 'smooth' or 'sparse', got {self.kind!r}")


SMOOTH = CorpusConfig("smooth")
SPARSE = CorpusConfig("sparse")


def gen_corpus(config: CorpusConfig, n: int, seed: int, wmap: MonthWeekMap | None = None) -> list[WeeklySeries]:
    """``n`` weekly ground-truth series spanning the whole of ``wmap``.

    ``wmap`` defaults to the calendar years named in ``config``.
    """
    if n < 1:
        raise DomainError(f"corpus size must be >= 1, got {n}")
    if wmap is None:
        wmap = month_week_map(config.first_year, config.last_year)
    weeks = wmap.all_weeks()
    # epi-year boundaries inside the span, for one outbreak per year
    year_starts = [i for i, w in enumerate(weeks) if w.week == 1] or [0]
    out = []
    for k in range(n):
        uid = f"{config.kind}{k:05d}"
        rng = np.random.default_rng(unit_seed(seed, uid))
        if config.kind == "smooth":
            heights = rng.uniform(*config.height_range, size=len(year_starts))
            spec = OutbreakSpec(
                peak_week=year_starts[0] + rng.uniform(*config.peak_range),
                peak_height=float(heights[0]),
                width=rng.uniform(*config.width_range),
                baseline=rng.uniform(*config.baseline_range),
                noise_sd=config.noise_frac * float(heights.mean()),
                seed=int(rng.integers(2**31)),
            )
            values = outbreak_values(spec, len(weeks))
            t = np.arange(len(weeks), dtype=float)
            for y0, height in zip(year_starts[1:], heights[1:]):
                peak = y0 + rng.uniform(*config.peak_range)
                width = rng.uniform(*config.width_range)
                values = values + height * np.exp(-0.5 * ((t - peak) / width) ** 2)
        else:
            s = gen_sparse_series(
                config.zero_prob,
                rng.uniform(*config.event_range),
                len(weeks),
                int(rng.integers(2**31)),
            )
            values = s.values
        out.append(WeeklySeries(uid, weeks[0], values))
    return out

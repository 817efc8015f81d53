import math

import numpy as np
import pytest

from epidisagg.disagg import CubicSpline, Jitter, Linear, MonthlySeries, WeeklySeries, disaggregate
from epidisagg.epicalendar import EpiWeekId, MonthKey, month_week_map
from epidisagg.errors import AlignmentError, DomainError
from epidisagg.harness import (
    SMOOTH,
    SPARSE,
    CorpusConfig,
    OutbreakSpec,
    aggregate_to_monthly,
    gen_corpus,
    gen_outbreak_series,
    gen_sparse_series,
)

WMAP = month_week_map(2024)


def test_noise_free_outbreak_is_symmetric_bump():
    w = gen_outbreak_series(OutbreakSpec(peak_week=20, peak_height=100, width=4), 41)
    assert np.argmax(w.values) == 20 and w.values[20] == 100
    np.testing.assert_allclose(w.values, w.values[::-1], rtol=1e-12)


def test_flat_outbreak_is_baseline():
    w = gen_outbreak_series(OutbreakSpec(peak_week=5, peak_height=0, width=2, baseline=3.5), 30)
    assert (w.values == 3.5).all()


def test_outbreak_seeded_and_clipped():
    spec = OutbreakSpec(peak_week=10, peak_height=5, width=2, noise_sd=3, seed=9)
    a, b = gen_outbreak_series(spec, 52), gen_outbreak_series(spec, 52)
    assert a.values.tobytes() == b.values.tobytes()
    assert (a.values >= 0).all() and (a.values == 0).any()


def test_outbreak_spec_validation():
    with pytest.raises(DomainError):
        OutbreakSpec(peak_week=1, peak_height=1, width=0)
    with pytest.raises(DomainError):
        OutbreakSpec(peak_week=1, peak_height=-1, width=1)
    with pytest.raises(DomainError):
        OutbreakSpec(peak_week=math.nan, peak_height=1, width=1)
    with pytest.raises(DomainError):
        gen_outbreak_series(OutbreakSpec(1, 1, 1), 0)


def test_sparse_extremes():
    assert (gen_sparse_series(1.0, 3.0, 100, seed=1).values == 0).all()
    assert (gen_sparse_series(0.0, 3.0, 100, seed=1).values == 3.0).all()
    with pytest.raises(DomainError):
        gen_sparse_series(1.5, 1.0, 10, seed=0)


def test_sparse_zero_fraction_within_binomial_band():
    n, p = 10_000, 0.8
    sigma = math.sqrt(n * p * (1 - p))
    zeros = int((gen_sparse_series(p, 2.0, n, seed=0).values == 0).sum())
    assert abs(zeros - n * p) <= 3 * sigma
    # pooled over many seeds the band is much tighter
    pooled = sum(int((gen_sparse_series(p, 2.0, n, seed=s).values == 0).sum()) for s in range(100))
    assert abs(pooled - 100 * n * p) <= 3 * math.sqrt(100 * n * p * (1 - p))


def test_aggregate_four_week_month():
    month = next(m for m in WMAP.months if WMAP.n_weeks(m) == 4)
    w = WeeklySeries("u", WMAP.weeks(month)[0], [2.0, 2.0, 2.0, 2.0])
    m = aggregate_to_monthly(w, WMAP)
    assert m.start == month and list(m.values) == [8.0]


def test_aggregate_requires_whole_months():
    w = WeeklySeries("u", EpiWeekId(2024, 2), np.ones(8))
    with pytest.raises(AlignmentError):
        aggregate_to_monthly(w, WMAP)
    w = WeeklySeries("u", EpiWeekId(2025, 1), np.ones(4))
    with pytest.raises(AlignmentError):
        aggregate_to_monthly(w, WMAP)


@pytest.mark.parametrize("method", [Linear(), Jitter(seed=4), CubicSpline()])
def test_round_trip(method):
    rng = np.random.default_rng(2)
    m = MonthlySeries("u", MonthKey(2024, 1), rng.uniform(0, 1e3, 12))
    back = aggregate_to_monthly(disaggregate(m, WMAP, method), WMAP)
    assert back.start == m.start
    if isinstance(method, Linear):
        np.testing.assert_allclose(back.values, m.values, rtol=1e-15)
    np.testing.assert_allclose(back.values, m.values, rtol=1e-9)


def test_corpus_deterministic_and_whole_span():
    a = gen_corpus(SMOOTH, 5, seed=3)
    b = gen_corpus(SMOOTH, 5, seed=3)
    assert [s.values.tobytes() for s in a] == [s.values.tobytes() for s in b]
    assert all(len(s) == 52 and s.start == EpiWeekId(2024, 1) for s in a)
    assert [s.unit_id for s in a] == [f"smooth{k:05d}" for k in range(5)]
    # unit series do not depend on how many units are generated
    assert gen_corpus(SMOOTH, 2, seed=3)[1].values.tobytes() == a[1].values.tobytes()


def test_multi_year_smooth_corpus_has_yearly_peaks():
    wmap = month_week_map(2001, 2003)
    s = gen_corpus(SMOOTH, 1, seed=0, wmap=wmap)[0]
    starts = [i for i, w in enumerate(wmap.all_weeks()) if w.week == 1]
    peaks = [int(np.argmax(s.values[a:b])) for a, b in zip(starts, starts[1:] + [len(s)])]
    assert all(SMOOTH.peak_range[0] - 8 <= p <= SMOOTH.peak_range[1] + 8 for p in peaks)


def test_sparse_corpus_mostly_zero():
    s = np.concatenate([w.values for w in gen_corpus(SPARSE, 50, seed=1)])
    assert 0.75 < np.mean(s == 0) < 0.85


def test_corpus_validation():
    with pytest.raises(DomainError):
        CorpusConfig("bumpy")
    with pytest.raises(DomainError):
        gen_corpus(SMOOTH, 0, seed=1)

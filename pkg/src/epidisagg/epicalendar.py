"""Sunday-start epidemiological weeks and their attribution to calendar months.

Epi-weeks run Sunday through Saturday. Week 1 of an epi-year is the week
whose Wednesday falls in January, i.e. the week holding at least four days
of the new year. Each epi-week is attributed to the month containing its
Wednesday, so every month owns either 4 or 5 whole weeks and the weeks of
epi-year ``y`` are exactly the weeks whose Wednesday lies in calendar year ``y``.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple

from .errors import AlignmentError, DomainError, RangeError

MIN_YEAR = 1990
MAX_YEAR = 2100

_ONE_WEEK = dt.timedelta(days=7)


class EpiWeekId(NamedTuple):
    epi_year: int
    week: int

    def __str__(self) -> str:
        return f"{self.epi_year}-W{self.week:02d}"

    @property
    def sunday(self) -> dt.date:
        return epiyear_start(self.epi_year) + (self.week - 1) * _ONE_WEEK

    @property
    def wednesday(self) -> dt.date:
        return self.sunday + dt.timedelta(days=3)

    def shift(self, n: int) -> "EpiWeekId":
        """The epi-week ``n`` weeks later (earlier for negative ``n``)."""
        return epiweek_of(self.sunday + n * _ONE_WEEK)


class MonthKey(NamedTuple):
    year: int
    month: int

    def __str__(self) -> str:
        return f"{self.year}-{self.month:02d}"

    def shift(self, n: int) -> "MonthKey":
        idx = self.year * 12 + (self.month - 1) + n
        return MonthKey(idx // 12, idx % 12 + 1)

    def months_since(self, other: "MonthKey") -> int:
        return (self.year - other.year) * 12 + (self.month - other.month)


def month_key(year: int, month: int) -> MonthKey:
    if not 1 <= month <= 12:
        raise DomainError(f"month must be in 1..12, got {month}")
    return MonthKey(int(year), int(month))


def _check_year(year: int) -> None:
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise RangeError(f"year {year} outside supported range {MIN_YEAR}-{MAX_YEAR}")


def _start_unchecked(year: int) -> dt.date:
    # Sunday of the week containing 4 January
    jan4 = dt.date(year, 1, 4)
    return jan4 - dt.timedelta(days=(jan4.weekday() + 1) % 7)


def epiyear_start(epi_year: int) -> dt.date:
    """Sunday on which week 1 of ``epi_year`` begins."""
    _check_year(epi_year)
    return _start_unchecked(epi_year)


@lru_cache(maxsize=None)
def weeks_in_epiyear(epi_year: int) -> int:
    """Number of epi-weeks (52 or 53) in ``epi_year``."""
    _check_year(epi_year)
    return (_start_unchecked(epi_year + 1) - _start_unchecked(epi_year)).days // 7


def epiweek_of(date: dt.date) -> EpiWeekId:
    """Epi-week containing ``date``.

    Raises:
        RangeError: if the date's epi-year is outside 1990-2100.
    """
    if isinstance(date, dt.datetime):
        date = date.date()
    year = date.year
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise RangeError(f"date {date} outside supported range {MIN_YEAR}-{MAX_YEAR}")
    # track the epi-year through the Wednesday of the date's week
    wednesday = date + dt.timedelta(days=3 - (date.weekday() + 1) % 7)
    epi_year = wednesday.year
    _check_year(epi_year)
    week = (date - _start_unchecked(epi_year)).days // 7 + 1
    return EpiWeekId(epi_year, week)


def check_epiweek(week: EpiWeekId) -> EpiWeekId:
    _check_year(week.epi_year)
    if not 1 <= week.week <= weeks_in_epiyear(week.epi_year):
        raise DomainError(
            f"epi-year {week.epi_year} has {weeks_in_epiyear(week.epi_year)} weeks, got week {week.week}"
        )
    return EpiWeekId(int(week.epi_year), int(week.week))


def iter_epiweeks(epi_year: int) -> Iterator[EpiWeekId]:
    for w in range(1, weeks_in_epiyear(epi_year) + 1):
        yield EpiWeekId(epi_year, w)


@dataclass(frozen=True)
class MonthWeekMap:
    """Ordered partition of a span of epi-weeks into calendar months.

    ``entries`` maps each covered month, in chronological order, to the
    epi-weeks whose Wednesday falls in it.
    """

    entries: tuple[tuple[MonthKey, tuple[EpiWeekId, ...]], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _position: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        index = {}
        position = {}
        pos = 0
        for i, (month, weeks) in enumerate(self.entries):
            index[month] = i
            for w in weeks:
                position[w] = pos
                pos += 1
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_position", position)

    def __contains__(self, month: object) -> bool:
        return month in self._index

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[MonthKey]:
        return (m for m, _ in self.entries)

    @property
    def months(self) -> list[MonthKey]:
        return [m for m, _ in self.entries]

    @property
    def first_month(self) -> MonthKey:
        return self.entries[0][0]

    @property
    def last_month(self) -> MonthKey:
        return self.entries[-1][0]

    def weeks(self, month: MonthKey) -> tuple[EpiWeekId, ...]:
        try:
            return self.entries[self._index[month]][1]
        except KeyError:
            raise AlignmentError(f"month {month} not covered by calendar map") from None

    def n_weeks(self, month: MonthKey) -> int:
        return len(self.weeks(month))

    def all_weeks(self) -> list[EpiWeekId]:
        return [w for _, weeks in self.entries for w in weeks]

    def week_counts(self, start: MonthKey, n_months: int) -> list[int]:
        """Week counts for ``n_months`` consecutive months from ``start``."""
        i0 = self._index.get(start)
        if i0 is None or n_months < 0 or i0 + n_months > len(self.entries):
            end = start.shift(max(n_months, 1) - 1)
            raise AlignmentError(
                f"months {start}..{end} not covered by calendar map "
                f"({self.first_month}..{self.last_month})"
            )
        return [len(w) for _, w in self.entries[i0 : i0 + n_months]]

    def weeks_for_span(self, start: MonthKey, n_months: int) -> list[EpiWeekId]:
        self.week_counts(start, n_months)
        i0 = self._index[start]
        return [w for _, weeks in self.entries[i0 : i0 + n_months] for w in weeks]

    def month_of_week(self, week: EpiWeekId) -> MonthKey:
        self.position(week)
        wed = week.wednesday
        return MonthKey(wed.year, wed.month)

    def position(self, week: EpiWeekId) -> int:
        """Zero-based index of ``week`` within the whole map."""
        try:
            return self._position[week]
        except KeyError:
            raise AlignmentError(f"week {week} not covered by calendar map") from None


def month_week_map(first_year: int, last_year: int | None = None) -> MonthWeekMap:
    """Month -> epi-week partition for calendar years ``first_year..last_year`` inclusive."""
    if last_year is None:
        last_year = first_year
    if last_year < first_year:
        raise DomainError(f"empty year range {first_year}..{last_year}")
    _check_year(first_year)
    _check_year(last_year)
    return _build_map(first_year, last_year)


@lru_cache(maxsize=64)
def _build_map(first_year: int, last_year: int) -> MonthWeekMap:
    buckets: dict[MonthKey, list[EpiWeekId]] = {}
    for y in range(first_year, last_year + 1):
        for w in iter_epiweeks(y):
            wed = w.wednesday
            buckets.setdefault(MonthKey(wed.year, wed.month), []).append(w)
    return MonthWeekMap(tuple((m, tuple(ws)) for m, ws in buckets.items()))


def map_for_months(months: Iterable[MonthKey]) -> MonthWeekMap:
    """Smallest whole-year map covering every month in ``months``."""
    years = [m.year for m in months]
    if not years:
        raise DomainError("no months given")
    return month_week_map(min(years), max(years))

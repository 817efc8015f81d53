"""Batch orchestration: CSV ingestion, per-unit validation, summary tables and the dataset package.

File formats (UTF-8, header row required, ``.`` as decimal separator):

* monthly input      ``unit_id,year,month,value``
* weekly (in & out)  ``unit_id,epi_year,epi_week,value``
* ``metrics_by_unit.csv``  one :class:`MetricsRecord` per row
* ``summary_stats.csv``    ``metric,method,statistic,value``

Infinite values are written as ``inf``; undefined values as an empty field.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .disagg import (
    METHOD_NAMES,
    MethodKind,
    MonthlySeries,
    WeeklySeries,
    disaggregate,
    for_unit,
    parse_method,
    propagate_covariate,
)
from .epicalendar import EpiWeekId, MonthWeekMap, check_epiweek, map_for_months, month_key
from .errors import (
    AlignmentError,
    ContiguityError,
    DomainError,
    DuplicateKeyError,
    EpiDisaggError,
    MissingCovariateError,
    ParseError,
)
from .metrics import METRIC_NAMES, MetricsRecord, compare, silverman_bandwidth

log = logging.getLogger(__name__)

MONTHLY_HEADER = ("unit_id", "year", "month", "value")
WEEKLY_HEADER = ("unit_id", "epi_year", "epi_week", "value")
RECORD_HEADER = tuple(f.name for f in fields(MetricsRecord))
SUMMARY_HEADER = ("metric", "method", "statistic", "value")
STAT_NAMES = ("count", "n_inf", "n_missing", "mean", "std", "min", "q25", "median", "q75", "max")


# ---------------------------------------------------------------- CSV ingestion


def _rows(path, header: Sequence[str]):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [c.strip() for c in first] != list(header):
            raise ParseError(path, 1, f"expected header {','.join(header)}, got {','.join(first or [])}")
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(path, lineno, f"expected {len(header)} fields, got {len(row)}")
            yield lineno, [c.strip() for c in row]


def _parse_int(path, lineno: int, text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(path, lineno, f"{what} is not an integer: {text!r}") from None


def _parse_float(path, lineno: int, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, lineno, f"value is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(path, lineno, f"value must be finite: {text!r}")
    return value


def load_monthly_csv(path, additive: bool = True) -> dict[str, MonthlySeries]:
    """One :class:`MonthlySeries` per unit, units in sorted order.

    Raises:
        ParseError: malformed row (carries the line number).
        DuplicateKeyError: a (unit, month) pair repeats.
        ContiguityError: a unit skips a month.
        DomainError: negative value while ``additive`` is set.
    """
    by_unit: dict[str, dict] = defaultdict(dict)
    for lineno, (uid, y, m, v) in _rows(path, MONTHLY_HEADER):
        if not uid:
            raise ParseError(path, lineno, "empty unit_id")
        try:
            key = month_key(_parse_int(path, lineno, y, "year"), _parse_int(path, lineno, m, "month"))
        except DomainError as exc:
            raise ParseError(path, lineno, str(exc)) from None
        value = _parse_float(path, lineno, v)
        if additive and value < 0:
            raise DomainError(f"{path}:{lineno}: negative value {value} for additive target (unit {uid!r})")
        if key in by_unit[uid]:
            raise DuplicateKeyError(f"{path}:{lineno}: duplicate row for unit {uid!r}, month {key}")
        by_unit[uid][key] = value
    out = {}
    for uid in sorted(by_unit):
        months = sorted(by_unit[uid])
        start = months[0]
        for i, key in enumerate(months):
            expected = start.shift(i)
            if key != expected:
                raise ContiguityError(uid, expected)
        out[uid] = MonthlySeries(uid, start, [by_unit[uid][k] for k in months])
    return out


def load_weekly_csv(path) -> dict[str, WeeklySeries]:
    """One :class:`WeeklySeries` per unit, keyed by ``(epi_year, epi_week)``."""
    by_unit: dict[str, dict] = defaultdict(dict)
    for lineno, (uid, y, w, v) in _rows(path, WEEKLY_HEADER):
        if not uid:
            raise ParseError(path, lineno, "empty unit_id")
        week = EpiWeekId(_parse_int(path, lineno, y, "epi_year"), _parse_int(path, lineno, w, "epi_week"))
        try:
            check_epiweek(week)
        except DomainError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from None
        if week in by_unit[uid]:
            raise DuplicateKeyError(f"{path}:{lineno}: duplicate row for unit {uid!r}, week {week}")
        by_unit[uid][week] = _parse_float(path, lineno, v)
    out = {}
    for uid in sorted(by_unit):
        weeks = sorted(by_unit[uid])
        expected = weeks[0]
        for week in weeks:
            if week != expected:
                raise ContiguityError(uid, expected)
            expected = week.shift(1)
        out[uid] = WeeklySeries(uid, weeks[0], [by_unit[uid][k] for k in weeks])
    return out


load_weekly_reference_csv = load_weekly_csv


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return ""
    return repr(value)


def write_weekly_csv(series: Iterable[WeeklySeries], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(WEEKLY_HEADER)
        for s in sorted(series, key=lambda s: s.unit_id):
            for week, value in zip(s.weeks(), s.values):
                w.writerow((s.unit_id, week.epi_year, week.week, _fmt(value)))
    return path


def write_monthly_csv(series: Iterable[MonthlySeries], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MONTHLY_HEADER)
        for s in sorted(series, key=lambda s: s.unit_id):
            for month, value in zip(s.months, s.values):
                w.writerow((s.unit_id, month.year, month.month, _fmt(value)))
    return path


# ---------------------------------------------------------------- run config


@dataclass
class RunConfig:
    input_path: Optional[Path] = None
    reference_path: Optional[Path] = None
    methods: tuple[str, ...] = METHOD_NAMES
    seed: int = 0
    noise_frac: float = 0.05
    outdir: Path = Path("reports")
    emit_package: bool = False
    covariate: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.methods:
            raise DomainError("select at least one method")
        for name in self.methods:
            parse_method(name)
        for p in (self.input_path, self.reference_path):
            if p is not None and not str(p):
                raise DomainError("paths must be non-empty")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")

    def method_kinds(self) -> list[MethodKind]:
        return [parse_method(n, self.seed, self.noise_frac) for n in self.methods]


def disaggregate_all(
    monthly: Mapping[str, MonthlySeries], wmap: MonthWeekMap, method: MethodKind, covariate: bool = False
) -> list[WeeklySeries]:
    if covariate:
        return [propagate_covariate(m, wmap) for m in monthly.values()]
    return [disaggregate(m, wmap, for_unit(method, m.unit_id)) for m in monthly.values()]


# ---------------------------------------------------------------- validation


def validate_unit(
    m: MonthlySeries, ref: WeeklySeries, wmap: MonthWeekMap, methods: Sequence[MethodKind]
) -> list[MetricsRecord]:
    """Disaggregate one unit with every method and score it against ``ref``.

    All methods share one KDE bandwidth computed from ``ref`` alone.
    """
    bandwidth = silverman_bandwidth(ref.values)
    records = []
    for method in methods:
        w = disaggregate(m, wmap, for_unit(method, m.unit_id))
        if w.start != ref.start or len(w) != len(ref):
            end = ref.start.shift(len(ref) - 1)
            raise AlignmentError(
                f"unit {m.unit_id!r}: disaggregated weeks {w.start}..{w.start.shift(len(w) - 1)} "
                f"do not match reference weeks {ref.start}..{end}"
            )
        records.append(compare(m.unit_id, method.name, w.values, ref.values, bandwidth))
    return records


def _validate_chunk(args):
    items, wmap, methods = args
    out = []
    for m, ref in items:
        out.extend(validate_unit(m, ref, wmap, methods))
    return out


def _record_key(r: MetricsRecord):
    return (r.unit_id, r.method)


def run_validation(
    monthly: Mapping[str, MonthlySeries],
    reference: Mapping[str, WeeklySeries],
    wmap: Optional[MonthWeekMap],
    methods: Sequence[Union[str, MethodKind]],
    config: Optional[RunConfig] = None,
) -> list[MetricsRecord]:
    """Metrics for every unit present in both inputs and every method.

    Method names are resolved with ``config.seed`` and ``config.noise_frac``.
    Units present on one side only are skipped with a log message. Work is
    split over ``config.workers`` processes; output is sorted by (unit_id, method).
    """
    config = config or RunConfig()
    kinds = [parse_method(m, config.seed, config.noise_frac) if isinstance(m, str) else m for m in methods]
    if not kinds:
        raise DomainError("select at least one method")
    for uid in sorted(set(monthly) - set(reference)):
        log.warning("skipping unit %s: no reference series", uid)
    for uid in sorted(set(reference) - set(monthly)):
        log.warning("skipping unit %s: no monthly series", uid)
    units = sorted(set(monthly) & set(reference))
    if wmap is None:
        if not units:
            return []
        wmap = map_for_months([monthly[u].start for u in units] + [monthly[u].end for u in units])
    items = [(monthly[u], reference[u]) for u in units]

    if config.workers == 1 or len(items) < 2:
        records = _validate_chunk((items, wmap, kinds))
    else:
        n_chunks = min(len(items), config.workers * 4)
        chunks = [(items[i::n_chunks], wmap, kinds) for i in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = [r for part in pool.map(_validate_chunk, chunks) for r in part]
    return sorted(records, key=_record_key)


# ---------------------------------------------------------------- aggregation


@dataclass(frozen=True)
class DescriptiveStats:
    """Distribution summary of one metric for one method across units.

    ``mean``/``std``/``max`` are +inf when any value is +inf; quantiles use
    the finite values only, with their count disclosed in ``n_inf``.
    Missing (undefined) values are excluded and counted in ``n_missing``.
    """

    count: int
    n_inf: int
    n_missing: int
    mean: float
    std: float
    min: float
    q25: float
    median: float
    q75: float
    max: float


def describe(values: Sequence[Optional[float]]) -> DescriptiveStats:
    present = [float(v) for v in values if v is not None and not math.isnan(v)]
    n_missing = len(values) - len(present)
    if not present:
        raise DomainError("no values to summarise")
    arr = np.array(present)
    finite = arr[np.isfinite(arr)]
    n_inf = int(np.sum(np.isposinf(arr)))
    if np.any(np.isneginf(arr)):
        raise DomainError("negative infinity is not a valid metric value")
    if n_inf:
        mean = std = math.inf
    else:
        mean = float(arr.mean())
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    if finite.size:
        q25, median, q75 = (float(q) for q in np.percentile(finite, [25, 50, 75]))
    else:
        q25 = median = q75 = math.inf
    return DescriptiveStats(
        count=int(arr.size),
        n_inf=n_inf,
        n_missing=n_missing,
        mean=mean,
        std=std,
        min=float(arr.min()),
        q25=q25,
        median=median,
        q75=q75,
        max=float(arr.max()),
    )


def aggregate_stats(records: Sequence[MetricsRecord], metric: str, method: str) -> DescriptiveStats:
    if metric not in METRIC_NAMES:
        raise DomainError(f"unknown metric {metric!r}")
    selected = [getattr(r, metric) for r in records if r.method == method]
    if not selected:
        raise DomainError(f"no records for method {method!r}")
    return describe(selected)


def summarize(records: Sequence[MetricsRecord]) -> dict[tuple[str, str], DescriptiveStats]:
    """Stats for every (metric, method) pair with at least one defined value."""
    methods = sorted({r.method for r in records})
    out = {}
    for metric in METRIC_NAMES:
        for method in methods:
            values = [getattr(r, metric) for r in records if r.method == method]
            if any(v is not None for v in values):
                out[(metric, method)] = describe(values)
    return out


def emit_reports(
    records: Sequence[MetricsRecord], stats: Mapping[tuple[str, str], DescriptiveStats], outdir
) -> list[Path]:
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        by_unit = outdir / "metrics_by_unit.csv"
        with by_unit.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RECORD_HEADER)
            for r in sorted(records, key=_record_key):
                w.writerow([_fmt(getattr(r, name)) for name in RECORD_HEADER])
        summary = outdir / "summary_stats.csv"
        with summary.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_HEADER)
            for metric in METRIC_NAMES:
                for (m_name, method), st in sorted(stats.items()):
                    if m_name != metric:
                        continue
                    for stat in STAT_NAMES:
                        w.writerow((metric, method, stat, _fmt(getattr(st, stat))))
    except OSError as exc:
        raise OSError(f"cannot write reports to {outdir}: {exc}") from exc
    return [by_unit, summary]


def load_metrics_csv(path) -> list[MetricsRecord]:
    """Read back a ``metrics_by_unit.csv``."""
    out = []
    for lineno, row in _rows(path, RECORD_HEADER):
        values = dict(zip(RECORD_HEADER, row))
        kw = {"unit_id": values["unit_id"], "method": values["method"], "flags": values["flags"]}
        for name in METRIC_NAMES:
            text = values[name]
            kw[name] = None if text == "" else float(text)
        out.append(MetricsRecord(**kw))
    return out


# ---------------------------------------------------------------- dataset package

# IBGE federative-unit codes; the first two digits of a municipality code
UF_NAMES = {
    "11": "Rondônia", "12": "Acre", "13": "Amazonas", "14": "Roraima", "15": "Pará",
    "16": "Amapá", "17": "Tocantins", "21": "Maranhão", "22": "Piauí", "23": "Ceará",
    "24": "Rio Grande do Norte", "25": "Paraíba", "26": "Pernambuco", "27": "Alagoas",
    "28": "Sergipe", "29": "Bahia", "31": "Minas Gerais", "32": "Espírito Santo",
    "33": "Rio de Janeiro", "35": "São Paulo", "41": "Paraná", "42": "Santa Catarina",
    "43": "Rio Grande do Sul", "50": "Mato Grosso do Sul", "51": "Mato Grosso",
    "52": "Goiás", "53": "Distrito Federal",
}  # fmt: skip

TARGET_COLUMN = "dengue_rate"
TARGET_FILE = "Dengue_hospitalization_rate_cubic.csv"


def state_of(unit_id: str) -> tuple[str, str]:
    """(IBGE code, state name) from a 6- or 7-digit IBGE municipality code."""
    code = unit_id[:2]
    if unit_id.isdigit() and len(unit_id) in (6, 7) and code in UF_NAMES:
        return code, UF_NAMES[code]
    raise DomainError(f"cannot infer the state of unit {unit_id!r}; supply an explicit state mapping")


def load_states_csv(path) -> dict[str, tuple[str, str]]:
    """``unit_id,state_code,state_name`` -> {unit_id: (code, name)}."""
    return {uid: (code, name) for _, (uid, code, name) in _rows(path, ("unit_id", "state_code", "state_name"))}


def state_folder(code: str, name: str) -> str:
    return f"Dengue by state {code} - {name}"


_README = """# DengueDataset

Weekly (epidemiological-week) dengue hospitalization rates per municipality,
disaggregated from monthly counts with a mass-conserving cubic spline, and
weekly-aligned covariates propagated from their monthly values.

## Provenance

- Target source: {target_source}
- Covariate source: {covariate_source}
- Disaggregation: cubic spline through monthly mean weekly levels with
  per-month mass correction (weekly values sum to the monthly total)
- Covariates: monthly value repeated on every epi-week of the month
- Span: epi-weeks {first_week} to {last_week}
- Units: {n_units} municipalities in {n_states} state(s)

## Layout

- `data/Dengue by state {{IBGE code}} - {{State name}}/` one table per state,
  target plus covariates
- `target/{target_file}` target only
- `features/{{Covariate}}_cubic.csv` one table per covariate

## Columns

- `unit_id` municipality code
- `epi_year`, `epi_week` Sunday-start epidemiological week
- `{target_column}` hospitalizations divided by population
- one column per covariate in the state tables: {covariates}

Feature and target files use `unit_id,epi_year,epi_week,value`.
"""

_LICENSE = """Dataset license: {license_name}

This file is a placeholder. Replace it with the full text of the license
under which the dataset is distributed.
"""


def emit_dataset_package(
    target: Mapping[str, WeeklySeries],
    covariates: Mapping[str, Mapping[str, WeeklySeries]],
    outdir,
    states: Optional[Mapping[str, tuple[str, str]]] = None,
    license_name: str = "to be specified by the dataset maintainers",
    target_source: str = "DataSUS monthly hospitalization records",
    covariate_source: str = "IBGE",
) -> Path:
    """Write the ``DengueDataset`` tree rooted at ``outdir``.

    ``target`` holds the weekly target per unit (computed with the cubic
    spline); ``covariates`` maps covariate name -> unit -> weekly series.
    States come from ``states`` or, failing that, from IBGE unit codes.

    Raises:
        MissingCovariateError: a covariate lacks a unit present in ``target``.
        AlignmentError: a covariate series does not cover the target's weeks.
    """
    root = Path(outdir)
    if not target:
        raise DomainError("no target series to package")
    units = sorted(target)
    names = sorted(covariates)
    for name in names:
        for uid in units:
            cov = covariates[name].get(uid)
            if cov is None:
                raise MissingCovariateError(name, uid)
            if cov.start != target[uid].start or len(cov) != len(target[uid]):
                raise AlignmentError(f"covariate {name!r}, unit {uid!r}: weeks do not match the target")
    if not names:
        log.warning("no covariates supplied; features/ will be empty")
    unit_state = {uid: (states[uid] if states and uid in states else state_of(uid)) for uid in units}

    for sub in ("data", "target", "features"):
        (root / sub).mkdir(parents=True, exist_ok=True)

    by_state: dict[tuple[str, str], list[str]] = defaultdict(list)
    for uid in units:
        by_state[unit_state[uid]].append(uid)

    def _week_rows(uid):
        s = target[uid]
        return zip(s.weeks(), range(len(s)))

    for (code, name), members in sorted(by_state.items()):
        folder = root / "data" / state_folder(code, name)
        folder.mkdir(parents=True, exist_ok=True)
        with (folder / f"dengue_state_{code}.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("unit_id", "epi_year", "epi_week", TARGET_COLUMN, *names))
            for uid in members:
                for week, i in _week_rows(uid):
                    w.writerow(
                        (
                            uid,
                            week.epi_year,
                            week.week,
                            _fmt(target[uid].values[i]),
                            *(_fmt(covariates[c][uid].values[i]) for c in names),
                        )
                    )

    write_weekly_csv([target[u] for u in units], root / "target" / TARGET_FILE)
    for name in names:
        write_weekly_csv([covariates[name][u] for u in units], root / "features" / f"{name}_cubic.csv")

    first = target[units[0]].start
    last = first.shift(len(target[units[0]]) - 1)
    (root / "README.md").write_text(
        _README.format(
            target_source=target_source,
            covariate_source=covariate_source,
            first_week=first,
            last_week=last,
            n_units=len(units),
            n_states=len(by_state),
            target_file=TARGET_FILE,
            target_column=TARGET_COLUMN,
            covariates=", ".join(f"`{n}`" for n in names) or "(none)",
        ),
        encoding="utf-8",
    )
    (root / "LICENSE").write_text(_LICENSE.format(license_name=license_name), encoding="utf-8")
    return root


# ---------------------------------------------------------------- synthetic bench


def run_bench(
    kind: str,
    n: int,
    seed: int,
    outdir=None,
    methods: Sequence[str] = METHOD_NAMES,
    noise_frac: float = 0.05,
    workers: int = 1,
    first_year: Optional[int] = None,
    last_year: Optional[int] = None,
) -> list[MetricsRecord]:
    """Generate a synthetic corpus, round-trip it through monthly totals and validate.

    When ``outdir`` is given, writes ``monthly.csv``, ``reference.csv`` and
    the two report files there.
    """
    from dataclasses import replace

    from .epicalendar import month_week_map
    from .harness import SMOOTH, SPARSE, aggregate_to_monthly, gen_corpus

    config = {"smooth": SMOOTH, "sparse": SPARSE}.get(kind)
    if config is None:
        raise DomainError(f"unknown corpus {kind!r}; expected smooth or sparse")
    if first_year is not None or last_year is not None:
        first = first_year if first_year is not None else config.first_year
        config = replace(config, first_year=first, last_year=last_year if last_year is not None else first)
    wmap = month_week_map(config.first_year, config.last_year)
    truth = {s.unit_id: s for s in gen_corpus(config, n, seed, wmap)}
    monthly = {u: aggregate_to_monthly(s, wmap) for u, s in truth.items()}
    run = RunConfig(methods=tuple(methods), seed=seed, noise_frac=noise_frac, workers=workers)
    records = run_validation(monthly, truth, wmap, run.methods, run)
    if outdir is not None:
        outdir = Path(outdir)
        write_monthly_csv(monthly.values(), outdir / "monthly.csv")
        write_weekly_csv(truth.values(), outdir / "reference.csv")
        emit_reports(records, summarize(records), outdir)
    return records


def cpu_count() -> int:
    return os.cpu_count() or 1

"""Command-line entry point: ``epidisagg {disagg,validate,package,calendar,bench}``.

Exit status is 0 on success, 1 for validation or domain errors in the data,
and 2 for I/O and parse errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .disagg import METHOD_NAMES, CubicSpline, WeeklySeries, compute_rate, disaggregate
from .epicalendar import map_for_months, month_week_map
from .errors import EpiDisaggError, ParseError
from .pipeline import (
    RunConfig,
    disaggregate_all,
    emit_dataset_package,
    emit_reports,
    load_monthly_csv,
    load_states_csv,
    load_weekly_csv,
    run_bench,
    run_validation,
    summarize,
    write_weekly_csv,
)

log = logging.getLogger("epidisagg")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def _methods(text: str) -> tuple[str, ...]:
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    if not names:
        raise argparse.ArgumentTypeError("give at least one method")
    for n in names:
        if n not in METHOD_NAMES:
            raise argparse.ArgumentTypeError(f"unknown method {n!r}; choose from {','.join(METHOD_NAMES)}")
    return names


def _wmap_for(monthly):
    months = [s.start for s in monthly.values()] + [s.end for s in monthly.values()]
    return map_for_months(months)


def cmd_disagg(args) -> int:
    monthly = load_monthly_csv(args.input, additive=not args.covariate)
    if not monthly:
        raise EpiDisaggError(f"{args.input}: no data rows")
    config = RunConfig(
        input_path=args.input,
        methods=(args.method,),
        seed=args.seed,
        noise_frac=args.noise_frac,
        covariate=args.covariate,
    )
    weekly = disaggregate_all(monthly, _wmap_for(monthly), config.method_kinds()[0], covariate=args.covariate)
    write_weekly_csv(weekly, args.out)
    log.info("wrote %d units to %s", len(weekly), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    config = RunConfig(
        input_path=args.input,
        reference_path=args.reference,
        methods=args.methods,
        seed=args.seed,
        noise_frac=args.noise_frac,
        outdir=args.out,
        emit_package=args.emit_package,
        workers=args.workers,
    )
    monthly = load_monthly_csv(config.input_path)
    reference = load_weekly_csv(config.reference_path)
    if not monthly:
        raise EpiDisaggError(f"{args.input}: no data rows")
    wmap = _wmap_for(monthly)
    records = run_validation(monthly, reference, wmap, config.methods, config)
    paths = emit_reports(records, summarize(records), config.outdir)
    for p in paths:
        log.info("wrote %s", p)
    if config.emit_package:
        target = {u: disaggregate(m, wmap, CubicSpline()) for u, m in monthly.items()}
        root = emit_dataset_package(target, {}, Path(config.outdir) / "DengueDataset")
        log.info("wrote dataset package to %s", root)
    return EXIT_OK


def cmd_package(args) -> int:
    target = load_weekly_csv(args.target)
    if not target:
        raise EpiDisaggError(f"{args.target}: no data rows")
    if args.population:
        population = _load_population(args.population)
        missing = sorted(set(target) - set(population))
        if missing:
            raise EpiDisaggError(f"no population for unit(s): {', '.join(missing)}")
        target = {u: WeeklySeries(u, s.start, compute_rate(s.values, population[u])) for u, s in target.items()}
    covariates = {}
    features = Path(args.features)
    if not features.is_dir():
        raise FileNotFoundError(f"features directory not found: {features}")
    for path in sorted(features.glob("*.csv")):
        name = path.stem[: -len("_cubic")] if path.stem.endswith("_cubic") else path.stem
        covariates[name] = load_weekly_csv(path)
    states = load_states_csv(args.states) if args.states else None
    root = emit_dataset_package(target, covariates, args.out, states=states)
    log.info("wrote dataset package to %s", root)
    return EXIT_OK


def _load_population(path) -> dict[str, float]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["unit_id", "population"]:
            raise ParseError(path, 1, "expected header unit_id,population")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(path, reader.line_num, f"expected 2 fields, got {len(row)}")
            try:
                out[row[0].strip()] = float(row[1])
            except ValueError:
                raise ParseError(path, reader.line_num, f"population is not a number: {row[1]!r}") from None
    return out


def cmd_calendar(args) -> int:
    wmap = month_week_map(args.year)
    out = sys.stdout
    out.write("year,month,n_weeks,epi_year,epi_week\n")
    for month in wmap.months:
        weeks = wmap.weeks(month)
        for w in weeks:
            out.write(f"{month.year},{month.month},{len(weeks)},{w.epi_year},{w.week}\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    records = run_bench(
        args.corpus,
        args.n,
        args.seed,
        outdir=args.out,
        methods=args.methods,
        noise_frac=args.noise_frac,
        workers=args.workers,
        first_year=args.first_year,
        last_year=args.last_year,
    )
    log.info("%d records written to %s", len(records), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="epidisagg", description="Monthly to epi-week disaggregation and validation")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("disagg", help="disaggregate a monthly CSV to epi-weeks")
    d.add_argument("--input", required=True, type=Path, help="monthly CSV: unit_id,year,month,value")
    d.add_argument("--method", choices=METHOD_NAMES, default="spline")
    d.add_argument("--seed", type=int, default=0, help="jitter seed")
    d.add_argument("--noise-frac", type=float, default=0.05, help="jitter noise as a fraction of the weekly mean")
    d.add_argument("--covariate", action="store_true", help="propagate values without conserving monthly sums")
    d.add_argument("--out", required=True, type=Path, help="weekly CSV to write")
    d.set_defaults(func=cmd_disagg)

    v = sub.add_parser("validate", help="score methods against a weekly reference")
    v.add_argument("--input", required=True, type=Path)
    v.add_argument("--reference", required=True, type=Path, help="weekly CSV: unit_id,epi_year,epi_week,value")
    v.add_argument("--methods", type=_methods, default=METHOD_NAMES, help="comma-separated list")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--noise-frac", type=float, default=0.05)
    v.add_argument("--workers", type=int, default=1, help="worker processes")
    v.add_argument("--emit-package", action="store_true", help="also write a spline dataset package")
    v.add_argument("--out", required=True, type=Path, help="report directory")
    v.set_defaults(func=cmd_validate)

    k = sub.add_parser("package", help="write the dataset package tree")
    k.add_argument("--target", required=True, type=Path, help="weekly target CSV")
    k.add_argument("--features", required=True, type=Path, help="directory of weekly covariate CSVs")
    k.add_argument("--states", type=Path, help="CSV unit_id,state_code,state_name")
    k.add_argument("--population", type=Path, help="CSV unit_id,population; converts the target to a rate")
    k.add_argument("--out", required=True, type=Path, help="package root, e.g. DengueDataset/")
    k.set_defaults(func=cmd_package)

    c = sub.add_parser("calendar", help="print the month to epi-week map of a year")
    c.add_argument("--year", required=True, type=int)
    c.set_defaults(func=cmd_calendar)

    b = sub.add_parser("bench", help="validate methods on a synthetic corpus")
    b.add_argument("--corpus", required=True, choices=("smooth", "sparse"))
    b.add_argument("--n", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--methods", type=_methods, default=METHOD_NAMES)
    b.add_argument("--noise-frac", type=float, default=0.05)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--first-year", type=int)
    b.add_argument("--last-year", type=int)
    b.add_argument("--out", required=True, type=Path)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EpiDisaggError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Monthly to epidemiological-week disaggregation with mass conservation, and validation metrics."""

from .disagg import (
    CubicSpline,
    Jitter,
    Linear,
    MonthlySeries,
    WeeklySeries,
    compute_rate,
    disaggregate,
    disaggregate_jitter,
    disaggregate_linear,
    disaggregate_spline,
    parse_method,
    propagate_covariate,
    renormalize_month,
)
from .epicalendar import EpiWeekId, MonthKey, MonthWeekMap, epiweek_of, month_week_map, weeks_in_epiyear
from .metrics import MetricsRecord, compare
from .pipeline import (
    DescriptiveStats,
    RunConfig,
    aggregate_stats,
    emit_dataset_package,
    emit_reports,
    load_monthly_csv,
    load_weekly_csv,
    run_validation,
)

__version__ = "0.1.0"

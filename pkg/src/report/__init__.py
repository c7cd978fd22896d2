"""Report aggregation and CSV output."""
from .aggregate import (
    AddressAggregate,
    CampaignSummary,
    CdfMetric,
    DailySeriesPoint,
    RuleBreakdown,
    ScopeTotals,
    cdf,
    daily_series,
    per_address,
    summarize,
)
from .writers import format_fraction, write_csv, write_report

__all__ = [
    "AddressAggregate",
    "CampaignSummary",
    "CdfMetric",
    "DailySeriesPoint",
    "RuleBreakdown",
    "ScopeTotals",
    "cdf",
    "daily_series",
    "per_address",
    "summarize",
    "format_fraction",
    "write_csv",
    "write_report",
]

"""CSV emitters for report artifacts."""
import logging
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from src.core.model import Denomination, format_btc, format_usd
from .aggregate import (
    AddressAggregate,
    CampaignSummary,
    CdfMetric,
    DailySeriesPoint,
    ScopeTotals,
    cdf,
)


logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["scope", "payments", "btc", "usd_low", "usd_avg", "usd_high"]
PER_RULE_COLUMNS = ["label", "denomination", "amount", "start_date", "end_date", "payments", "btc", "usd_avg"]
DAILY_COLUMNS = ["date", "ransom_count", "btc", "usd_avg"]
PER_ADDRESS_COLUMNS = ["address", "ransom_count", "btc"]
CDF_COUNT_COLUMNS = ["ransom_count", "cumulative_fraction"]
CDF_BTC_COLUMNS = ["btc", "cumulative_fraction"]


def format_fraction(value: Fraction, places: int = 6) -> str:
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    return f"{exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP):f}"


def write_csv(rows: List[list], columns: Sequence[str], path: Union[str, Path]) -> Path:
    """Write rows with a fixed header and '\\n' line endings."""
    path = Path(path)
    pd.DataFrame(rows, columns=list(columns)).to_csv(path, index=False, lineterminator="\n")
    logger.debug(f"Wrote {len(rows)} rows to {path}")
    return path


def _scope_row(scope: str, totals: ScopeTotals) -> list:
    return [
        scope,
        totals.payments,
        format_btc(totals.btc),
        format_usd(totals.usd_low),
        format_usd(totals.usd_avg),
        format_usd(totals.usd_high),
    ]


def summary_rows(summary: CampaignSummary) -> List[list]:
    return [
        _scope_row("overall", summary.overall),
        _scope_row("ransom", summary.ransom),
        _scope_row("non_ransom", summary.non_ransom),
        _scope_row("unclassifiable", summary.unclassifiable),
    ]


def per_rule_rows(summary: CampaignSummary) -> List[list]:
    rows = []
    for item in summary.per_rule:
        rule = item.rule
        amount = format_btc(rule.amount) if rule.denomination == Denomination.BTC else format_usd(rule.amount)
        rows.append([
            rule.label,
            rule.denomination.value,
            amount,
            rule.start_date.isoformat(),
            rule.end_date.isoformat(),
            item.payments,
            format_btc(item.btc),
            format_usd(item.usd_avg),
        ])
    return rows


def write_report(
    summary: CampaignSummary,
    series: Sequence[DailySeriesPoint],
    aggregates: Sequence[AddressAggregate],
    out_dir: Union[str, Path],
) -> Dict[str, Path]:
    """
    Write the six report CSVs into `out_dir`.

    Returns:
        File name to path for every file written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    written = {
        "summary.csv": write_csv(summary_rows(summary), SUMMARY_COLUMNS, out / "summary.csv"),
        "per_rule.csv": write_csv(per_rule_rows(summary), PER_RULE_COLUMNS, out / "per_rule.csv"),
        "daily.csv": write_csv(
            [[p.date.isoformat(), p.ransom_count, format_btc(p.btc), format_usd(p.usd_avg)] for p in series],
            DAILY_COLUMNS,
            out / "daily.csv",
        ),
        "per_address.csv": write_csv(
            [[a.address, a.ransom_count, format_btc(a.btc)] for a in aggregates],
            PER_ADDRESS_COLUMNS,
            out / "per_address.csv",
        ),
    }

    # An empty CDF is written header-only
    count_points = cdf(aggregates, CdfMetric.COUNT) if aggregates else []
    btc_points = cdf(aggregates, CdfMetric.BTC) if aggregates else []
    written["cdf_count.csv"] = write_csv(
        [[x, format_fraction(f)] for x, f in count_points], CDF_COUNT_COLUMNS, out / "cdf_count.csv"
    )
    written["cdf_btc.csv"] = write_csv(
        [[format_btc(x), format_fraction(f)] for x, f in btc_points], CDF_BTC_COLUMNS, out / "cdf_btc.csv"
    )
    logger.info(f"Report for {summary.campaign or '<unnamed>'} written to {out}")
    return written

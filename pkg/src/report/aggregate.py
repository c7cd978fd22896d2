"""Campaign-level aggregation of a classification result."""
import enum
import logging
from collections import defaultdict
from datetime import date, timedelta
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from pydantic import BaseModel, ConfigDict

from src.classify.classifier import ClassificationResult, usd_value
from src.core.errors import EmptyInput
from src.core.model import USD_PRECISION, PaymentEvent, PriceSeries, Quote, RansomRule, UsdAmount


logger = logging.getLogger(__name__)

ZERO = Decimal(0)


def usd_sum(values: Iterable[Decimal]) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = USD_PRECISION
        return sum(values, ZERO)


class ScopeTotals(BaseModel):
    payments: int = 0
    btc: int = 0  # satoshis
    usd_low: UsdAmount = ZERO
    usd_avg: UsdAmount = ZERO
    usd_high: UsdAmount = ZERO

    model_config = ConfigDict(frozen=True)


class RuleBreakdown(BaseModel):
    rule: RansomRule
    payments: int = 0
    btc: int = 0
    usd_avg: UsdAmount = ZERO

    model_config = ConfigDict(frozen=True)


class CampaignSummary(BaseModel):
    campaign: str = ""
    overall: ScopeTotals = ScopeTotals()
    ransom: ScopeTotals = ScopeTotals()
    non_ransom: ScopeTotals = ScopeTotals()
    unclassifiable: ScopeTotals = ScopeTotals()
    per_rule: Tuple[RuleBreakdown, ...] = ()

    model_config = ConfigDict(frozen=True)


class DailySeriesPoint(BaseModel):
    date: date
    ransom_count: int
    btc: int
    usd_avg: UsdAmount

    model_config = ConfigDict(frozen=True)


class AddressAggregate(BaseModel):
    address: str
    ransom_count: int
    btc: int

    model_config = ConfigDict(frozen=True)


class CdfMetric(str, enum.Enum):
    COUNT = "count"
    BTC = "btc"


def _totals(payments: Iterable[PaymentEvent], prices: PriceSeries, priced: bool = True) -> ScopeTotals:
    payments = list(payments)
    usd = {q: ZERO for q in Quote}
    if priced:
        for q in Quote:
            usd[q] = usd_sum(
                usd_value(p.amount, prices[p.gmt_date], q) for p in payments if p.gmt_date in prices
            )
    return ScopeTotals(
        payments=len(payments),
        btc=sum(p.amount for p in payments),
        usd_low=usd[Quote.LOW],
        usd_avg=usd[Quote.AVG],
        usd_high=usd[Quote.HIGH],
    )


def summarize(result: ClassificationResult, prices: PriceSeries) -> CampaignSummary:
    """
    Overall, ransom, non-ransom and unclassifiable totals plus a per-rule breakdown.

    USD sums are exact; unclassifiable payments count toward payments and BTC
    but never toward USD.
    """
    ransom_payments = [c.payment for c in result.ransoms]
    unclassifiable = [u.payment for u in result.unclassifiable]
    ransom = _totals(ransom_payments, prices)
    non_ransom = _totals(result.non_ransoms, prices)
    lost = _totals(unclassifiable, prices, priced=False)
    overall = ScopeTotals(
        payments=ransom.payments + non_ransom.payments + lost.payments,
        btc=ransom.btc + non_ransom.btc + lost.btc,
        usd_low=usd_sum([ransom.usd_low, non_ransom.usd_low]),
        usd_avg=usd_sum([ransom.usd_avg, non_ransom.usd_avg]),
        usd_high=usd_sum([ransom.usd_high, non_ransom.usd_high]),
    )

    by_label: Dict[str, List] = defaultdict(list)
    for c in result.ransoms:
        by_label[c.rule_label].append(c)
    per_rule = tuple(
        RuleBreakdown(
            rule=rule,
            payments=len(by_label[rule.label]),
            btc=sum(c.payment.amount for c in by_label[rule.label]),
            usd_avg=usd_sum(c.usd_value_avg for c in by_label[rule.label]),
        )
        for rule in result.rules
    )
    return CampaignSummary(
        campaign=result.campaign,
        overall=overall,
        ransom=ransom,
        non_ransom=non_ransom,
        unclassifiable=lost,
        per_rule=per_rule,
    )


def daily_series(result: ClassificationResult, dense: bool = False) -> List[DailySeriesPoint]:
    """Ransoms grouped by payment day; gap days appear (as zeros) only when `dense`."""
    buckets: Dict[date, List] = defaultdict(list)
    for c in result.ransoms:
        buckets[c.payment.gmt_date].append(c)
    if not buckets:
        return []

    days = sorted(buckets)
    if dense:
        days = [days[0] + timedelta(days=i) for i in range((days[-1] - days[0]).days + 1)]
    return [
        DailySeriesPoint(
            date=day,
            ransom_count=len(buckets.get(day, [])),
            btc=sum(c.payment.amount for c in buckets.get(day, [])),
            usd_avg=usd_sum(c.usd_value_avg for c in buckets.get(day, [])),
        )
        for day in days
    ]


def per_address(result: ClassificationResult) -> List[AddressAggregate]:
    """Ransom count and BTC per receiving address, for addresses with at least one ransom."""
    counts: Dict[str, int] = defaultdict(int)
    btc: Dict[str, int] = defaultdict(int)
    for c in result.ransoms:
        counts[c.payment.address] += 1
        btc[c.payment.address] += c.payment.amount
    return [AddressAggregate(address=a, ransom_count=counts[a], btc=btc[a]) for a in sorted(counts)]


def cdf(aggregates: Iterable[AddressAggregate], metric: CdfMetric) -> List[Tuple[int, Fraction]]:
    """
    Empirical CDF over addresses.

    Returns:
        (x, fraction of addresses with value <= x) for each distinct x, ascending;
        the last fraction is exactly 1.
    """
    metric = CdfMetric(metric)
    values = sorted(a.ransom_count if metric == CdfMetric.COUNT else a.btc for a in aggregates)
    if not values:
        raise EmptyInput("CDF of an empty address list")
    total = len(values)
    points: List[Tuple[int, Fraction]] = []
    for index, value in enumerate(values, start=1):
        if points and points[-1][0] == value:
            points[-1] = (value, Fraction(index, total))
        else:
            points.append((value, Fraction(index, total)))
    return points

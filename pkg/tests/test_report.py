"""Tests for report aggregation and the CSV writers."""
from datetime import date
from decimal import Decimal
from fractions import Fraction

import pytest

from src.classify import classify_cluster, classify_payments, load_campaign
from src.cluster import expand
from src.core.errors import EmptyInput
from src.core.model import Denomination, RansomRule
from src.db import open_store
from src.ingest import FixtureProvider, ingest_cluster, load_price_series
from src.report import (
    AddressAggregate,
    CdfMetric,
    cdf,
    daily_series,
    format_fraction,
    per_address,
    summarize,
    write_report,
)
from tests.factories import DEMO_CAMPAIGN, DEMO_DIR, DEMO_PRICES, N, X, Y, Z, addr, make_tx, payment_for, price


SAT = 100_000_000


@pytest.fixture(scope="module")
def demo():
    """The demo cluster classified end to end, with its price series."""
    config = load_campaign(DEMO_CAMPAIGN)
    prices = load_price_series(DEMO_PRICES)
    cluster = expand(config.seeds, FixtureProvider(DEMO_DIR), campaign=config.name)
    store = open_store(":memory:")
    ingest_cluster(FixtureProvider(DEMO_DIR), store, cluster)
    result = classify_cluster(store, cluster, config, prices)
    store.close()
    return result, prices


def _three_one_btc_ransoms():
    rule = RansomRule(label="1 BTC", denomination=Denomination.BTC, amount=SAT,
                      start_date=date(2015, 1, 1), end_date=date(2015, 1, 31))
    prices, txs, payments = {}, {}, []
    for i, avg in enumerate(["100", "200", "300"], start=1):
        day = date(2015, 1, i)
        prices[day] = price(day, avg, avg, avg)
        tx = make_tx(f"one-btc-{i}", inputs=[(addr(50), SAT)], outputs=[(addr(i), SAT)], day=day)
        txs[tx.hash] = tx
        payments.append(payment_for(tx, addr(i)))
    return classify_payments(payments, txs, [rule], prices), prices


class TestSummarize:
    def test_demo_totals(self, demo):
        result, prices = demo
        summary = summarize(result, prices)
        assert (summary.overall.payments, summary.overall.btc) == (10, 902_195_678)
        assert summary.overall.usd_avg == Decimal("2111.80028")
        assert (summary.ransom.payments, summary.ransom.btc) == (6, 629_950_000)
        assert summary.ransom.usd_avg == Decimal("1629.4385")
        assert summary.ransom.usd_low == Decimal("1506.941")
        assert summary.ransom.usd_high == Decimal("1747.9365")
        assert summary.non_ransom.usd_avg == Decimal("482.36178")
        assert (summary.unclassifiable.payments, summary.unclassifiable.btc) == (1, 60_000_000)
        assert summary.unclassifiable.usd_avg == 0

    def test_scopes_add_up(self, demo):
        result, prices = demo
        summary = summarize(result, prices)
        parts = (summary.ransom, summary.non_ransom, summary.unclassifiable)
        assert summary.overall.payments == sum(p.payments for p in parts)
        assert summary.overall.btc == sum(p.btc for p in parts)
        assert summary.ransom.usd_low <= summary.ransom.usd_avg <= summary.ransom.usd_high
        assert sum(r.btc for r in summary.per_rule) == summary.ransom.btc
        assert sum(r.usd_avg for r in summary.per_rule) == summary.ransom.usd_avg

    def test_per_rule_keeps_every_rule(self, demo):
        result, prices = demo
        summary = summarize(result, prices)
        assert [(r.rule.label, r.payments) for r in summary.per_rule] == [
            ("2 BTC", 2), ("10 BTC (late)", 0), ("1 BTC", 1), ("0.5 BTC", 2),
            ("2 BTC (late)", 0), ("0.3 BTC", 1), ("0.6 BTC", 0),
        ]

    def test_three_payments(self):
        result, prices = _three_one_btc_ransoms()
        summary = summarize(result, prices)
        assert summary.ransom.payments == 3
        assert summary.ransom.btc == 3 * SAT
        assert summary.ransom.usd_avg == Decimal("600")

    def test_empty_result(self):
        result = classify_payments([], {}, [], {})
        summary = summarize(result, {})
        assert summary.overall.payments == 0
        assert summary.overall.usd_avg == 0
        assert daily_series(result) == []
        assert per_address(result) == []


class TestDailySeries:
    def test_sparse(self, demo):
        result, _ = demo
        series = daily_series(result)
        assert [p.date for p in series] == [
            date(2013, 10, 10), date(2013, 11, 9), date(2013, 11, 15), date(2013, 11, 20), date(2013, 11, 28),
        ]
        first = series[0]
        assert (first.ransom_count, first.btc, first.usd_avg) == (2, 399_950_000, Decimal("491.9385"))

    def test_dense_fills_gaps(self, demo):
        result, _ = demo
        sparse = daily_series(result)
        dense = daily_series(result, dense=True)
        assert len(dense) == 50
        assert dense[0].date == date(2013, 10, 10)
        assert dense[-1].date == date(2013, 11, 28)
        assert dense[1].ransom_count == 0 and dense[1].btc == 0
        assert [p for p in dense if p.ransom_count] == sparse

    def test_series_totals_match_ransoms(self, demo):
        result, _ = demo
        series = daily_series(result)
        assert sum(p.ransom_count for p in series) == len(result.ransoms)
        assert sum(p.btc for p in series) == result.ransom_btc


class TestPerAddressAndCdf:
    def test_demo_addresses(self, demo):
        result, _ = demo
        assert {(a.address, a.ransom_count, a.btc) for a in per_address(result)} == {
            (X, 2, 399_950_000), (Y, 1, 100_000_000), (N, 1, 50_000_000), (Z, 2, 80_000_000),
        }

    def test_demo_cdfs(self, demo):
        result, _ = demo
        aggregates = per_address(result)
        assert cdf(aggregates, CdfMetric.COUNT) == [(1, Fraction(1, 2)), (2, Fraction(1))]
        assert cdf(aggregates, CdfMetric.BTC) == [
            (50_000_000, Fraction(1, 4)),
            (80_000_000, Fraction(1, 2)),
            (100_000_000, Fraction(3, 4)),
            (399_950_000, Fraction(1)),
        ]

    def test_ties_collapse(self):
        aggregates = [AddressAggregate(address=addr(i), ransom_count=c, btc=c) for i, c in enumerate([1, 1, 2])]
        assert cdf(aggregates, CdfMetric.COUNT) == [(1, Fraction(2, 3)), (2, Fraction(1))]

    def test_single_address(self):
        assert cdf([AddressAggregate(address=X, ransom_count=5, btc=7)], "btc") == [(7, Fraction(1))]

    def test_empty(self):
        with pytest.raises(EmptyInput):
            cdf([], CdfMetric.COUNT)

    def test_format_fraction(self):
        assert format_fraction(Fraction(2, 3)) == "0.666667"
        assert format_fraction(Fraction(1, 8), 2) == "0.13"
        assert format_fraction(Fraction(1)) == "1.000000"


class TestWriteReport:
    def test_demo_files(self, demo, tmp_path):
        result, prices = demo
        written = write_report(summarize(result, prices), daily_series(result), per_address(result), tmp_path)
        assert sorted(written) == sorted([
            "summary.csv", "per_rule.csv", "daily.csv", "per_address.csv", "cdf_count.csv", "cdf_btc.csv",
        ])
        assert (tmp_path / "summary.csv").read_text(encoding="utf-8") == (
            "scope,payments,btc,usd_low,usd_avg,usd_high\n"
            "overall,10,9.02195678,1971.89,2111.80,2246.21\n"
            "ransom,6,6.29950000,1506.94,1629.44,1747.94\n"
            "non_ransom,3,2.12245678,464.95,482.36,498.27\n"
            "unclassifiable,1,0.60000000,0.00,0.00,0.00\n"
        )
        assert (tmp_path / "cdf_count.csv").read_text(encoding="utf-8") == (
            "ransom_count,cumulative_fraction\n1,0.500000\n2,1.000000\n"
        )
        daily = (tmp_path / "daily.csv").read_text(encoding="utf-8").splitlines()
        assert daily[0] == "date,ransom_count,btc,usd_avg"
        assert daily[1] == "2013-10-10,2,3.99950000,491.94"
        per_rule = (tmp_path / "per_rule.csv").read_text(encoding="utf-8").splitlines()
        assert per_rule[1] == "2 BTC,BTC,2.00000000,2013-09-05,2013-11-11,2,3.99950000,491.94"

    def test_no_ransoms_writes_headers(self, tmp_path):
        result = classify_payments([], {}, [], {})
        write_report(summarize(result, {}), [], [], tmp_path)
        assert (tmp_path / "cdf_btc.csv").read_text(encoding="utf-8") == "btc,cumulative_fraction\n"
        assert (tmp_path / "per_address.csv").read_text(encoding="utf-8") == "address,ransom_count,btc\n"

    def test_rerun_is_byte_identical(self, demo, tmp_path):
        result, prices = demo
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            write_report(summarize(result, prices), daily_series(result, dense=True), per_address(result), out)
        for name in ("summary.csv", "per_rule.csv", "daily.csv", "per_address.csv", "cdf_count.csv", "cdf_btc.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

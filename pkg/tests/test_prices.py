"""Tests for the daily price series loader."""
from datetime import date
from decimal import Decimal

import pytest

from src.core.errors import DuplicateDate, MalformedRow, OrderingViolation
from src.ingest import load_price_series
from tests.factories import DEMO_PRICES


def _csv(tmp_path, text):
    path = tmp_path / "prices.csv"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadPriceSeries:
    def test_demo_series(self):
        series = load_price_series(DEMO_PRICES)
        assert len(series) == 8
        first = series[date(2013, 10, 10)]
        assert (first.low, first.avg, first.high) == (Decimal("118.00"), Decimal("123.00"), Decimal("127.00"))

    def test_values_are_exact(self, tmp_path):
        series = load_price_series(_csv(tmp_path, "date,low,avg,high\n2017-05-12,1700.1,1750.123456789,1800\n"))
        assert series[date(2017, 5, 12)].avg == Decimal("1750.123456789")

    def test_header_only_is_empty(self, tmp_path):
        assert load_price_series(_csv(tmp_path, "date,low,avg,high\n")) == {}

    def test_misordered_quotes(self, tmp_path):
        with pytest.raises(OrderingViolation):
            load_price_series(_csv(tmp_path, "date,low,avg,high\n2013-10-10,118.00,130.00,127.00\n"))

    def test_duplicate_date(self, tmp_path):
        text = "date,low,avg,high\n2013-10-10,1,2,3\n2013-10-10,1,2,3\n"
        with pytest.raises(DuplicateDate):
            load_price_series(_csv(tmp_path, text))

    def test_bad_row_reports_line(self, tmp_path):
        text = "date,low,avg,high\n2013-10-10,1,2,3\n2013-10-11,1,two,3\n"
        with pytest.raises(MalformedRow) as err:
            load_price_series(_csv(tmp_path, text))
        assert err.value.line == 3

    def test_blank_line_is_reported_where_it_is(self, tmp_path):
        text = "date,low,avg,high\n2013-10-10,1,2,3\n\n10/12/2013,1,2,3\n"
        with pytest.raises(MalformedRow, match="blank line") as err:
            load_price_series(_csv(tmp_path, text))
        assert err.value.line == 3

    def test_bad_date(self, tmp_path):
        with pytest.raises(MalformedRow) as err:
            load_price_series(_csv(tmp_path, "date,low,avg,high\n10/10/2013,1,2,3\n"))
        assert err.value.line == 2

    def test_wrong_header(self, tmp_path):
        with pytest.raises(MalformedRow) as err:
            load_price_series(_csv(tmp_path, "day,low,avg,high\n2013-10-10,1,2,3\n"))
        assert err.value.line == 1

    def test_empty_file(self, tmp_path):
        with pytest.raises(MalformedRow):
            load_price_series(_csv(tmp_path, ""))

    def test_negative_quote(self, tmp_path):
        with pytest.raises(MalformedRow):
            load_price_series(_csv(tmp_path, "date,low,avg,high\n2013-10-10,-1,2,3\n"))

"""Daily BTC-USD price series loader (`date,low,avg,high`)."""
import logging
import re
from datetime import date
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Union

import pandas as pd

from src.core.errors import DuplicateDate, MalformedRow, OrderingViolation
from src.core.model import DailyPrice, PriceSeries


logger = logging.getLogger(__name__)

PRICE_COLUMNS = ["date", "low", "avg", "high"]


def _quote(text, line: int, column: str) -> Decimal:
    if not isinstance(text, str) or not text.strip():
        raise MalformedRow(line, f"missing {column}")
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise MalformedRow(line, f"{column} {text!r} is not a decimal") from None
    if not value.is_finite() or value < 0:
        raise MalformedRow(line, f"{column} {text!r} must be a non-negative number")
    return value


def load_price_series(path: Union[str, Path]) -> PriceSeries:
    """
    Load one DailyPrice per CSV row.

    Raises:
        MalformedRow: unparsable row (with its 1-based file line)
        OrderingViolation: a row where low <= avg <= high fails
        DuplicateDate: a date listed twice
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise MalformedRow(1, f"{path}: missing header {','.join(PRICE_COLUMNS)}") from None
    except pd.errors.ParserError as e:
        found = re.search(r"line (\d+)", str(e))
        raise MalformedRow(int(found.group(1)) if found else 0, str(e)) from None

    if list(frame.columns) != PRICE_COLUMNS:
        raise MalformedRow(1, f"expected header {','.join(PRICE_COLUMNS)}, got {','.join(frame.columns)}")

    series: PriceSeries = {}
    for index, row in enumerate(frame.itertuples(index=False)):
        line = index + 2
        if not any(isinstance(v, str) and v.strip() for v in row):
            raise MalformedRow(line, "blank line")
        try:
            day = date.fromisoformat(str(row.date).strip())
        except ValueError:
            raise MalformedRow(line, f"date {row.date!r} is not YYYY-MM-DD") from None
        low = _quote(row.low, line, "low")
        avg = _quote(row.avg, line, "avg")
        high = _quote(row.high, line, "high")
        if not low <= avg <= high:
            raise OrderingViolation(f"line {line}: {day} has low {low}, avg {avg}, high {high}")
        if day in series:
            raise DuplicateDate(f"line {line}: {day} listed twice")
        series[day] = DailyPrice(date=day, low=low, avg=avg, high=high)

    logger.info(f"Loaded {len(series)} daily prices from {path}")
    return series

"""
Regression against the published per-campaign totals.

Needs a dataset snapshot: set RANSOMTRACE_DATASET to a directory holding
`prices.csv` and, per catalog campaign, `<name>/cluster.csv` plus
`<name>/store.csv` (a store export). Campaigns without a folder are skipped.
"""
import os
from collections import Counter
from datetime import date
from fractions import Fraction
from pathlib import Path

import pytest

from src.classify import classify_cluster, load_campaign
from src.cli.artifacts import read_cluster
from src.core.model import format_btc, format_usd
from src.db import import_csv, open_store
from src.ingest import load_price_series
from src.report import per_address, summarize
from tests.factories import CAMPAIGN_DIR


DATASET = os.environ.get("RANSOMTRACE_DATASET")

pytestmark = [
    pytest.mark.dataset,
    pytest.mark.skipif(not DATASET, reason="RANSOMTRACE_DATASET is not set"),
]

# campaign: (payments, btc, usd) overall, then ransom; BTC to 4 places, USD to 2
PUBLISHED = {
    "cryptolocker": ((51766, "133045.9961", "42292191.17"), (804, "1403.7548", "449274.97")),
    "cryptodefense": ((128, "138.3223", "70113.41"), (108, "126.6960", "63859.49")),
    "cryptowall": ((51278, "87897.8510", "45370589.00"), (3730, "5351.2329", "2220909.12")),
    "dma_locker": ((298, "1433.3463", "580763.95"), (117, "339.4591", "178162.77")),
    "notpetya": ((70, "4.1787", "10284.42"), (33, "4.0576", "9835.86")),
    "keranger": ((13, "10.0044", "4175.35"), (10, "9.9990", "4173.12")),
    "wannacry": ((341, "53.2906", "99549.05"), (238, "47.1743", "86076.76")),
}


def _classified(name):
    folder = Path(DATASET) / name
    if not folder.is_dir():
        pytest.skip(f"no {name} folder in the dataset")
    config = load_campaign(name, CAMPAIGN_DIR)
    prices = load_price_series(Path(DATASET) / "prices.csv")
    with open_store(":memory:") as store:
        import_csv(store, folder / "store.csv")
        cluster = read_cluster(folder, config.name)
        result = classify_cluster(store, cluster, config, prices)
    return cluster, result, prices


@pytest.mark.parametrize("name", sorted(PUBLISHED))
def test_published_totals(name):
    _, result, prices = _classified(name)
    summary = summarize(result, prices)
    overall, ransom = PUBLISHED[name]
    assert (summary.overall.payments, format_btc(summary.overall.btc, 4), format_usd(summary.overall.usd_avg)) == overall
    assert (summary.ransom.payments, format_btc(summary.ransom.btc, 4), format_usd(summary.ransom.usd_avg)) == ransom


def test_cryptolocker_cluster_size():
    cluster, _, _ = _classified("cryptolocker")
    assert len(cluster) == 956


def test_cryptolocker_busiest_day():
    _, result, _ = _classified("cryptolocker")
    busiest, count = Counter(c.payment.gmt_date for c in result.ransoms).most_common(1)[0]
    assert (busiest, count) == (date(2013, 10, 10), 33)


def test_cryptolocker_payments_per_address():
    _, result, _ = _classified("cryptolocker")
    aggregates = per_address(result)
    share = Fraction(sum(1 for a in aggregates if a.ransom_count <= 2), len(aggregates))
    assert abs(share - Fraction(8316, 10000)) <= Fraction(1, 100)

"""Builders shared by the test modules."""
import hashlib
import random
from datetime import date, time, timedelta
from decimal import Decimal
from pathlib import Path
from typing import List, Sequence, Tuple

from src.core.model import DailyPrice, PaymentEvent, TxIO, TxRecord


ROOT = Path(__file__).resolve().parent.parent
DEMO_DIR = ROOT / "fixtures" / "demo"
DEMO_CAMPAIGN = DEMO_DIR / "campaign.json"
DEMO_PRICES = DEMO_DIR / "prices.csv"
CAMPAIGN_DIR = ROOT / "campaigns"

# Demo snapshot addresses
X = "1DemoRansomSeedXkq7Tz3Wv9PbN4hJcLm"
Y = "1DemoRansomPeerYgR2sV8nK5tHwQ3xZpA"
N = "1DemoRansomChangeNa6Fb9Lr2Ud7Ws4Ke"
Z = "1DemoRansomLaterZc3Hm8Tq5Vy2Np7Rj"
M = "1DemoExchangeMtF4gK9sB2wX6cR8vPq"

_BASE58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def addr(n: int, prefix: str = "1Test") -> str:
    """A well-formed 34-character address, distinct per n."""
    digits = ""
    while True:
        n, rem = divmod(n, 58)
        digits = _BASE58[rem] + digits
        if n == 0:
            break
    return prefix + digits.rjust(34 - len(prefix), "1")


def tx_hash(label: str) -> str:
    return hashlib.sha256(label.encode()).hexdigest()


def demo_hash(label: str) -> str:
    return tx_hash(f"ransomtrace-demo-{label}")


IO = Tuple[str, int]


def make_tx(
    label: str,
    inputs: Sequence[IO] = (),
    outputs: Sequence[IO] = (),
    day: date = date(2013, 10, 10),
    clock: time = time(12, 0),
    unaddressed_inputs: Sequence[int] = (),
    unaddressed_outputs: Sequence[int] = (),
) -> TxRecord:
    return TxRecord(
        hash=tx_hash(label),
        inputs=tuple(TxIO(address=a, amount=v) for a, v in inputs),
        outputs=tuple(TxIO(address=a, amount=v) for a, v in outputs),
        unaddressed_inputs=tuple(unaddressed_inputs),
        unaddressed_outputs=tuple(unaddressed_outputs),
        gmt_date=day,
        gmt_time=clock,
        is_coinbase=not (inputs or unaddressed_inputs),
    )


def payment_for(tx: TxRecord, address: str) -> PaymentEvent:
    return PaymentEvent(
        tx_hash=tx.hash,
        address=address,
        amount=tx.credited(address),
        gmt_date=tx.gmt_date,
        gmt_time=tx.gmt_time,
        address_was_input=address in tx.input_addresses(),
    )


def price(day: date, low: str, avg: str, high: str) -> DailyPrice:
    return DailyPrice(date=day, low=Decimal(low), avg=Decimal(avg), high=Decimal(high))


def random_chain(
    rng: random.Random,
    n_addresses: int,
    n_txs: int,
    start: date = date(2015, 1, 1),
    days: int = 60,
    coinbase_share: float = 0.05,
) -> Tuple[List[str], List[TxRecord]]:
    """A random transaction set over a small address pool, for clustering properties."""
    pool = [addr(1000 + i) for i in range(n_addresses)]
    txs = []
    for i in range(n_txs):
        day = start + timedelta(days=rng.randrange(days))
        clock = time(rng.randrange(24), rng.randrange(60), rng.randrange(60))
        outputs = [(a, rng.randrange(1, 10**8)) for a in rng.sample(pool, rng.choice([1, 2, 2, 2, 3]))]
        if rng.random() < coinbase_share:
            inputs: List[IO] = []
        else:
            inputs = [(a, rng.randrange(1, 10**8)) for a in rng.sample(pool, rng.choice([1, 1, 2, 3]))]
        txs.append(make_tx(f"random-{rng.random()}-{i}", inputs, outputs, day, clock))
    return pool, txs

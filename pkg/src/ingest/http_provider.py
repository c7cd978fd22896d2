"""Live provider for the Blockchain Data API (`/rawaddr/<address>`)."""
import logging
import random
import threading
import time as _time
from datetime import datetime, timezone
from typing import Any, Callable, Dict, Iterator, List, Optional, TypeVar

import requests

from config import settings
from src.core.errors import MalformedResponse, ProviderUnavailable, RateLimited
from src.core.model import TxIO, TxRecord, is_address
from .provider import AddressSummary, FirstSeen, Provider, ProviderSpec


logger = logging.getLogger(__name__)

T = TypeVar("T")


class _Transient(Exception):
    """Connection failure or 5xx; worth retrying."""


class RateLimiter:
    """
    Minimum spacing of 1/rate seconds between request starts.

    One instance is shared by every thread of a provider.
    """

    def __init__(self, rate: float, clock: Callable[[], float] = _time.monotonic,
                 sleep: Callable[[float], None] = _time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._next: Optional[float] = None
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            if self._next is not None and now < self._next:
                pause = self._next - now
                logger.debug(f"Rate limit: sleeping {pause:.3f}s")
                self._sleep(pause)
                now = self._next
            self._next = now + self.interval


class RetryPolicy:
    """1 + max_retries attempts with exponential backoff and seeded jitter."""

    def __init__(self, max_retries: int, backoff_base: float, jitter_seed: int = 0,
                 sleep: Callable[[float], None] = _time.sleep):
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._rng = random.Random(jitter_seed)
        self._sleep = sleep
        self._lock = threading.Lock()

    def delay(self, attempt: int) -> float:
        with self._lock:
            jitter = self._rng.uniform(0, self.backoff_base)
        return self.backoff_base * (2 ** attempt) + jitter

    def call(self, fn: Callable[[], T], what: str) -> T:
        last: Optional[Exception] = None
        for attempt in range(self.max_retries + 1):
            try:
                return fn()
            except (RateLimited, _Transient) as e:
                last = e
                if attempt == self.max_retries:
                    break
                pause = self.delay(attempt)
                logger.warning(f"{what} failed ({e}); retry {attempt + 1}/{self.max_retries} in {pause:.2f}s")
                self._sleep(pause)
        raise ProviderUnavailable(f"{what}: giving up after {self.max_retries + 1} attempts: {last}") from last


def _satoshis(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise MalformedResponse(f"{where}: value {value!r} is not a satoshi count")
    return value


def map_transaction(raw: Dict[str, Any]) -> TxRecord:
    """
    Map one raw API transaction onto a TxRecord.

    Inputs and outputs without a 1/3 address keep only their amount, so the
    fee and the number of payees stay those of the real transaction.
    """
    try:
        tx_hash = str(raw["hash"]).lower()
        stamp = raw["time"]
        raw_inputs = raw.get("inputs") or []
        raw_outputs = raw["out"]
    except (KeyError, TypeError) as e:
        raise MalformedResponse(f"transaction missing field {e}") from None
    if isinstance(stamp, bool) or not isinstance(stamp, int):
        raise MalformedResponse(f"tx {tx_hash}: time {stamp!r} is not unix seconds")
    when = datetime.fromtimestamp(stamp, tz=timezone.utc)

    spent = [i.get("prev_out") for i in raw_inputs if isinstance(i, dict) and i.get("prev_out")]
    inputs: List[TxIO] = []
    unaddressed_inputs: List[int] = []
    for prev in spent:
        amount = _satoshis(prev.get("value"), f"tx {tx_hash} input")
        if is_address(prev.get("addr")):
            inputs.append(TxIO(address=prev["addr"], amount=amount))
        else:
            logger.debug(f"tx {tx_hash}: unaddressable input {prev.get('addr')!r}")
            unaddressed_inputs.append(amount)

    outputs: List[TxIO] = []
    unaddressed_outputs: List[int] = []
    for out in raw_outputs:
        amount = _satoshis(out.get("value"), f"tx {tx_hash} output")
        if is_address(out.get("addr")):
            outputs.append(TxIO(address=out["addr"], amount=amount))
        else:
            logger.debug(f"tx {tx_hash}: unaddressable output {out.get('addr')!r}")
            unaddressed_outputs.append(amount)

    try:
        return TxRecord(
            hash=tx_hash,
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            unaddressed_inputs=tuple(unaddressed_inputs),
            unaddressed_outputs=tuple(unaddressed_outputs),
            gmt_date=when.date(),
            gmt_time=when.time(),
            is_coinbase=not spent,
        )
    except ValueError as e:
        raise MalformedResponse(f"tx {tx_hash}: {e}") from None


class HttpProvider(Provider):
    """
    Paged, rate-limited client of a blockchain.info style explorer.

    The session, clock and sleep function are injectable so tests can run
    against a stub server and a fake clock.
    """

    def __init__(
        self,
        spec: ProviderSpec,
        session: Optional[requests.Session] = None,
        clock: Callable[[], float] = _time.monotonic,
        sleep: Callable[[float], None] = _time.sleep,
        timeout: Optional[float] = None,
        backoff_base: Optional[float] = None,
        jitter_seed: Optional[int] = None,
    ):
        self.spec = spec
        self.base_url = spec.base_url_or_dir.rstrip("/")
        self.page_size = spec.page_size
        self.timeout = timeout if timeout is not None else settings.request_timeout
        self.session = session or requests.Session()
        self.session.headers.update({"Accept": "application/json"})
        self.limiter = RateLimiter(spec.rate_limit, clock=clock, sleep=sleep)
        self.retry = RetryPolicy(
            spec.max_retries,
            backoff_base if backoff_base is not None else settings.backoff_base,
            jitter_seed if jitter_seed is not None else settings.jitter_seed,
            sleep=sleep,
        )
        self._summaries: Dict[str, AddressSummary] = {}
        self._lock = threading.Lock()
        self.requests = 0

    def _attempt(self, url: str, params: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        self.limiter.acquire()
        with self._lock:
            self.requests += 1
        logger.debug(f"GET {url} {params}")
        try:
            response = self.session.get(url, params=params, timeout=self.timeout)
        except requests.RequestException as e:
            raise _Transient(str(e)) from e
        status = response.status_code
        if status == 429:
            raise RateLimited(f"HTTP 429 from {url}")
        if status >= 500:
            raise _Transient(f"HTTP {status} from {url}")
        if status == 404:
            return None
        if status >= 400:
            raise MalformedResponse(f"HTTP {status} from {url}")
        try:
            data = response.json()
        except ValueError:
            raise MalformedResponse(f"non-JSON body from {url}") from None
        if not isinstance(data, dict):
            raise MalformedResponse(f"unexpected body from {url}")
        return data

    def _get_page(self, address: str, limit: int, offset: int) -> Optional[Dict[str, Any]]:
        url = f"{self.base_url}/rawaddr/{address}"
        params = {"limit": limit, "offset": offset}
        return self.retry.call(lambda: self._attempt(url, params), f"{address} offset {offset}")

    @staticmethod
    def _page_parts(data: Dict[str, Any], address: str):
        n_tx = data.get("n_tx")
        txs = data.get("txs")
        if isinstance(n_tx, bool) or not isinstance(n_tx, int) or not isinstance(txs, list):
            raise MalformedResponse(f"{address}: page lacks n_tx/txs")
        return n_tx, txs

    def fetch_address_transactions(self, address: str) -> Iterator[TxRecord]:
        offset = 0
        total: Optional[int] = None
        seen = set()
        while True:
            data = self._get_page(address, self.page_size, offset)
            if data is None:
                return
            n_tx, txs = self._page_parts(data, address)
            if total is None:
                total = n_tx
            for raw in txs:
                tx = map_transaction(raw)
                if tx.hash not in seen:
                    seen.add(tx.hash)
                    yield tx
            offset += len(txs)
            if len(txs) < self.page_size or offset >= total:
                logger.debug(f"{address}: {len(seen)} txs in {offset // self.page_size + 1} pages")
                return

    def fetch_address_summary(self, address: str) -> AddressSummary:
        with self._lock:
            if address in self._summaries:
                return self._summaries[address]
        summary = self._summarize(address)
        with self._lock:
            self._summaries[address] = summary
        return summary

    def _summarize(self, address: str) -> AddressSummary:
        data = self._get_page(address, 1, 0)
        if data is None:
            return AddressSummary(address=address, total_tx_count=0)
        n_tx, txs = self._page_parts(data, address)
        if n_tx == 0:
            return AddressSummary(address=address, total_tx_count=0)
        # Newest first: the oldest transaction sits at offset n_tx - 1
        if n_tx > 1:
            data = self._get_page(address, 1, n_tx - 1)
            if data is None:
                raise MalformedResponse(f"{address}: history vanished while paging")
            _, txs = self._page_parts(data, address)
        if not txs:
            raise MalformedResponse(f"{address}: n_tx {n_tx} but no transactions returned")
        oldest = map_transaction(txs[0])
        return AddressSummary(
            address=address,
            total_tx_count=n_tx,
            first_seen=FirstSeen(oldest.gmt_date, oldest.gmt_time, oldest.hash),
        )

    def close(self) -> None:
        self.session.close()

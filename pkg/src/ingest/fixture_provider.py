"""
Deterministic offline provider backed by snapshot files.

Layout of a fixture directory:

    transactions/<address>.json   list of transactions involving the address
    summaries.json                {address: {total_tx_count, first_seen}} (optional)

Each transaction is the mapped TxRecord form: hash, inputs and outputs as
lists of {address, amount} with integer satoshi amounts, gmt_date
(YYYY-MM-DD), gmt_time (HH:MM:SS) and is_coinbase, plus optional
unaddressed_inputs and unaddressed_outputs lists of bare satoshi amounts.
`first_seen` is {date, time, tx_hash} or null.
"""
import json
import logging
import threading
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Union

from pydantic import TypeAdapter, ValidationError

from src.core.errors import MalformedResponse
from src.core.model import TxRecord
from .provider import AddressSummary, FirstSeen, Provider, summary_from_transactions


logger = logging.getLogger(__name__)

_tx_list = TypeAdapter(List[TxRecord])


class FixtureProvider(Provider):
    """Serves transactions and summaries from a fixture directory or from memory."""

    def __init__(
        self,
        directory: Optional[Union[str, Path]] = None,
        transactions: Optional[Dict[str, List[TxRecord]]] = None,
        summaries: Optional[Dict[str, AddressSummary]] = None,
    ):
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None and not self.directory.is_dir():
            raise MalformedResponse(f"fixture directory not found: {self.directory}")
        self._memory = transactions
        self._declared = summaries
        self._cache: Dict[str, AddressSummary] = {}
        self._lock = threading.Lock()
        self.requests = 0

    @classmethod
    def from_transactions(cls, txs: Iterable[TxRecord]) -> "FixtureProvider":
        """In-memory provider whose view of the chain is exactly `txs`, in the given order."""
        index: Dict[str, List[TxRecord]] = defaultdict(list)
        for tx in txs:
            for address in dict.fromkeys(io.address for io in tx.inputs + tx.outputs):
                index[address].append(tx)
        return cls(transactions=dict(index), summaries={})

    def _load_file(self, address: str) -> Optional[List[TxRecord]]:
        path = self.directory / "transactions" / f"{address}.json"
        if not path.exists():
            return None
        try:
            return _tx_list.validate_json(path.read_bytes())
        except ValidationError as e:
            raise MalformedResponse(f"{path}: {e.errors()[0]['msg']} at {e.errors()[0]['loc']}") from None

    def _history(self, address: str) -> Optional[List[TxRecord]]:
        if self._memory is not None:
            return self._memory.get(address)
        return self._load_file(address)

    def fetch_address_transactions(self, address: str) -> Iterator[TxRecord]:
        with self._lock:
            self.requests += 1
        history = self._history(address) or []
        seen = set()
        for tx in history:
            if not tx.involves(address):
                raise MalformedResponse(f"fixture tx {tx.hash} listed for {address} does not involve it")
            if tx.hash in seen:
                continue
            seen.add(tx.hash)
            yield tx

    def _declared_summaries(self) -> Dict[str, AddressSummary]:
        if self._declared is not None:
            return self._declared
        path = self.directory / "summaries.json"
        declared: Dict[str, AddressSummary] = {}
        if path.exists():
            try:
                raw = json.loads(path.read_text(encoding="utf-8"))
                for address, entry in raw.items():
                    first = entry.get("first_seen")
                    declared[address] = AddressSummary(
                        address=address,
                        total_tx_count=entry["total_tx_count"],
                        first_seen=FirstSeen(first["date"], first["time"], first["tx_hash"]) if first else None,
                    )
            except (ValueError, KeyError, TypeError, AttributeError) as e:
                raise MalformedResponse(f"{path}: {e}") from None
        self._declared = declared
        return declared

    def fetch_address_summary(self, address: str) -> AddressSummary:
        with self._lock:
            if address in self._cache:
                return self._cache[address]
            declared = self._declared_summaries().get(address)
        history = self._history(address)
        derived = summary_from_transactions(address, history) if history is not None else None

        if declared is not None and derived is not None and declared != derived:
            raise MalformedResponse(
                f"summary for {address} disagrees with its transactions: "
                f"declared {declared.total_tx_count}/{declared.first_seen}, "
                f"found {derived.total_tx_count}/{derived.first_seen}"
            )
        summary = declared or derived or AddressSummary(address=address, total_tx_count=0)
        with self._lock:
            self._cache[address] = summary
        return summary

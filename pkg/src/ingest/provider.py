"""Provider abstraction over blockchain data sources."""
import enum
import logging
from abc import ABC, abstractmethod
from datetime import date, time
from typing import Iterable, Iterator, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.model import AddressId, TxRecord


logger = logging.getLogger(__name__)


class ProviderKind(str, enum.Enum):
    HTTP = "http"
    FIXTURE = "fixture"


class ProviderSpec(BaseModel):
    """Which provider to use and how to talk to it."""
    kind: ProviderKind
    base_url_or_dir: str
    rate_limit: float = Field(default=0.5, gt=0)  # requests/second, http only
    max_retries: int = Field(default=3, ge=0)
    page_size: int = Field(default=50, gt=0)

    model_config = ConfigDict(frozen=True)


class FirstSeen(NamedTuple):
    gmt_date: date
    gmt_time: time
    tx_hash: str


class AddressSummary(BaseModel):
    """The provider's global view of one address."""
    address: AddressId
    total_tx_count: int = Field(ge=0)
    first_seen: Optional[FirstSeen] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _first_seen_iff_used(self) -> "AddressSummary":
        if (self.first_seen is None) != (self.total_tx_count == 0):
            raise ValueError(f"{self.address}: first_seen must be absent exactly when total_tx_count is 0")
        return self

    def seen_before(self, tx: TxRecord) -> bool:
        """True if the address appeared in the chain strictly before `tx`."""
        return self.first_seen is not None and tuple(self.first_seen) < tx.sort_key


def summary_from_transactions(address: str, txs: Iterable[TxRecord]) -> AddressSummary:
    """Summarize an address from its complete transaction list."""
    mine = {tx.hash: tx for tx in txs if tx.involves(address)}
    if not mine:
        return AddressSummary(address=address, total_tx_count=0)
    first = min(mine.values(), key=lambda tx: tx.sort_key)
    return AddressSummary(
        address=address,
        total_tx_count=len(mine),
        first_seen=FirstSeen(first.gmt_date, first.gmt_time, first.hash),
    )


class Provider(ABC):
    """Source of per-address transaction histories and address summaries."""

    @abstractmethod
    def fetch_address_transactions(self, address: str) -> Iterator[TxRecord]:
        """Yield every transaction involving `address`, each hash once."""

    @abstractmethod
    def fetch_address_summary(self, address: str) -> AddressSummary:
        """Summary reflecting the provider's global view of `address`."""

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def make_provider(spec: ProviderSpec, **kwargs) -> Provider:
    """Build the provider described by `spec`; extra kwargs go to the constructor."""
    if spec.kind == ProviderKind.FIXTURE:
        from .fixture_provider import FixtureProvider
        return FixtureProvider(spec.base_url_or_dir)
    from .http_provider import HttpProvider
    return HttpProvider(spec, **kwargs)

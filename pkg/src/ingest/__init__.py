"""Chain data ingestion: providers, price series, cluster ingest."""
from .fixture_provider import FixtureProvider
from .http_provider import HttpProvider, RateLimiter, RetryPolicy, map_transaction
from .ingest import IngestReport, ingest_cluster
from .prices import load_price_series
from .provider import (
    AddressSummary,
    FirstSeen,
    Provider,
    ProviderKind,
    ProviderSpec,
    make_provider,
    summary_from_transactions,
)

__all__ = [
    "FixtureProvider",
    "HttpProvider",
    "RateLimiter",
    "RetryPolicy",
    "map_transaction",
    "IngestReport",
    "ingest_cluster",
    "load_price_series",
    "AddressSummary",
    "FirstSeen",
    "Provider",
    "ProviderKind",
    "ProviderSpec",
    "make_provider",
    "summary_from_transactions",
]

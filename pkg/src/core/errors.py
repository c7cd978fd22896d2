"""Exception hierarchy with stable CLI exit codes."""
from typing import Any, Optional


class RansomTraceError(Exception):
    """Base class for every error the toolkit raises on purpose."""
    exit_code = 1


class ConfigError(RansomTraceError):
    """Invalid flags, settings or campaign file."""
    exit_code = 2


class StageDependencyMissing(RansomTraceError):
    """A subcommand ran before the stage producing its inputs."""
    exit_code = 3


# Provider errors

class ProviderError(RansomTraceError):
    exit_code = 4


class ProviderUnavailable(ProviderError):
    """The provider kept failing after every retry."""


class RateLimited(ProviderError):
    """The provider answered HTTP 429."""


class MalformedResponse(ProviderError):
    """Provider data does not match the expected schema."""
    exit_code = 5


# Data errors

class DataError(RansomTraceError):
    exit_code = 5


class MalformedAddress(DataError):
    pass


class MalformedRow(DataError):
    """A CSV row could not be parsed."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class OrderingViolation(DataError):
    """Daily price quotes are not ordered low <= avg <= high."""


class DuplicateDate(DataError):
    pass


class ConflictingDuplicate(DataError):
    """Same transaction hash stored with a different body."""


class CoinbaseInput(DataError):
    """Multi-input heuristic applied to a coinbase transaction."""


class CoinbaseFeeUndefined(DataError):
    pass


class NegativeFee(DataError):
    """Transaction outputs exceed its inputs."""


class MissingPrice(DataError):
    pass


class EmptyInput(DataError):
    pass


class ClusterSizeExceeded(DataError):
    """Expansion hit max_cluster_size; `partial` holds the cluster so far."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        self.partial = partial
        super().__init__(message)


# Storage errors

class StorageFailure(RansomTraceError):
    exit_code = 5


class SchemaVersionMismatch(StorageFailure):
    pass


class ReadOnlyStore(StorageFailure):
    pass

"""Domain value types shared by every stage.

Amounts are integer satoshis end to end; USD values are exact decimals and
only get rounded (half-up) when rendered.
"""
import enum
from datetime import date, time
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation, localcontext
from typing import Annotated, Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, StrictInt, model_validator

from .errors import MalformedAddress


SATOSHI_PER_BTC = 100_000_000
USD_PRECISION = 60  # significant digits used for every USD computation


def _check_address(text: str) -> str:
    if not isinstance(text, str) or not 26 <= len(text) <= 35 or text[0] not in "13":
        raise ValueError(f"malformed address {text!r}: need 26-35 characters starting with 1 or 3")
    return text


AddressId = Annotated[str, AfterValidator(_check_address)]
Satoshi = Annotated[StrictInt, Field(ge=0)]
UsdAmount = Annotated[Decimal, Field(ge=0)]
TxHash = Annotated[str, Field(pattern=r"^[0-9a-f]{64}$")]


def is_address(text: object) -> bool:
    try:
        _check_address(text)
    except ValueError:
        return False
    return True


def parse_address(text: str) -> str:
    """Validate the length and leading character of a base58 address."""
    try:
        return _check_address(text)
    except ValueError as e:
        raise MalformedAddress(str(e)) from None


def btc_display(amount: int) -> str:
    """Render satoshis as BTC with exactly 8 fractional digits."""
    whole, frac = divmod(amount, SATOSHI_PER_BTC)
    return f"{whole}.{frac:08d}"


def parse_btc(text: Union[str, int, Decimal]) -> int:
    """Parse a decimal BTC amount into satoshis; sub-satoshi precision is an error."""
    try:
        value = Decimal(str(text)).scaleb(8)
    except InvalidOperation:
        raise ValueError(f"not a BTC amount: {text!r}") from None
    if value != value.to_integral_value():
        raise ValueError(f"BTC amount {text!r} has sub-satoshi precision")
    return int(value)


def format_btc(amount: int, places: int = 8) -> str:
    """Render satoshis as BTC rounded half-up to `places` decimals."""
    value = Decimal(amount).scaleb(-8)
    return f"{value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP):f}"


def format_usd(value: Decimal, places: int = 2) -> str:
    with localcontext() as ctx:
        ctx.prec = USD_PRECISION
        return f"{value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP):f}"


class Provenance(str, enum.Enum):
    """How an address entered a cluster."""
    SEED = "seed"
    MULTI_INPUT = "multi_input"
    SHADOW = "shadow"


class Denomination(str, enum.Enum):
    BTC = "BTC"
    USD = "USD"


class Branch(str, enum.Enum):
    """Which condition of the ransom rule matched."""
    BTC_EXACT = "btc_exact"
    BTC_MINUS_FEE = "btc_minus_fee"
    USD_BAND = "usd_band"
    USD_BAND_MINUS_FEE = "usd_band_minus_fee"


class Quote(str, enum.Enum):
    LOW = "low"
    AVG = "avg"
    HIGH = "high"


class TxIO(BaseModel):
    """One (address, amount) pair of a transaction input or output."""
    address: AddressId
    amount: Satoshi

    model_config = ConfigDict(frozen=True)


class TxRecord(BaseModel):
    """
    One confirmed transaction.

    Inputs and outputs whose script has no base58 address (bech32, P2PK,
    OP_RETURN, ...) cannot be attributed, but their amounts still count
    towards totals and fee; they are kept, in order, as bare amounts.
    """
    hash: TxHash
    inputs: Tuple[TxIO, ...] = ()
    outputs: Tuple[TxIO, ...] = ()
    unaddressed_inputs: Tuple[Satoshi, ...] = ()
    unaddressed_outputs: Tuple[Satoshi, ...] = ()
    gmt_date: date
    gmt_time: time
    is_coinbase: bool = False

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _coinbase_has_no_inputs(self) -> "TxRecord":
        spends = bool(self.inputs or self.unaddressed_inputs)
        if self.is_coinbase == spends:
            raise ValueError(f"tx {self.hash}: is_coinbase must be true exactly when inputs are empty")
        return self

    @property
    def sort_key(self) -> Tuple[date, time, str]:
        return (self.gmt_date, self.gmt_time, self.hash)

    def input_addresses(self) -> List[str]:
        """Distinct input addresses in first-appearance order."""
        return list(dict.fromkeys(io.address for io in self.inputs))

    def output_addresses(self) -> List[str]:
        return list(dict.fromkeys(io.address for io in self.outputs))

    def payee_count(self) -> int:
        """Distinct output destinations; each unaddressed output counts as its own."""
        return len(self.output_addresses()) + len(self.unaddressed_outputs)

    @property
    def input_total(self) -> int:
        return sum(io.amount for io in self.inputs) + sum(self.unaddressed_inputs)

    @property
    def output_total(self) -> int:
        return sum(io.amount for io in self.outputs) + sum(self.unaddressed_outputs)

    def credited(self, address: str) -> int:
        """Sum of all outputs paying `address`."""
        return sum(io.amount for io in self.outputs if io.address == address)

    def involves(self, address: str) -> bool:
        return any(io.address == address for io in self.inputs + self.outputs)


class PaymentEvent(BaseModel):
    """A credit of satoshis to one tracked address within one transaction."""
    tx_hash: TxHash
    address: AddressId
    amount: Satoshi
    gmt_date: date
    gmt_time: Optional[time] = None
    address_was_input: bool = False

    model_config = ConfigDict(frozen=True)

    @property
    def sort_key(self) -> Tuple[date, time, str, str]:
        return (self.gmt_date, self.gmt_time or time(0), self.tx_hash, self.address)


class DailyPrice(BaseModel):
    """Per-day BTC-USD quotes."""
    date: date
    low: UsdAmount
    avg: UsdAmount
    high: UsdAmount

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _ordered(self) -> "DailyPrice":
        if not self.low <= self.avg <= self.high:
            raise ValueError(f"{self.date}: expected low <= avg <= high")
        return self

    def quote(self, which: Quote) -> Decimal:
        return getattr(self, Quote(which).value)


PriceSeries = Dict[date, DailyPrice]


class RansomRule(BaseModel):
    """One demand line of a campaign schedule; dates are inclusive."""
    label: str
    denomination: Denomination
    amount: Union[StrictInt, Decimal]  # satoshis for BTC, dollars for USD
    start_date: date
    end_date: date

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "RansomRule":
        if self.start_date > self.end_date:
            raise ValueError(f"rule {self.label!r}: start_date after end_date")
        if self.amount <= 0:
            raise ValueError(f"rule {self.label!r}: amount must be positive")
        if self.denomination == Denomination.BTC and not isinstance(self.amount, int):
            raise ValueError(f"rule {self.label!r}: BTC amounts are integer satoshis")
        if self.denomination == Denomination.USD and not isinstance(self.amount, Decimal):
            object.__setattr__(self, "amount", Decimal(self.amount))
        return self

    def active_on(self, day: date) -> bool:
        return self.start_date <= day <= self.end_date


class ClusterMember(BaseModel):
    address: AddressId
    provenance: Provenance
    discovery_round: int = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _seed_round(self) -> "ClusterMember":
        if (self.provenance == Provenance.SEED) != (self.discovery_round == 0):
            raise ValueError(f"{self.address}: seeds and only seeds have discovery_round 0")
        return self


class ClusterSet(BaseModel):
    """Addresses attributed to one campaign, with provenance per address."""
    campaign: str
    members: Tuple[ClusterMember, ...] = ()
    rounds: int = 0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "ClusterSet":
        seen = set()
        for member in self.members:
            if member.address in seen:
                raise ValueError(f"duplicate cluster member {member.address}")
            seen.add(member.address)
        return self

    @classmethod
    def from_members(cls, campaign: str, members: Iterable[ClusterMember], rounds: int = 0) -> "ClusterSet":
        ordered = sorted(members, key=lambda m: (m.discovery_round, m.address))
        return cls(campaign=campaign, members=tuple(ordered), rounds=rounds)

    def addresses(self) -> FrozenSet[str]:
        return frozenset(m.address for m in self.members)

    def get(self, address: str) -> Optional[ClusterMember]:
        return next((m for m in self.members if m.address == address), None)

    def __len__(self) -> int:
        return len(self.members)


class ClassifiedPayment(BaseModel):
    """A payment matched by a ransom rule."""
    payment: PaymentEvent
    rule_label: str
    matched_branch: Branch
    usd_value_avg: UsdAmount

    model_config = ConfigDict(frozen=True)


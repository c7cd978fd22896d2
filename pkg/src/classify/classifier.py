"""
Ransom classification of payment events.

A payment of r satoshis on day D matches a rule active on D when

    BTC rule d:  r == d              (btc_exact)
                 r == d - fee        (btc_minus_fee)
    USD rule d:  r*low <= d <= r*high                      (usd_band)
                 fee-adjusted band per FeeBandMode         (usd_band_minus_fee)

with low/high the day's quotes per BTC. Rules are tried in declared order
and the first match wins.
"""
import enum
import logging
from decimal import Decimal, localcontext
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from src.core.errors import CoinbaseFeeUndefined, MissingPrice, NegativeFee
from src.core.model import (
    USD_PRECISION,
    Branch,
    ClassifiedPayment,
    ClusterSet,
    DailyPrice,
    Denomination,
    PaymentEvent,
    PriceSeries,
    Quote,
    RansomRule,
    TxRecord,
)
from src.db.database import StoreHandle
from src.db.ledger import get_transactions, payments_to_any
from .campaign import CampaignConfig


logger = logging.getLogger(__name__)


class FeeBandMode(str, enum.Enum):
    # d - fee*avg must fall inside [r*low, r*high]
    FEE_TO_USD = "fee_to_usd"
    # d must fall inside [(r+fee)*low, (r+fee)*high]
    GROSS_BAND = "gross_band"


class UnclassifiableReason(str, enum.Enum):
    MISSING_PRICE = "missing_price"
    NEGATIVE_FEE = "negative_fee"


class UnclassifiablePayment(BaseModel):
    payment: PaymentEvent
    reason: UnclassifiableReason

    model_config = ConfigDict(frozen=True)


class ClassificationResult(BaseModel):
    """Every payment of a cluster, in exactly one of three partitions."""
    campaign: str = ""
    rules: Tuple[RansomRule, ...] = ()
    ransoms: Tuple[ClassifiedPayment, ...] = ()
    non_ransoms: Tuple[PaymentEvent, ...] = ()
    unclassifiable: Tuple[UnclassifiablePayment, ...] = ()

    model_config = ConfigDict(frozen=True)

    @property
    def ransom_btc(self) -> int:
        return sum(c.payment.amount for c in self.ransoms)

    @property
    def non_ransom_count(self) -> int:
        return len(self.non_ransoms)

    @property
    def non_ransom_btc(self) -> int:
        return sum(p.amount for p in self.non_ransoms)

    @property
    def unclassifiable_btc(self) -> int:
        return sum(u.payment.amount for u in self.unclassifiable)

    @property
    def total_btc(self) -> int:
        return self.ransom_btc + self.non_ransom_btc + self.unclassifiable_btc

    def all_payments(self) -> List[PaymentEvent]:
        payments = [c.payment for c in self.ransoms] + list(self.non_ransoms)
        payments += [u.payment for u in self.unclassifiable]
        return sorted(payments, key=lambda p: p.sort_key)


def usd_value(amount: int, price: DailyPrice, which: Quote = Quote.AVG) -> Decimal:
    """Exact USD value of `amount` satoshis at the chosen quote of the day."""
    with localcontext() as ctx:
        ctx.prec = USD_PRECISION
        return (Decimal(amount) * price.quote(which)).scaleb(-8)


def transaction_fee(tx: TxRecord) -> int:
    """Inputs total minus outputs total, in satoshis."""
    if tx.is_coinbase:
        raise CoinbaseFeeUndefined(f"tx {tx.hash} is coinbase; its fee is undefined")
    fee = tx.input_total - tx.output_total
    if fee < 0:
        raise NegativeFee(f"tx {tx.hash} spends {tx.input_total} but outputs {tx.output_total}")
    return fee


def _match(
    rule: RansomRule,
    amount: int,
    fee: Optional[int],
    price: DailyPrice,
    mode: FeeBandMode,
) -> Optional[Branch]:
    if rule.denomination == Denomination.BTC:
        if amount == rule.amount:
            return Branch.BTC_EXACT
        if fee is not None and amount == rule.amount - fee:
            return Branch.BTC_MINUS_FEE
        return None

    demand = rule.amount
    low = usd_value(amount, price, Quote.LOW)
    high = usd_value(amount, price, Quote.HIGH)
    if low <= demand <= high:
        return Branch.USD_BAND
    if fee is None:
        return None
    with localcontext() as ctx:
        ctx.prec = USD_PRECISION
        if mode == FeeBandMode.FEE_TO_USD:
            net = demand - usd_value(fee, price, Quote.AVG)
            matched = low <= net <= high
        else:
            gross = amount + fee
            matched = usd_value(gross, price, Quote.LOW) <= demand <= usd_value(gross, price, Quote.HIGH)
    return Branch.USD_BAND_MINUS_FEE if matched else None


def classify_payment(
    payment: PaymentEvent,
    tx: TxRecord,
    rules: Sequence[RansomRule],
    price: Optional[DailyPrice],
    fee_band_mode: FeeBandMode = FeeBandMode.FEE_TO_USD,
) -> Optional[ClassifiedPayment]:
    """
    Classify one payment against a rule schedule.

    Coinbase credits have no fee, so only the exact and band branches apply.

    Returns:
        The ClassifiedPayment for the first matching rule, or None.

    Raises:
        MissingPrice: no price for the payment's day
        NegativeFee: the paying tx outputs more than it spends
    """
    if tx.hash != payment.tx_hash:
        raise ValueError(f"payment {payment.tx_hash} classified against tx {tx.hash}")
    if price is None:
        raise MissingPrice(f"no price for {payment.gmt_date}")
    if price.date != payment.gmt_date:
        raise ValueError(f"price for {price.date} used for a payment on {payment.gmt_date}")

    fee = None if tx.is_coinbase else transaction_fee(tx)
    mode = FeeBandMode(fee_band_mode)
    for rule in rules:
        if not rule.active_on(payment.gmt_date):
            continue
        branch = _match(rule, payment.amount, fee, price, mode)
        if branch is not None:
            return ClassifiedPayment(
                payment=payment,
                rule_label=rule.label,
                matched_branch=branch,
                usd_value_avg=usd_value(payment.amount, price, Quote.AVG),
            )
    return None


def classify_payments(
    payments: Iterable[PaymentEvent],
    txs: Mapping[str, TxRecord],
    rules: Sequence[RansomRule],
    prices: PriceSeries,
    fee_band_mode: FeeBandMode = FeeBandMode.FEE_TO_USD,
    campaign: str = "",
) -> ClassificationResult:
    """Partition `payments` into ransom, non-ransom and unclassifiable."""
    ransoms: List[ClassifiedPayment] = []
    others: List[PaymentEvent] = []
    unclassifiable: List[UnclassifiablePayment] = []

    for payment in sorted(payments, key=lambda p: p.sort_key):
        tx = txs[payment.tx_hash]
        try:
            classified = classify_payment(payment, tx, rules, prices.get(payment.gmt_date), fee_band_mode)
        except MissingPrice:
            unclassifiable.append(UnclassifiablePayment(payment=payment, reason=UnclassifiableReason.MISSING_PRICE))
            continue
        except NegativeFee:
            unclassifiable.append(UnclassifiablePayment(payment=payment, reason=UnclassifiableReason.NEGATIVE_FEE))
            continue
        if classified is None:
            others.append(payment)
        else:
            ransoms.append(classified)

    if unclassifiable:
        reasons: Dict[str, int] = {}
        for u in unclassifiable:
            reasons[u.reason.value] = reasons.get(u.reason.value, 0) + 1
        logger.warning(f"{len(unclassifiable)} payments unclassifiable: {reasons}")

    return ClassificationResult(
        campaign=campaign,
        rules=tuple(rules),
        ransoms=tuple(ransoms),
        non_ransoms=tuple(others),
        unclassifiable=tuple(unclassifiable),
    )


def classify_cluster(
    store: StoreHandle,
    cluster: ClusterSet,
    config: CampaignConfig,
    prices: PriceSeries,
    fee_band_mode: FeeBandMode = FeeBandMode.FEE_TO_USD,
) -> ClassificationResult:
    """Classify every stored payment to every cluster member."""
    payments = payments_to_any(store, cluster.addresses())
    txs = {tx.hash: tx for tx in get_transactions(store, {p.tx_hash for p in payments})}
    result = classify_payments(payments, txs, config.rules, prices, fee_band_mode, campaign=config.name)
    logger.info(
        f"Classified {len(payments)} payments of {config.name}: {len(result.ransoms)} ransom, "
        f"{result.non_ransom_count} non-ransom, {len(result.unclassifiable)} unclassifiable"
    )
    return result

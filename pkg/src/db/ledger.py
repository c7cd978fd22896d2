"""Ledger operations over a StoreHandle: deduplicating inserts and ordered queries."""
import logging
from typing import AbstractSet, Iterable, List, NamedTuple, Optional

from sqlalchemy.orm import Session

from src.core.errors import ConflictingDuplicate
from src.core.model import PaymentEvent, TxRecord
from .dao import PaymentDAO, TransactionDAO
from .dao.payment_dao import DateWindow
from .database import StoreHandle


logger = logging.getLogger(__name__)


class InsertCounts(NamedTuple):
    tx_new: int
    payments_new: int


def _insert(db: Session, tx: TxRecord, tracked: AbstractSet[str]) -> InsertCounts:
    tx_dao = TransactionDAO(db)
    payment_dao = PaymentDAO(db)

    stored = tx_dao.get_by_hash(tx.hash)
    if stored is None:
        tx_dao.add(tx)
        db.flush()
    elif stored != tx:
        raise ConflictingDuplicate(f"tx {tx.hash} already stored with different content")

    have = payment_dao.addresses_for_tx(tx.hash) if stored is not None else set()
    spenders = set(tx.input_addresses())
    added = 0
    for address in tx.output_addresses():
        if address not in tracked or address in have:
            continue
        payment_dao.add(PaymentEvent(
            tx_hash=tx.hash,
            address=address,
            amount=tx.credited(address),
            gmt_date=tx.gmt_date,
            gmt_time=tx.gmt_time,
            address_was_input=address in spenders,
        ))
        added += 1
    db.flush()
    return InsertCounts(int(stored is None), added)


def insert_tx(store: StoreHandle, tx: TxRecord, tracked: AbstractSet[str]) -> int:
    """
    Store `tx` once and add a payment row per tracked output address.

    Returns:
        The number of new payment rows.
    """
    with store.writing() as db:
        counts = _insert(db, tx, tracked)
        db.commit()
    return counts.payments_new


def insert_many(store: StoreHandle, txs: Iterable[TxRecord], tracked: AbstractSet[str]) -> InsertCounts:
    """Insert a batch in one database transaction; nothing is kept if any tx conflicts."""
    tx_new = payments_new = 0
    with store.writing() as db:
        for tx in txs:
            counts = _insert(db, tx, tracked)
            tx_new += counts.tx_new
            payments_new += counts.payments_new
        db.commit()
    logger.debug(f"Stored {tx_new} new txs, {payments_new} new payments")
    return InsertCounts(tx_new, payments_new)


def payments_to(store: StoreHandle, address: str, window: Optional[DateWindow] = None) -> List[PaymentEvent]:
    with store.session() as db:
        return PaymentDAO(db).to_address(address, window)


def payments_to_any(store: StoreHandle, addresses: Iterable[str]) -> List[PaymentEvent]:
    with store.session() as db:
        return PaymentDAO(db).to_addresses(addresses)


def transactions_spending(store: StoreHandle, address: str) -> List[TxRecord]:
    with store.session() as db:
        return TransactionDAO(db).spending(address)


def get_transaction(store: StoreHandle, tx_hash: str) -> Optional[TxRecord]:
    with store.session() as db:
        return TransactionDAO(db).get_by_hash(tx_hash)


def get_transactions(store: StoreHandle, hashes: Iterable[str]) -> List[TxRecord]:
    with store.session() as db:
        return TransactionDAO(db).get_many(hashes)


def all_transactions(store: StoreHandle) -> List[TxRecord]:
    with store.session() as db:
        return TransactionDAO(db).list_all()


def all_payments(store: StoreHandle) -> List[PaymentEvent]:
    with store.session() as db:
        return PaymentDAO(db).list_all()

from datetime import date
from typing import Iterable, List, Optional, Set, Tuple

from sqlalchemy.orm import Session

from src.core.model import PaymentEvent
from src.db.models import Payment

DateWindow = Tuple[Optional[date], Optional[date]]


def to_event(row: Payment) -> PaymentEvent:
    return PaymentEvent(
        tx_hash=row.tx_hash,
        address=row.address,
        amount=row.btc_to_addr,
        gmt_date=row.gmt_date,
        gmt_time=row.gmt_time,
        address_was_input=row.address_as_input,
    )


class PaymentDAO:
    def __init__(self, db: Session):
        self.db = db

    def add(self, event: PaymentEvent) -> Payment:
        """Stage a new payment row; the caller commits."""
        row = Payment(
            tx_hash=event.tx_hash,
            address=event.address,
            btc_to_addr=event.amount,
            address_as_input=event.address_was_input,
            gmt_date=event.gmt_date,
            gmt_time=event.gmt_time,
        )
        self.db.add(row)
        return row

    def addresses_for_tx(self, tx_hash: str) -> Set[str]:
        """Addresses that already have a payment row for `tx_hash`."""
        rows = self.db.query(Payment.address).filter(Payment.tx_hash == tx_hash).all()
        return {r.address for r in rows}

    def to_address(self, address: str, window: Optional[DateWindow] = None) -> List[PaymentEvent]:
        """
        Payments credited to `address`, ordered by (date, time, tx hash).

        Args:
            address: The payee address.
            window: Optional inclusive (start, end) date range; either end may be None.
        """
        query = self.db.query(Payment).filter(Payment.address == address)
        if window:
            start, end = window
            if start:
                query = query.filter(Payment.gmt_date >= start)
            if end:
                query = query.filter(Payment.gmt_date <= end)
        rows = query.order_by(Payment.gmt_date, Payment.gmt_time, Payment.tx_hash).all()
        return [to_event(r) for r in rows]

    def to_addresses(self, addresses: Iterable[str]) -> List[PaymentEvent]:
        """Payments credited to any of `addresses`, ordered by (date, time, tx hash, address)."""
        wanted = sorted(set(addresses))
        events: List[PaymentEvent] = []
        for start in range(0, len(wanted), 500):
            chunk = wanted[start:start + 500]
            events.extend(to_event(r) for r in self.db.query(Payment).filter(Payment.address.in_(chunk)).all())
        return sorted(events, key=lambda p: p.sort_key)

    def list_all(self) -> List[PaymentEvent]:
        rows = self.db.query(Payment)\
            .order_by(Payment.gmt_date, Payment.gmt_time, Payment.tx_hash, Payment.address)\
            .all()
        return [to_event(r) for r in rows]

    def count(self) -> int:
        return self.db.query(Payment).count()

from typing import Iterable, List, Optional, Sequence, Tuple

from sqlalchemy.orm import Session, selectinload

from src.core.model import TxIO, TxRecord
from src.db.models import Transaction, TxInput, TxOutput


def _io_rows(model, addressed: Sequence[TxIO], unaddressed: Sequence[int]) -> list:
    # unaddressed amounts follow the addressed ones
    rows = [model(position=i, address=io.address, amount=io.amount) for i, io in enumerate(addressed)]
    start = len(rows)
    rows.extend(model(position=start + i, address=None, amount=amount) for i, amount in enumerate(unaddressed))
    return rows


def _split(rows) -> Tuple[Tuple[TxIO, ...], Tuple[int, ...]]:
    addressed = tuple(TxIO(address=r.address, amount=r.amount) for r in rows if r.address is not None)
    return addressed, tuple(r.amount for r in rows if r.address is None)


def to_row(tx: TxRecord) -> Transaction:
    """Build the ORM row (with its input/output children) for a TxRecord."""
    return Transaction(
        hash=tx.hash,
        gmt_date=tx.gmt_date,
        gmt_time=tx.gmt_time,
        is_coinbase=tx.is_coinbase,
        inputs=_io_rows(TxInput, tx.inputs, tx.unaddressed_inputs),
        outputs=_io_rows(TxOutput, tx.outputs, tx.unaddressed_outputs),
    )


def to_record(row: Transaction) -> TxRecord:
    inputs, unaddressed_inputs = _split(row.inputs)
    outputs, unaddressed_outputs = _split(row.outputs)
    return TxRecord(
        hash=row.hash,
        inputs=inputs,
        outputs=outputs,
        unaddressed_inputs=unaddressed_inputs,
        unaddressed_outputs=unaddressed_outputs,
        gmt_date=row.gmt_date,
        gmt_time=row.gmt_time,
        is_coinbase=row.is_coinbase,
    )


class TransactionDAO:
    def __init__(self, db: Session):
        self.db = db

    def _query(self):
        return self.db.query(Transaction).options(
            selectinload(Transaction.inputs), selectinload(Transaction.outputs)
        )

    def add(self, tx: TxRecord) -> Transaction:
        """Stage a new transaction row; the caller commits."""
        row = to_row(tx)
        self.db.add(row)
        return row

    def get_by_hash(self, tx_hash: str) -> Optional[TxRecord]:
        """Get a transaction by its hash."""
        row = self._query().filter(Transaction.hash == tx_hash).first()
        return to_record(row) if row else None

    def get_many(self, hashes: Iterable[str]) -> List[TxRecord]:
        """Get the stored transactions among `hashes`, in (date, time, hash) order."""
        wanted = list(set(hashes))
        records: List[TxRecord] = []
        # SQLite caps bound parameters per statement
        for start in range(0, len(wanted), 500):
            chunk = wanted[start:start + 500]
            records.extend(to_record(r) for r in self._query().filter(Transaction.hash.in_(chunk)).all())
        return sorted(records, key=lambda tx: tx.sort_key)

    def spending(self, address: str) -> List[TxRecord]:
        """Every stored transaction with `address` among its inputs."""
        spends = self.db.query(TxInput.tx_hash).filter(TxInput.address == address).distinct()
        rows = self._query()\
            .filter(Transaction.hash.in_(spends))\
            .order_by(Transaction.gmt_date, Transaction.gmt_time, Transaction.hash)\
            .all()
        return [to_record(r) for r in rows]

    def list_all(self) -> List[TxRecord]:
        rows = self._query().order_by(Transaction.gmt_date, Transaction.gmt_time, Transaction.hash).all()
        return [to_record(r) for r in rows]

    def count(self) -> int:
        return self.db.query(Transaction).count()

"""
Flat CSV interchange for a ledger store.

One row per (transaction, payee address), eight columns. Input and output
lists are `address:satoshis` items joined by ';' so fees and spends survive
the round trip; an input or output without an address is written as
`?:satoshis`. A transaction with no payment row is written once with an
empty `address` and `btc_to_addr` 0.
"""
import logging
import re
from collections import defaultdict
from datetime import date, time
from pathlib import Path
from typing import Dict, List, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from src.core.errors import ConflictingDuplicate, MalformedRow
from src.core.model import PaymentEvent, TxIO, TxRecord
from .dao import PaymentDAO, TransactionDAO
from .database import StoreHandle


logger = logging.getLogger(__name__)

HEADER = [
    "hash", "btc_to_addr", "trx_in_addrs", "trx_out_addrs",
    "gmt_date", "gmt_time", "address", "address_as_input",
]


UNADDRESSED = "?"


def _encode_ios(ios: Tuple[TxIO, ...], unaddressed: Tuple[int, ...]) -> str:
    items = [f"{io.address}:{io.amount}" for io in ios]
    items.extend(f"{UNADDRESSED}:{amount}" for amount in unaddressed)
    return ";".join(items)


def _decode_ios(text: str, line: int) -> Tuple[Tuple[TxIO, ...], Tuple[int, ...]]:
    if not text:
        return (), ()
    items, unaddressed = [], []
    for item in text.split(";"):
        address, sep, amount = item.rpartition(":")
        if not sep or not amount.isdigit():
            raise MalformedRow(line, f"bad address list item {item!r}")
        if address == UNADDRESSED:
            unaddressed.append(int(amount))
            continue
        try:
            items.append(TxIO(address=address, amount=int(amount)))
        except ValidationError as e:
            raise MalformedRow(line, f"bad address list item {item!r}: {e.errors()[0]['msg']}") from None
    return tuple(items), tuple(unaddressed)


def export_csv(store: StoreHandle, path: Union[str, Path]) -> int:
    """Write the whole store to `path`; returns the number of data rows."""
    with store.session() as db:
        txs = TransactionDAO(db).list_all()
        payments = PaymentDAO(db).list_all()

    by_tx: Dict[str, List[PaymentEvent]] = defaultdict(list)
    for p in payments:
        by_tx[p.tx_hash].append(p)

    rows: List[list] = []
    for tx in txs:
        common = [
            _encode_ios(tx.inputs, tx.unaddressed_inputs),
            _encode_ios(tx.outputs, tx.unaddressed_outputs),
            tx.gmt_date.isoformat(),
            tx.gmt_time.strftime("%H:%M:%S"),
        ]
        owed = sorted(by_tx.get(tx.hash, []), key=lambda p: p.address)
        if not owed:
            rows.append([tx.hash, 0, *common, "", 0])
        for p in owed:
            rows.append([tx.hash, p.amount, *common, p.address, int(p.address_was_input)])

    pd.DataFrame(rows, columns=HEADER).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Exported {len(rows)} rows to {path}")
    return len(rows)


def _parse_row(fields: list, line: int) -> Tuple[TxRecord, Union[PaymentEvent, None]]:
    # missing trailing fields come back as NaN
    present = sum(isinstance(f, str) for f in fields)
    if present != len(HEADER):
        raise MalformedRow(line, f"expected {len(HEADER)} columns, got {present}")
    tx_hash, amount, ins, outs, day, clock, address, as_input = fields
    if not amount.isdigit():
        raise MalformedRow(line, f"btc_to_addr {amount!r} is not a satoshi count")
    if as_input not in ("0", "1"):
        raise MalformedRow(line, f"address_as_input must be 0 or 1, got {as_input!r}")
    try:
        gmt_date = date.fromisoformat(day)
        gmt_time = time.fromisoformat(clock)
    except ValueError as e:
        raise MalformedRow(line, str(e)) from None
    inputs, unaddressed_inputs = _decode_ios(ins, line)
    outputs, unaddressed_outputs = _decode_ios(outs, line)
    try:
        tx = TxRecord(
            hash=tx_hash,
            inputs=inputs,
            outputs=outputs,
            unaddressed_inputs=unaddressed_inputs,
            unaddressed_outputs=unaddressed_outputs,
            gmt_date=gmt_date,
            gmt_time=gmt_time,
            is_coinbase=not (inputs or unaddressed_inputs),
        )
        payment = None
        if address:
            payment = PaymentEvent(
                tx_hash=tx_hash,
                address=address,
                amount=int(amount),
                gmt_date=gmt_date,
                gmt_time=gmt_time,
                address_was_input=as_input == "1",
            )
    except ValidationError as e:
        raise MalformedRow(line, e.errors()[0]["msg"]) from None
    if payment is not None and payment.amount != tx.credited(address):
        raise MalformedRow(line, f"btc_to_addr {amount} does not match outputs to {address}")
    return tx, payment


def import_csv(store: StoreHandle, path: Union[str, Path]) -> int:
    """
    Load an exported file into `store`.

    The file is validated completely before anything is written, so a bad
    row leaves the store untouched.

    Returns:
        The number of data rows read.
    """
    txs: Dict[str, TxRecord] = {}
    payments: List[PaymentEvent] = []
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise MalformedRow(1, f"expected header {','.join(HEADER)}") from None
    except pd.errors.ParserError as e:
        found = re.search(r"line (\d+)", str(e))
        raise MalformedRow(int(found.group(1)) if found else 0, str(e)) from None
    if list(frame.columns) != HEADER:
        raise MalformedRow(1, f"expected header {','.join(HEADER)}")

    rows = len(frame)
    for index, fields in enumerate(frame.itertuples(index=False, name=None)):
        line = index + 2
        if not any(isinstance(f, str) and f.strip() for f in fields):
            raise MalformedRow(line, "blank line")
        tx, payment = _parse_row(list(fields), line)
        if txs.setdefault(tx.hash, tx) != tx:
            raise MalformedRow(line, f"tx {tx.hash} repeated with different content")
        if payment is not None:
            payments.append(payment)

    with store.writing() as db:
        tx_dao = TransactionDAO(db)
        payment_dao = PaymentDAO(db)
        for tx in txs.values():
            stored = tx_dao.get_by_hash(tx.hash)
            if stored is None:
                tx_dao.add(tx)
            elif stored != tx:
                raise ConflictingDuplicate(f"tx {tx.hash} already stored with different content")
        db.flush()
        known: Dict[str, set] = {}
        for p in payments:
            have = known.setdefault(p.tx_hash, payment_dao.addresses_for_tx(p.tx_hash))
            if p.address not in have:
                payment_dao.add(p)
                have.add(p.address)
        db.commit()
    logger.info(f"Imported {rows} rows ({len(txs)} txs) from {path}")
    return rows

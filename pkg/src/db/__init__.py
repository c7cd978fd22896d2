"""Database package."""
from .database import StoreHandle, StoreMode, open_store
from .interchange import export_csv, import_csv
from .ledger import (
    InsertCounts,
    all_payments,
    all_transactions,
    get_transaction,
    get_transactions,
    insert_many,
    insert_tx,
    payments_to,
    payments_to_any,
    transactions_spending,
)
from .models import SCHEMA_VERSION, Base, Payment, SchemaInfo, Transaction, TxInput, TxOutput

__all__ = [
    "StoreHandle",
    "StoreMode",
    "open_store",
    "export_csv",
    "import_csv",
    "InsertCounts",
    "all_payments",
    "all_transactions",
    "get_transaction",
    "get_transactions",
    "insert_many",
    "insert_tx",
    "payments_to",
    "payments_to_any",
    "transactions_spending",
    "SCHEMA_VERSION",
    "Base",
    "Payment",
    "SchemaInfo",
    "Transaction",
    "TxInput",
    "TxOutput",
]

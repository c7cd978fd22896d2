from .payment_dao import PaymentDAO
from .transaction_dao import TransactionDAO

__all__ = ["PaymentDAO", "TransactionDAO"]

"""The two address-linking heuristics."""
from typing import Callable, FrozenSet, Optional

from src.core.errors import CoinbaseInput
from src.core.model import TxRecord


def multi_input_addresses(tx: TxRecord) -> FrozenSet[str]:
    """All input addresses of one transaction are controlled by the spender."""
    if tx.is_coinbase:
        raise CoinbaseInput(f"tx {tx.hash} is coinbase; it has no spender")
    return frozenset(tx.input_addresses())


def detect_shadow(tx: TxRecord, seen_before: Callable[[str], bool]) -> Optional[str]:
    """
    Return the change (shadow) address of `tx`, if its shape identifies one.

    The tx must pay exactly two distinct addresses, neither of them one of
    its own inputs, and exactly one of the two must never have appeared in
    the chain before `tx`. Outputs without an address count as payees.
    `seen_before` answers for the state strictly before the transaction.
    """
    if tx.payee_count() != 2:
        return None
    outputs = tx.output_addresses()
    if len(outputs) != 2:
        return None
    if set(outputs) & set(tx.input_addresses()):
        return None
    fresh = [address for address in outputs if not seen_before(address)]
    return fresh[0] if len(fresh) == 1 else None

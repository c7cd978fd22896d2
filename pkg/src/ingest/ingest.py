"""Fetch every cluster member's history into the ledger store."""
import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from src.core.model import ClusterSet, TxRecord
from src.core.worker_manager import WorkerManager
from src.db.database import StoreHandle
from src.db.ledger import InsertCounts, insert_many
from .provider import Provider


logger = logging.getLogger(__name__)


class IngestReport(BaseModel):
    tx_seen: int = 0
    tx_new: int = 0
    payments_new: int = 0
    addresses: int = 0

    model_config = ConfigDict(frozen=True)


def ingest_cluster(
    provider: Provider,
    store: StoreHandle,
    cluster: ClusterSet,
    parallelism: Optional[int] = None,
) -> IngestReport:
    """
    Store all transactions of all cluster members.

    Histories are fetched concurrently, then written by the calling thread
    in member order. A failed fetch does not stop the others: every history
    that arrived is stored before the earliest failure is re-raised, so a
    re-run only adds the rest.
    """
    tracked = cluster.addresses()
    members = sorted(tracked)
    logger.info(f"Ingesting {len(members)} addresses of {cluster.campaign}")

    def fetch(address: str) -> List[TxRecord]:
        return list(provider.fetch_address_transactions(address))

    seen = tx_new = payments_new = 0
    failure: Optional[BaseException] = None
    with WorkerManager(max_workers=parallelism) as workers:
        futures = [workers.submit(fetch, address) for address in members]
        for address, future in zip(members, futures):
            error = future.exception()
            if error is not None:
                logger.warning(f"{address}: fetch failed: {error}")
                failure = failure or error
                continue
            txs = future.result()
            counts: InsertCounts = insert_many(store, txs, tracked)
            logger.debug(f"{address}: {len(txs)} txs, {counts.tx_new} new, {counts.payments_new} new payments")
            seen += len(txs)
            tx_new += counts.tx_new
            payments_new += counts.payments_new
    if failure is not None:
        raise failure

    report = IngestReport(
        tx_seen=seen,
        tx_new=tx_new,
        payments_new=payments_new,
        addresses=len(members),
    )
    logger.info(
        f"Ingest done: {report.tx_seen} txs seen, {report.tx_new} new, {report.payments_new} new payments"
    )
    return report

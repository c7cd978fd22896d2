"""Fixed-point expansion of seed addresses into a campaign cluster."""
import enum
import logging
from typing import Dict, Iterable, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import ClusterSizeExceeded, EmptyInput
from src.core.model import ClusterMember, ClusterSet, Provenance, TxRecord, parse_address
from src.core.worker_manager import WorkerManager
from src.ingest.provider import Provider
from .heuristics import detect_shadow, multi_input_addresses


logger = logging.getLogger(__name__)


class ShadowDetection(str, enum.Enum):
    ENABLED = "enabled"
    DISABLED = "disabled"


class ExpansionConfig(BaseModel):
    """Limits for one expansion; absent limits run to the natural fixed point."""
    max_rounds: Optional[int] = Field(default=None, ge=1)
    max_cluster_size: Optional[int] = Field(default=None, ge=1)
    shadow_detection: ShadowDetection = ShadowDetection.ENABLED
    # Skip txs with more distinct inputs than this (mixer-shaped spends)
    max_inputs_per_tx: Optional[int] = Field(default=None, ge=1)

    model_config = ConfigDict(frozen=True)


def _spends(provider: Provider, address: str) -> List[TxRecord]:
    return [
        tx for tx in provider.fetch_address_transactions(address)
        if not tx.is_coinbase and address in tx.input_addresses()
    ]


def expand(
    seeds: Iterable[str],
    provider: Provider,
    config: Optional[ExpansionConfig] = None,
    campaign: str = "",
    parallelism: Optional[int] = None,
) -> ClusterSet:
    """
    Grow `seeds` with the multi-input and shadow heuristics until nothing new is found.

    Rounds are synchronous: round r scans the spends of the addresses found
    in round r-1 (the seeds in round 1), and everything it finds joins the
    cluster at the round barrier with discovery_round r. An address found
    by both heuristics in one round is recorded as multi_input.

    Raises:
        EmptyInput: no seeds
        ClusterSizeExceeded: the cluster outgrew max_cluster_size; the
            error's `partial` holds the cluster including the round that
            crossed the limit
    """
    config = config or ExpansionConfig()
    seed_list = sorted({parse_address(s) for s in seeds})
    if not seed_list:
        raise EmptyInput("expansion needs at least one seed address")

    members: Dict[str, ClusterMember] = {
        s: ClusterMember(address=s, provenance=Provenance.SEED, discovery_round=0) for s in seed_list
    }
    if config.max_cluster_size is not None and len(members) > config.max_cluster_size:
        raise ClusterSizeExceeded(
            f"{len(members)} seeds exceed max {config.max_cluster_size}",
            partial=ClusterSet.from_members(campaign, members.values(), 0),
        )
    frontier = seed_list
    rounds = 0

    with WorkerManager(max_workers=parallelism) as workers:
        while frontier:
            if config.max_rounds is not None and rounds >= config.max_rounds:
                logger.info(f"Stopping at max_rounds={config.max_rounds} with {len(frontier)} unscanned")
                break
            rounds += 1
            histories = workers.map_ordered(lambda a: _spends(provider, a), frontier)
            txs = {tx.hash: tx for history in histories for tx in history}

            found: Dict[str, Provenance] = {}
            for tx in sorted(txs.values(), key=lambda t: t.sort_key):
                spenders = multi_input_addresses(tx)
                if config.max_inputs_per_tx is not None and len(spenders) > config.max_inputs_per_tx:
                    logger.debug(f"Skipping tx {tx.hash} with {len(spenders)} inputs")
                    continue
                for address in spenders:
                    if address not in members:
                        found[address] = Provenance.MULTI_INPUT
                if config.shadow_detection == ShadowDetection.ENABLED:
                    shadow = detect_shadow(
                        tx, lambda a, tx=tx: provider.fetch_address_summary(a).seen_before(tx)
                    )
                    if shadow is not None and shadow not in members:
                        found.setdefault(shadow, Provenance.SHADOW)

            for address in found:
                members[address] = ClusterMember(
                    address=address, provenance=found[address], discovery_round=rounds
                )
            frontier = sorted(found)
            logger.info(
                f"Round {rounds}: scanned {len(txs)} spends, {len(found)} new, {len(members)} total"
            )

            if config.max_cluster_size is not None and len(members) > config.max_cluster_size:
                partial = ClusterSet.from_members(campaign, members.values(), rounds)
                raise ClusterSizeExceeded(
                    f"cluster reached {len(members)} addresses (max {config.max_cluster_size}) in round {rounds}",
                    partial=partial,
                )

    cluster = ClusterSet.from_members(campaign, members.values(), rounds)
    counts = {p.value: sum(1 for m in cluster.members if m.provenance == p) for p in Provenance}
    logger.info(f"Cluster {campaign or '<unnamed>'}: {len(cluster)} addresses after {rounds} rounds {counts}")
    return cluster

"""Tests for cluster ingestion into the ledger store."""
import threading

import pytest

from src.core.errors import ProviderUnavailable
from src.core.model import ClusterMember, ClusterSet, Provenance
from src.db import all_payments, all_transactions, insert_many, open_store, payments_to
from src.ingest import FixtureProvider, ingest_cluster
from tests.factories import DEMO_DIR, N, X, Y, Z, addr, make_tx


def _cluster(*addresses):
    members = [ClusterMember(address=addresses[0], provenance=Provenance.SEED, discovery_round=0)]
    members += [ClusterMember(address=a, provenance=Provenance.MULTI_INPUT, discovery_round=1) for a in addresses[1:]]
    return ClusterSet.from_members("test", members, rounds=2)


class FlakyProvider(FixtureProvider):
    """Fails every fetch for one address until `heal()` is called."""

    def __init__(self, broken, **kwargs):
        super().__init__(**kwargs)
        self.broken = broken
        self.healed = threading.Event()

    def heal(self):
        self.healed.set()

    def fetch_address_transactions(self, address):
        if address == self.broken and not self.healed.is_set():
            raise ProviderUnavailable(f"{address}: giving up")
        return super().fetch_address_transactions(address)


@pytest.fixture
def store():
    handle = open_store(":memory:")
    yield handle
    handle.close()


class TestIngestCluster:
    def test_demo_cluster(self, store):
        report = ingest_cluster(FixtureProvider(DEMO_DIR), store, _cluster(X, Y, N, Z), parallelism=2)
        assert report.addresses == 4
        assert report.tx_seen == 14
        assert report.tx_new == 11
        assert report.payments_new == 10
        assert len(all_transactions(store)) == 11
        assert [p.amount for p in payments_to(store, N)] == [49_900_000, 50_000_000]

    def test_rerun_adds_nothing(self, store):
        cluster = _cluster(X, Y, N, Z)
        ingest_cluster(FixtureProvider(DEMO_DIR), store, cluster)
        before = (all_transactions(store), all_payments(store))
        report = ingest_cluster(FixtureProvider(DEMO_DIR), store, cluster)
        assert (report.tx_new, report.payments_new) == (0, 0)
        assert (all_transactions(store), all_payments(store)) == before

    def test_shared_tx_counted_once_as_new(self, store):
        a, b, c = addr(1), addr(2), addr(3)
        shared = make_tx("shared", inputs=[(a, 10), (b, 10)], outputs=[(c, 19)])
        provider = FixtureProvider.from_transactions([shared])
        report = ingest_cluster(provider, store, _cluster(a, b))
        assert report.tx_seen == 2
        assert report.tx_new == 1
        assert report.payments_new == 0

    def test_resume_after_failure(self, store):
        a, b, c = addr(1), addr(2), addr(3)
        txs = [
            make_tx("pay-a", inputs=[(c, 10)], outputs=[(a, 9)]),
            make_tx("pay-b", inputs=[(c, 20)], outputs=[(b, 19)]),
            make_tx("joint", inputs=[(a, 9), (b, 19)], outputs=[(c, 27)]),
        ]
        histories = {a: [txs[0], txs[2]], b: [txs[1], txs[2]]}
        provider = FlakyProvider(b, transactions=histories, summaries={})
        cluster = _cluster(a, b)

        with pytest.raises(ProviderUnavailable):
            ingest_cluster(provider, store, cluster, parallelism=1)
        assert [p.address for p in all_payments(store)] == [a]

        provider.heal()
        report = ingest_cluster(provider, store, cluster, parallelism=1)
        assert report.tx_new == 1
        assert report.payments_new == 1
        assert len(all_transactions(store)) == 3
        assert sorted(p.address for p in all_payments(store)) == sorted([a, b])

    def test_stores_in_member_order_from_calling_thread(self, store, monkeypatch):
        a, b, c = addr(1), addr(2), addr(3)
        txs = {x: [make_tx(f"pay-{i}", inputs=[(addr(9), 10)], outputs=[(x, 9)])] for i, x in enumerate((a, b, c))}
        last_fetched = threading.Event()

        class SlowFirst(FixtureProvider):
            def fetch_address_transactions(self, address):
                if address == a:
                    assert last_fetched.wait(timeout=5)
                history = list(super().fetch_address_transactions(address))
                if address == c:
                    last_fetched.set()
                return history

        writes = []

        def recording_insert(handle, batch, tracked):
            writes.append(([tx.hash for tx in batch], threading.current_thread()))
            return insert_many(handle, batch, tracked)

        monkeypatch.setattr("src.ingest.ingest.insert_many", recording_insert)
        report = ingest_cluster(SlowFirst(transactions=txs, summaries={}), store, _cluster(a, b, c), parallelism=3)
        assert [hashes for hashes, _ in writes] == [[txs[x][0].hash] for x in sorted([a, b, c])]
        assert all(thread is threading.main_thread() for _, thread in writes)
        assert report.payments_new == 3

    def test_failure_still_stores_every_other_member(self, store):
        a, b, c = addr(1), addr(2), addr(3)
        txs = {x: [make_tx(f"pay-{i}", inputs=[(addr(9), 10)], outputs=[(x, 9)])] for i, x in enumerate((a, b, c))}
        provider = FlakyProvider(a, transactions=txs, summaries={})
        with pytest.raises(ProviderUnavailable):
            ingest_cluster(provider, store, _cluster(a, b, c), parallelism=2)
        assert sorted(p.address for p in all_payments(store)) == sorted([b, c])

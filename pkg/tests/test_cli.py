"""End-to-end tests of the command line on the demo snapshot."""
import json

import pytest

from main import main
from tests.factories import DEMO_CAMPAIGN, DEMO_DIR, DEMO_PRICES, N, X, Y, Z


REPORT_FILES = ["summary.csv", "per_rule.csv", "daily.csv", "per_address.csv", "cdf_count.csv", "cdf_btc.csv"]


@pytest.fixture
def paths(tmp_path):
    return {"out": tmp_path / "out", "store": tmp_path / "ledger.db"}


def _run(command, paths, *extra, prices=False):
    argv = [command, "--campaign", str(DEMO_CAMPAIGN), "--out", str(paths["out"]), "--store", str(paths["store"])]
    if command in ("expand", "ingest"):
        argv += ["--provider", "fixture", "--fixture-dir", str(DEMO_DIR)]
    if prices:
        argv += ["--prices", str(DEMO_PRICES)]
    return main(argv + list(extra))


def _pipeline(paths, *report_flags):
    assert _run("expand", paths) == 0
    assert _run("ingest", paths, "--parallelism", "2") == 0
    assert _run("classify", paths, prices=True) == 0
    assert _run("report", paths, *report_flags, prices=True) == 0


class TestPipeline:
    def test_demo_end_to_end(self, paths):
        _pipeline(paths)
        out = paths["out"]

        assert (out / "cluster.csv").read_text(encoding="utf-8") == (
            "address,provenance,round\n"
            f"{X},seed,0\n"
            f"{N},shadow,1\n"
            f"{Y},multi_input,1\n"
            f"{Z},multi_input,2\n"
        )
        assert (out / "summary.csv").read_text(encoding="utf-8") == (
            "scope,payments,btc,usd_low,usd_avg,usd_high\n"
            "overall,10,9.02195678,1971.89,2111.80,2246.21\n"
            "ransom,6,6.29950000,1506.94,1629.44,1747.94\n"
            "non_ransom,3,2.12245678,464.95,482.36,498.27\n"
            "unclassifiable,1,0.60000000,0.00,0.00,0.00\n"
        )
        unclassifiable = (out / "unclassifiable.csv").read_text(encoding="utf-8").splitlines()
        assert len(unclassifiable) == 2
        assert unclassifiable[1].endswith(",missing_price")

        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["campaign"] == "Demo"
        assert manifest["stage"] == "REPORTED"
        assert sorted(manifest["outputs"]) == sorted(REPORT_FILES)

    def test_reruns_are_byte_identical(self, tmp_path):
        first = {"out": tmp_path / "a", "store": tmp_path / "a.db"}
        second = {"out": tmp_path / "b", "store": tmp_path / "b.db"}
        _pipeline(first)
        _pipeline(second)
        for name in REPORT_FILES + ["cluster.csv", "classified.csv", "non_ransom.csv", "classification.json"]:
            assert (first["out"] / name).read_bytes() == (second["out"] / name).read_bytes(), name

    def test_ingest_twice_is_idempotent(self, paths, capsys):
        assert _run("expand", paths) == 0
        assert _run("ingest", paths) == 0
        assert _run("ingest", paths) == 0
        assert "0 new, 0 new payments" in capsys.readouterr().out

    def test_dense_daily(self, paths):
        _pipeline(paths, "--dense")
        lines = (paths["out"] / "daily.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 51
        assert lines[2] == "2013-10-11,0,0.00000000,0.00"


class TestExitCodes:
    def test_classify_before_ingest(self, paths):
        assert _run("expand", paths) == 0
        assert _run("classify", paths, prices=True) == 3

    def test_report_before_classify(self, paths):
        assert _run("report", paths, prices=True) == 3

    def test_unknown_flag(self, paths):
        with pytest.raises(SystemExit) as err:
            _run("expand", paths, "--bogus")
        assert err.value.code == 2

    def test_bad_campaign(self, paths, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text('{"name": "Broken", "seeds": []}', encoding="utf-8")
        assert main(["expand", "--campaign", str(broken), "--out", str(paths["out"])]) == 2

    def test_missing_prices(self, paths):
        assert _run("expand", paths) == 0
        assert _run("ingest", paths) == 0
        assert _run("classify", paths) == 2

    def test_size_valve_writes_partial_cluster(self, paths):
        assert _run("expand", paths, "--max-size", "2") == 5
        partial = (paths["out"] / "cluster.partial.csv").read_text(encoding="utf-8").splitlines()
        assert partial[0] == "address,provenance,round"
        assert len(partial) == 4
        assert not (paths["out"] / "cluster.csv").exists()

    @pytest.mark.parametrize("edit", [
        lambda text: text.replace("\n", "\n\n", 2),
        lambda text: text.replace(",seed,0", ",seed,1"),
    ])
    def test_hand_edited_cluster_is_rejected(self, paths, edit):
        assert _run("expand", paths) == 0
        cluster = paths["out"] / "cluster.csv"
        cluster.write_text(edit(cluster.read_text(encoding="utf-8")), encoding="utf-8")
        assert _run("ingest", paths) == 5

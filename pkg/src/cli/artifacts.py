"""Reading and writing the files each stage hands to the next."""
import logging
from pathlib import Path
from typing import Dict, Union

import pandas as pd
from pydantic import ValidationError

from src.classify.classifier import ClassificationResult
from src.core.errors import MalformedRow, StageDependencyMissing
from src.core.model import ClusterMember, ClusterSet, format_usd
from src.core.orchestrator import CLASSIFICATION_FILE, CLUSTER_FILE
from src.report.writers import write_csv


logger = logging.getLogger(__name__)

CLUSTER_COLUMNS = ["address", "provenance", "round"]
CLASSIFIED_FILE = "classified.csv"
CLASSIFIED_COLUMNS = ["tx_hash", "address", "date", "amount_sat", "rule_label", "branch", "usd_avg"]
NON_RANSOM_FILE = "non_ransom.csv"
PAYMENT_COLUMNS = ["tx_hash", "address", "date", "time", "amount_sat", "address_as_input"]
UNCLASSIFIABLE_FILE = "unclassifiable.csv"


def write_cluster(cluster: ClusterSet, out_dir: Union[str, Path], name: str = CLUSTER_FILE) -> Path:
    rows = [[m.address, m.provenance.value, m.discovery_round] for m in cluster.members]
    return write_csv(rows, CLUSTER_COLUMNS, Path(out_dir) / name)


def read_cluster(out_dir: Union[str, Path], campaign: str) -> ClusterSet:
    path = Path(out_dir) / CLUSTER_FILE
    if not path.exists():
        raise StageDependencyMissing(f"missing {path}; run expand first")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    if list(frame.columns) != CLUSTER_COLUMNS:
        raise MalformedRow(1, f"{path}: expected header {','.join(CLUSTER_COLUMNS)}")
    members = []
    for index, row in enumerate(frame.itertuples(index=False)):
        line = index + 2
        if not any(isinstance(v, str) and v.strip() for v in row):
            raise MalformedRow(line, f"{path}: blank line")
        try:
            members.append(ClusterMember(address=row.address, provenance=row.provenance, discovery_round=row.round))
        except ValidationError as e:
            raise MalformedRow(line, f"{path}: {e.errors()[0]['msg']}") from None
    rounds = max((m.discovery_round for m in members), default=0)
    try:
        return ClusterSet.from_members(campaign, members, rounds)
    except ValidationError as e:
        raise MalformedRow(0, f"{path}: {e.errors()[0]['msg']}") from None


def _payment_row(p) -> list:
    return [
        p.tx_hash,
        p.address,
        p.gmt_date.isoformat(),
        p.gmt_time.strftime("%H:%M:%S") if p.gmt_time else "",
        p.amount,
        int(p.address_was_input),
    ]


def write_classification(result: ClassificationResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write the exact result (classification.json) and its three CSV views.

    The JSON is what the report stage reads; the CSVs are for people.
    """
    out = Path(out_dir)
    exact = out / CLASSIFICATION_FILE
    exact.write_text(result.model_dump_json(indent=2) + "\n", encoding="utf-8")

    classified = [
        [
            c.payment.tx_hash,
            c.payment.address,
            c.payment.gmt_date.isoformat(),
            c.payment.amount,
            c.rule_label,
            c.matched_branch.value,
            format_usd(c.usd_value_avg),
        ]
        for c in result.ransoms
    ]
    return {
        CLASSIFICATION_FILE: exact,
        CLASSIFIED_FILE: write_csv(classified, CLASSIFIED_COLUMNS, out / CLASSIFIED_FILE),
        NON_RANSOM_FILE: write_csv(
            [_payment_row(p) for p in result.non_ransoms], PAYMENT_COLUMNS, out / NON_RANSOM_FILE
        ),
        UNCLASSIFIABLE_FILE: write_csv(
            [_payment_row(u.payment) + [u.reason.value] for u in result.unclassifiable],
            PAYMENT_COLUMNS + ["reason"],
            out / UNCLASSIFIABLE_FILE,
        ),
    }


def read_classification(out_dir: Union[str, Path]) -> ClassificationResult:
    path = Path(out_dir) / CLASSIFICATION_FILE
    if not path.exists():
        raise StageDependencyMissing(f"missing {path}; run classify first")
    try:
        return ClassificationResult.model_validate_json(path.read_bytes())
    except ValidationError as e:
        raise MalformedRow(0, f"{path}: {e.errors()[0]['msg']}") from None

"""Stage ordering for the expand → ingest → classify → report pipeline."""
import hashlib
import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field
from transitions import Machine, MachineError

from src import __version__
from .errors import StageDependencyMissing


logger = logging.getLogger(__name__)

CLUSTER_FILE = "cluster.csv"
CLASSIFICATION_FILE = "classification.json"
SUMMARY_FILE = "summary.csv"
MANIFEST_FILE = "manifest.json"


def file_digest(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


class RunManifest(BaseModel):
    """Provenance record written at the end of every subcommand."""
    campaign: str
    stage: str
    provider: Optional[Dict[str, Any]] = None
    store: Optional[str] = None
    prices: Optional[str] = None
    started_at: datetime
    finished_at: Optional[datetime] = None
    tool_version: str = __version__
    config_hash: str
    outputs: Dict[str, str] = Field(default_factory=dict)  # file name -> sha256


def write_manifest(manifest: RunManifest, out_dir: Union[str, Path]) -> Path:
    """Write manifest.json atomically (temp file in the same directory, then rename)."""
    out = Path(out_dir)
    target = out / MANIFEST_FILE
    fd, tmp = tempfile.mkstemp(dir=out, prefix=".manifest-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(manifest.model_dump_json(indent=2))
            fh.write("\n")
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


class PipelineOrchestrator:
    """
    Tracks which stages have produced their artifacts and refuses out-of-order runs.

    The starting state is inferred from what exists on disk, so each CLI
    invocation picks up where the previous one stopped. Re-running a stage
    that already ran is allowed.
    """

    states = ["INIT", "EXPANDED", "INGESTED", "CLASSIFIED", "REPORTED"]

    def __init__(self, out_dir: Union[str, Path], store_path: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.store_path = Path(store_path)

        self.transitions = [
            {"trigger": "expand", "source": "*", "dest": "EXPANDED", "after": "_log_transition"},
            {"trigger": "ingest", "source": ["EXPANDED", "INGESTED", "CLASSIFIED", "REPORTED"],
             "dest": "INGESTED", "after": "_log_transition"},
            {"trigger": "classify", "source": ["INGESTED", "CLASSIFIED", "REPORTED"],
             "dest": "CLASSIFIED", "after": "_log_transition"},
            {"trigger": "report", "source": ["CLASSIFIED", "REPORTED"],
             "dest": "REPORTED", "after": "_log_transition"},
        ]

        self.machine = Machine(
            model=self,
            states=PipelineOrchestrator.states,
            initial=self._infer_state(),
            transitions=self.transitions,
            auto_transitions=False,
            send_event=True,
        )

    def _requirements(self) -> Dict[str, List[Path]]:
        """Files each stage needs before it can run."""
        cluster = self.out_dir / CLUSTER_FILE
        return {
            "expand": [],
            "ingest": [cluster],
            "classify": [cluster, self.store_path],
            "report": [self.out_dir / CLASSIFICATION_FILE],
        }

    def _infer_state(self) -> str:
        state = "INIT"
        if (self.out_dir / CLUSTER_FILE).exists():
            state = "EXPANDED"
            if self.store_path.exists():
                state = "INGESTED"
                if (self.out_dir / CLASSIFICATION_FILE).exists():
                    state = "CLASSIFIED"
                    if (self.out_dir / SUMMARY_FILE).exists():
                        state = "REPORTED"
        return state

    def _log_transition(self, event):
        logger.info(f"Pipeline: {event.transition.source} → {event.transition.dest} (trigger: {event.event.name})")

    def missing_for(self, stage: str) -> List[Path]:
        return [p for p in self._requirements()[stage] if not p.exists()]

    def advance(self, stage: str) -> None:
        """
        Move to the state produced by `stage`.

        Raises:
            StageDependencyMissing: naming the files the stage needs but cannot find
        """
        missing = self.missing_for(stage)
        if missing:
            names = ", ".join(str(p) for p in missing)
            raise StageDependencyMissing(f"{stage} needs {names}; run the earlier stage first")
        try:
            getattr(self, stage)()
        except MachineError as e:
            raise StageDependencyMissing(f"{stage} cannot run from state {self.state}: {e.value}") from None

    def start_manifest(self, campaign: str, config_hash: str, **fields) -> RunManifest:
        return RunManifest(
            campaign=campaign,
            stage=self.state,
            started_at=datetime.now(timezone.utc),
            config_hash=config_hash,
            **fields,
        )

    def finish(self, manifest: RunManifest, outputs: Optional[Dict[str, Path]] = None) -> Path:
        """Stamp the manifest with output digests and write it."""
        digests = {name: file_digest(path) for name, path in sorted((outputs or {}).items())}
        final = manifest.model_copy(update={
            "stage": self.state,
            "finished_at": datetime.now(timezone.utc),
            "outputs": digests,
        })
        path = write_manifest(final, self.out_dir)
        logger.info(f"Wrote {path} ({len(digests)} outputs)")
        return path

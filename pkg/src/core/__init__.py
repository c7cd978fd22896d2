"""Core package: domain model, errors, logging, stage orchestration, worker pool."""
from .orchestrator import PipelineOrchestrator, RunManifest, write_manifest
from .worker_manager import WorkerManager

__all__ = ["PipelineOrchestrator", "RunManifest", "write_manifest", "WorkerManager"]

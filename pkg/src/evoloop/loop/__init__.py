"""Evolution driver: sample -> score -> select -> build -> train -> evaluate."""

from .driver import IterationReport, PipelineState, RunManifest, run_evolution, run_iteration
from .evaluation import evaluate

__all__ = [
    "IterationReport",
    "PipelineState",
    "RunManifest",
    "evaluate",
    "run_evolution",
    "run_iteration",
]

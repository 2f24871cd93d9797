"""
Manages the state of one Monte Carlo trial while its stages execute.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


@dataclass
class TrialState:
    """Data class to hold a trial's intermediate objects and stage outcomes."""
    cell: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    cloud: Any = None                                            # PointCloud once 'sample' ran
    graph: Any = None                                            # GeometricGraph once 'graph' ran
    record: Any = None                                           # EliminationRecord once 'dismantle' ran
    outputs: Dict[str, Dict[str, Any]] = field(default_factory=dict)   # stage -> summarised values
    stage_sequence: List[str] = field(default_factory=list)      # stages executed, in order
    failed_stages: Dict[str, str] = field(default_factory=dict)  # stage -> error message
    skipped_stages: List[str] = field(default_factory=list)
    runtimes_ms: Dict[str, float] = field(default_factory=dict)
    last_error: Optional[str] = None

    def update_from_stage_result(self, stage: str, result: Dict[str, Any]) -> None:
        """Updates the state based on the output of a stage."""
        logger.debug(f"Updating trial state from {stage} result.")
        if not isinstance(result, dict):
            logger.warning(f"Stage {stage} result is not a dict: {result}")
            self.last_error = f"Stage {stage} returned non-dict result."
            self.failed_stages[stage] = self.last_error
            return

        metadata = result.get("metadata", {})
        if stage not in self.stage_sequence:
            self.stage_sequence.append(stage)
        if "elapsed_ms" in metadata:
            self.runtimes_ms[stage] = float(metadata["elapsed_ms"])

        if metadata.get("skipped"):
            if stage not in self.skipped_stages:
                self.skipped_stages.append(stage)
            return

        if metadata.get("error") or metadata.get("success") is False:
            self.last_error = metadata.get("error", f"Stage {stage} failed")
            self.failed_stages[stage] = self.last_error
            logger.warning(f"Error captured from stage {stage}: {self.last_error}")
            return

        if "cloud" in result:
            self.cloud = result["cloud"]
        if "graph" in result:
            self.graph = result["graph"]
        if "record" in result:
            self.record = result["record"]
        self.outputs[stage] = dict(result.get("values", {}))

    def succeeded(self, stage: str) -> bool:
        return stage in self.outputs and stage not in self.failed_stages

    def validate_state(self) -> Tuple[bool, List[str]]:
        """Validates the current state fields."""
        errors = []
        if "graph" in self.outputs and self.cloud is None:
            errors.append("graph stage recorded without a point cloud")
        if self.cloud is not None and self.graph is not None and self.cloud.n != self.graph.n:
            errors.append(f"cloud has {self.cloud.n} points but graph has {self.graph.n} vertices")
        overlap = set(self.failed_stages).intersection(self.skipped_stages)
        if overlap:
            errors.append(f"Stages both failed and skipped: {sorted(overlap)}")
        for stage, ms in self.runtimes_ms.items():
            if ms < 0:
                errors.append(f"Negative runtime for stage {stage}: {ms}")
        return len(errors) == 0, errors

    def snapshot(self) -> Dict[str, Any]:
        """Small JSON-friendly view for the event log."""
        return {
            "cell": self.cell,
            "seed": self.seed,
            "stages": list(self.stage_sequence),
            "failed": sorted(self.failed_stages),
            "skipped": list(self.skipped_stages),
        }

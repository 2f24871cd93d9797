"""
Orchestrates the stages of one trial in dependency order, isolating failures.
"""

import logging
import time
import traceback
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .lab_config import CHECK_ORDER, REQUIRED_STAGES, STAGE_DEPENDENCIES
from .logger import LabLogger
from .state_manager import TrialState

logger = logging.getLogger(__name__)

StageFunction = Callable[[TrialState], Dict[str, Any]]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class TrialOrchestrator:
    """Runs sample -> graph -> requested checks against one TrialState."""

    def __init__(self, stages: Dict[str, StageFunction], state: TrialState,
                 checks: Sequence[str] = (), event_logger: Optional[LabLogger] = None):
        if not isinstance(stages, dict):
            raise TypeError("Stages must be provided as a dictionary.")
        if not isinstance(state, TrialState):
            raise TypeError("State must be an instance of TrialState.")
        unknown = [c for c in checks if c not in CHECK_ORDER]
        if unknown:
            raise ValueError(f"Unknown checks: {unknown}")

        self.stages = stages
        self.state = state
        self.event_logger = event_logger
        self.required_sequence: List[str] = list(REQUIRED_STAGES) + [c for c in CHECK_ORDER if c in checks]
        logger.debug(f"Orchestrator initialized with stages: {self.required_sequence}")

    def _get_expected_next_stage(self) -> Optional[str]:
        done = len(self.state.stage_sequence)
        if done >= len(self.required_sequence):
            return None
        return self.required_sequence[done]

    def get_next_required_stage(self) -> Optional[str]:
        return self._get_expected_next_stage()

    def validate_stage_call(self, stage: str) -> Tuple[bool, Optional[str]]:
        """Checks the stage exists, is next in sequence and has its inputs."""
        if stage not in self.stages:
            return False, f"Stage '{stage}' not found."
        expected = self._get_expected_next_stage()
        if expected is not None and stage != expected:
            return False, f"Stage '{stage}' called out of sequence. Expected '{expected}'."
        for dependency in STAGE_DEPENDENCIES.get(stage, []):
            if not self.state.succeeded(dependency):
                return False, f"Stage '{stage}' needs '{dependency}', which did not succeed."
        return True, None

    def _error_result(self, stage: str, message: str, skipped: bool = False,
                      trace: Optional[str] = None) -> Dict[str, Any]:
        metadata = {
            "stage": stage,
            "error": message,
            "timestamp": _now(),
            "success": False,
        }
        if skipped:
            metadata["skipped"] = True
        if trace:
            metadata["traceback"] = trace
        return {"values": {}, "metadata": metadata}

    def execute_stage(self, stage: str) -> Dict[str, Any]:
        """Executes one stage after validation; exceptions become error results."""
        is_valid, error_msg = self.validate_stage_call(stage)
        if not is_valid:
            # a stage whose inputs failed is recorded as skipped, anything else as a failure
            skipped = error_msg is not None and "did not succeed" in error_msg
            result = self._error_result(stage, error_msg, skipped=skipped)
            if skipped:
                logger.info(f"Skipping stage '{stage}': {error_msg}")
                self.state.update_from_stage_result(stage, result)
            return result

        if self.event_logger:
            self.event_logger.log_stage_call(stage, self.state.snapshot())
        started = time.perf_counter()
        try:
            result = self.stages[stage](self.state)
            result.setdefault("metadata", {})
            result["metadata"].update({"stage": stage, "success": True})
        except Exception as e:
            logger.error(f"Stage '{stage}' failed: {e}")
            result = self._error_result(stage, f"{type(e).__name__}: {e}", trace=traceback.format_exc())
        result["metadata"]["elapsed_ms"] = (time.perf_counter() - started) * 1000.0

        self.state.update_from_stage_result(stage, result)
        if self.event_logger:
            self.event_logger.log_stage_result(stage, {
                "metadata": {k: v for k, v in result["metadata"].items() if k != "traceback"},
                "values": result.get("values", {}),
            })
        return result

    def run_all(self) -> Dict[str, Dict[str, Any]]:
        """Runs the whole sequence; a failed stage never stops the others."""
        results = {}
        while True:
            stage = self._get_expected_next_stage()
            if stage is None:
                break
            if stage not in self.stages:
                results[stage] = self._error_result(stage, f"Stage '{stage}' not found.")
                self.state.update_from_stage_result(stage, results[stage])
                continue
            results[stage] = self.execute_stage(stage)
        return results

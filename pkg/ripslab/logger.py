"""
Structured logging for sweeps and trials.
"""

import json
import logging
import uuid
from datetime import datetime, timezone
from typing import Any, Dict, Optional

# Handlers are configured by the entry point (ripslab.cli); this module only emits.
logger = logging.getLogger(__name__)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class LabLogger:
    """Emits one JSON object per sweep/trial/stage event."""

    def __init__(self, run_label: str, run_id: Optional[str] = None):
        self.run_label = run_label
        self.run_id = run_id or str(uuid.uuid4())
        logger.debug(f"Initialized LabLogger for {run_label}, run {self.run_id}")

    def _emit(self, level: int, event_type: str, payload: Dict[str, Any]) -> Dict[str, Any]:
        log_entry = {
            "timestamp": _now(),
            "level": logging.getLevelName(level),
            "event_type": event_type,
            "run_label": self.run_label,
            "run_id": self.run_id,
        }
        log_entry.update(payload)
        logger.log(level, json.dumps(log_entry, default=str, sort_keys=True))
        return log_entry

    def start_sweep(self, config_snapshot: Dict[str, Any], cells: int, trials: int) -> Dict[str, Any]:
        """Log the start of a sweep; a new run id is drawn for it."""
        self.run_id = str(uuid.uuid4())
        return self._emit(logging.INFO, "sweep_start", {
            "config": config_snapshot,
            "cells": cells,
            "trials_per_cell": trials,
        })

    def start_trial(self, cell: Dict[str, Any], trial_index: int, seed: int) -> Dict[str, Any]:
        return self._emit(logging.DEBUG, "trial_start", {
            "cell": cell,
            "trial_index": trial_index,
            "seed": seed,
        })

    def log_stage_call(self, stage: str, state_snapshot: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Log the start of a trial stage."""
        return self._emit(logging.DEBUG, "stage_start", {
            "stage": stage,
            "state_snapshot_before": state_snapshot or {},
        })

    def log_stage_result(self, stage: str, outcome: Dict[str, Any]) -> Dict[str, Any]:
        """Log the outcome of a stage; failures are logged at ERROR."""
        success = outcome.get("metadata", {}).get("success", True)
        level = logging.DEBUG if success else logging.ERROR
        return self._emit(level, "stage_end", {"stage": stage, "outcome": outcome})

    def end_trial(self, summary: Dict[str, Any]) -> Dict[str, Any]:
        level = logging.WARNING if summary.get("error") else logging.DEBUG
        return self._emit(level, "trial_end", {"summary": summary})

    def end_sweep(self, completed: int, failed: int, elapsed_ms: float) -> Dict[str, Any]:
        return self._emit(logging.INFO, "sweep_end", {
            "completed": completed,
            "failed": failed,
            "elapsed_ms": round(elapsed_ms, 3),
        })

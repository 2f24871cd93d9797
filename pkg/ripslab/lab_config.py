"""
Static configuration for the Rips laboratory: built-in defaults, stage
order and the result-table layout.
"""

from typing import Any, Dict, List

# Mirrors config/lab.json; used when that file is not shipped alongside the package.
DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "geometry": {
        "probes": 4096,
    },
    "domains": {
        "min_acceptance": 1e-4,
        "coverage_pitch_fraction": 0.1,
        "sample_batch": 4096,
    },
    "complex": {
        "simplex_budget": 10_000_000,
    },
    "cover": {
        "epsilon": 0.05,
        "epsilon_floor": 2.0 ** -20,
        "probe_budget": 2_000_000,
        "packing_pitch_fraction": 0.1,
        "packing_extra_samples": 256,
        "scan_pitch_fraction": 0.1,
        "face_budget": 1_000_000,
    },
    "lab": {
        "checks": ["dismantle", "betti", "coverage"],
        "trials": 20,
        "base_seed": 20240101,
        "bootstrap_resamples": 200,
        "workers": 1,
        "reduce_homology": True,
    },
}

# Stage order inside one trial; 'sample' and 'graph' always run first.
REQUIRED_STAGES: List[str] = ["sample", "graph"]
CHECK_ORDER: List[str] = ["dismantle", "betti", "coverage", "nerve", "pursuit"]

# Stages a check needs before it can run.
STAGE_DEPENDENCIES: Dict[str, List[str]] = {
    "sample": [],
    "graph": ["sample"],
    "dismantle": ["graph"],
    "betti": ["graph"],
    "coverage": ["sample"],
    "nerve": ["graph"],
    "pursuit": ["dismantle"],
}

CSV_COLUMNS: List[str] = [
    "n", "c", "d", "domain", "seed", "dismantlable", "covered",
    "b0", "b1", "b2", "truncated", "nerve_a", "nerve_b", "nerve_c", "ms_total",
]


def get_default_config() -> Dict[str, Dict[str, Any]]:
    """Get a copy of the built-in defaults"""
    return {section: dict(values) for section, values in DEFAULT_CONFIG.items()}

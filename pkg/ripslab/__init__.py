"""
Laboratory for random Vietoris-Rips complexes.

Modules:
- geometry: W(x, y, r) membership and witness-ball constructions
- domains: sampling domains, densities, coverage and packings
- proximity: radius graphs on point clouds
- complex: clique complexes and GF(2) Betti numbers
- dismantle: dominated-vertex deletion, cop-win decision, pursuit game
- covernerve: inflated ball covers and the nerve-condition verifier
- lab: Monte Carlo sweeps and threshold estimation
"""

from .complex import BettiProfile, betti, betti_of_graph, enumerate_complex, is_point_like
from .covernerve import Cover, NerveReport, build_cover, build_cover_adaptive, verify_nerve
from .dismantle import EliminationRecord, certify_contractible, dismantle, is_copwin, pursue
from .domains import PointCloud, check_coverage, make_density, make_domain, sample
from .errors import LabError
from .lab import SweepConfig, TrialResult, estimate_threshold, run_sweep, run_trial
from .logger import LabLogger
from .proximity import GeometricGraph, Graph, build_graph

__version__ = "0.1.0"

__all__ = [
    'BettiProfile',
    'betti',
    'betti_of_graph',
    'enumerate_complex',
    'is_point_like',
    'Cover',
    'NerveReport',
    'build_cover',
    'build_cover_adaptive',
    'verify_nerve',
    'EliminationRecord',
    'certify_contractible',
    'dismantle',
    'is_copwin',
    'pursue',
    'PointCloud',
    'check_coverage',
    'make_density',
    'make_domain',
    'sample',
    'LabError',
    'SweepConfig',
    'TrialResult',
    'estimate_threshold',
    'run_sweep',
    'run_trial',
    'LabLogger',
    'GeometricGraph',
    'Graph',
    'build_graph',
]

"""
Monte Carlo sweeps over (d, n, c), threshold estimation and result emission.

Radii are parameterised as r = c * (ln n / n)^(1/d). Every trial derives its
own seed from (base seed, cell index, trial index), so a recorded seed
reproduces the trial exactly whatever the worker count or completion order.
"""

import json
import logging
import math
import time
import traceback
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from scipy.optimize import OptimizeWarning, curve_fit
from tqdm import tqdm

from .complex import betti_of_graph, is_point_like
from .config import get_setting
from .covernerve import build_cover_adaptive, verify_nerve
from .dismantle import dismantle, pursue, robber_strategy
from .domains import DOMAIN_KINDS, Domain, DensitySpec, check_coverage, make_density, make_domain, sample
from .errors import ConfigError, GeometryError, LabIOError, PursuitError, ThresholdError
from .lab_config import CHECK_ORDER, CSV_COLUMNS
from .logger import LabLogger
from .orchestrator import TrialOrchestrator
from .proximity import build_graph
from .state_manager import TrialState

logger = logging.getLogger(__name__)


def radius_for(c: float, n: int, d: int) -> float:
    """r = c * (ln n / n)^(1/d)."""
    return c * (math.log(n) / n) ** (1.0 / d)


def trial_seed(base_seed: int, cell_index: int, trial_index: int) -> int:
    return int(np.random.SeedSequence([base_seed, cell_index, trial_index]).generate_state(1)[0])


class DomainSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = "box"
    params: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, v: str) -> str:
        if v not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind '{v}'; expected one of {DOMAIN_KINDS}")
        return v

    @property
    def fixed_dim(self) -> Optional[int]:
        if self.kind == "polytope" and self.params.get("A"):
            return len(self.params["A"][0])
        return None

    def build(self, dim: int) -> Domain:
        return make_domain(self.kind, dim, **self.params)


class DensityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = "uniform"
    ratio: float = Field(default=2.0, ge=1.0)
    axis: int = Field(default=0, ge=0)

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, v: str) -> str:
        if v not in ("uniform", "bounded-ratio"):
            raise ValueError(f"unknown density kind '{v}'")
        return v

    def build(self, domain: Domain) -> DensitySpec:
        return make_density(self.kind, domain, self.ratio, self.axis)


@dataclass(frozen=True)
class Cell:
    index: int
    n: int
    c: float
    d: int
    domain: str

    @property
    def r(self) -> float:
        return radius_for(self.c, self.n, self.d)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "c": self.c, "d": self.d, "domain": self.domain}


class SweepConfig(BaseModel):
    """Validated sweep parameters."""
    model_config = ConfigDict(extra="forbid")

    domain: DomainSpec = Field(default_factory=DomainSpec)
    density: DensityConfig = Field(default_factory=DensityConfig)
    dims: List[int] = Field(default_factory=lambda: [2])
    n_values: List[int] = Field(default_factory=lambda: [500])
    c_values: List[float] = Field(default_factory=lambda: [2.0])
    trials: int = Field(default_factory=lambda: int(get_setting("lab", "trials")))
    base_seed: int = Field(default_factory=lambda: int(get_setting("lab", "base_seed")))
    dim_cap: Optional[int] = None
    checks: List[str] = Field(default_factory=lambda: list(get_setting("lab", "checks")))
    allow_large_radius: bool = False
    epsilon: float = Field(default_factory=lambda: float(get_setting("cover", "epsilon")))
    simplex_budget: int = Field(default_factory=lambda: int(get_setting("complex", "simplex_budget")))
    reduce_homology: bool = Field(default_factory=lambda: bool(get_setting("lab", "reduce_homology")))
    coverage_pitch_fraction: float = Field(
        default_factory=lambda: float(get_setting("domains", "coverage_pitch_fraction")))
    robber: str = "greedy"
    workers: int = Field(default_factory=lambda: int(get_setting("lab", "workers")))
    stream_path: Optional[str] = None

    @field_validator("trials")
    @classmethod
    def _trials(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"trials must be >= 1, got {v}")
        return v

    @field_validator("c_values")
    @classmethod
    def _c_positive(cls, v: List[float]) -> List[float]:
        if not v or any(not c > 0 for c in v):
            raise ValueError(f"every c must be > 0, got {v}")
        return v

    @field_validator("n_values")
    @classmethod
    def _n_values(cls, v: List[int]) -> List[int]:
        if not v or any(n < 2 for n in v):
            raise ValueError(f"every n must be >= 2, got {v}")
        return v

    @field_validator("dims")
    @classmethod
    def _dims(cls, v: List[int]) -> List[int]:
        if not v or any(d < 1 for d in v):
            raise ValueError(f"every dimension must be >= 1, got {v}")
        return v

    @field_validator("checks")
    @classmethod
    def _checks(cls, v: List[str]) -> List[str]:
        unknown = [c for c in v if c not in CHECK_ORDER]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; expected a subset of {CHECK_ORDER}")
        return [c for c in CHECK_ORDER if c in v]

    @field_validator("robber")
    @classmethod
    def _robber(cls, v: str) -> str:
        try:
            return robber_strategy(v)
        except PursuitError as e:
            raise ValueError(f"robber: {e}")

    @model_validator(mode="after")
    def _consistent(self) -> "SweepConfig":
        if "pursuit" in self.checks and "dismantle" not in self.checks:
            raise ValueError("the pursuit check needs the dismantle check")
        fixed = self.domain.fixed_dim
        if fixed is not None and any(d != fixed for d in self.dims):
            raise ValueError(f"polytope domain is {fixed}-dimensional but dims = {self.dims}")
        if not self.allow_large_radius:
            for d in self.dims:
                try:
                    diameter = self.domain.build(d).diameter
                except GeometryError as e:
                    raise ValueError(f"invalid domain for d={d}: {e}")
                for n in self.n_values:
                    for c in self.c_values:
                        r = radius_for(c, n, d)
                        if r >= diameter:
                            raise ValueError(
                                f"r = {r:.4g} for (n={n}, c={c}, d={d}) reaches diam(K) = {diameter:.4g}; "
                                f"set allow_large_radius to permit it")
        return self

    def dim_cap_for(self, d: int) -> int:
        return self.dim_cap if self.dim_cap is not None else d + 1

    def cells(self) -> List[Cell]:
        out = []
        for d in self.dims:
            for n in self.n_values:
                for c in self.c_values:
                    out.append(Cell(index=len(out), n=n, c=c, d=d, domain=self.domain.kind))
        return out


def load_sweep_config(values: Dict[str, Any]) -> SweepConfig:
    """Build a SweepConfig, turning validation failures into ConfigError."""
    try:
        return SweepConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid sweep configuration: {e}")


@dataclass
class TrialResult:
    cell: Dict[str, Any]
    cell_index: int
    trial_index: int
    seed: int
    r: float
    dismantlable: Optional[bool] = None
    betti: Optional[Dict[str, Any]] = None
    point_like: Optional[bool] = None
    covered: Optional[bool] = None
    nerve: Optional[Dict[str, Any]] = None
    pursuit: Optional[Dict[str, Any]] = None
    errors: Dict[str, str] = field(default_factory=dict)
    skipped: List[str] = field(default_factory=list)
    runtimes_ms: Dict[str, float] = field(default_factory=dict)

    @property
    def ms_total(self) -> float:
        return round(sum(self.runtimes_ms.values()), 3)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrialResult":
        return cls(**data)

    def fingerprint(self) -> str:
        """Every recorded field except wall-clock runtimes, as canonical JSON."""
        data = self.to_dict()
        data.pop("runtimes_ms")
        return json.dumps(data, sort_keys=True, default=str)

    def to_row(self) -> Dict[str, Any]:
        values = []
        truncated = None
        if self.betti is not None:
            values = [self.betti["betti"][k] for k in sorted(self.betti["betti"], key=int)]
            if self.betti.get("top_betti") is not None:
                values.append(self.betti["top_betti"])
            truncated = self.betti["truncated"]
        nerve = self.nerve or {}
        return {
            "n": self.cell["n"], "c": self.cell["c"], "d": self.cell["d"], "domain": self.cell["domain"],
            "seed": self.seed, "dismantlable": self.dismantlable, "covered": self.covered,
            "b0": values[0] if len(values) > 0 else None,
            "b1": values[1] if len(values) > 1 else None,
            "b2": values[2] if len(values) > 2 else None,
            "truncated": truncated,
            "nerve_a": nerve.get("condition_a"), "nerve_b": nerve.get("condition_b"),
            "nerve_c": nerve.get("condition_c"),
            "ms_total": self.ms_total,
        }


# Trial stages. Each takes the trial state and returns {"values": ..., plus objects for later stages}.

def _stage_sample(state: TrialState, domain: Domain, density: DensitySpec, n: int) -> Dict[str, Any]:
    cloud = sample(domain, density, n, state.seed)
    return {"cloud": cloud, "values": {"n": cloud.n}}


def _stage_graph(state: TrialState, r: float) -> Dict[str, Any]:
    graph = build_graph(state.cloud, r)
    return {"graph": graph, "values": {"edges": graph.edge_count()}}


def _stage_dismantle(state: TrialState) -> Dict[str, Any]:
    record = dismantle(state.graph)
    return {"record": record, "values": {"dismantlable": record.complete,
                                         "residual": len(record.residual)}}


def _stage_betti(state: TrialState, dim_cap: int, budget: int, reduce: bool) -> Dict[str, Any]:
    profile = betti_of_graph(state.graph, dim_cap, budget, reduce)
    return {"values": {"profile": profile.to_dict(), "point_like": is_point_like(profile)}}


def _stage_coverage(state: TrialState, domain: Domain, r: float, pitch_fraction: float) -> Dict[str, Any]:
    result = check_coverage(state.cloud, domain, r, r * pitch_fraction)
    return {"values": {"covered": result.covered}}


def cover_settings() -> Dict[str, Any]:
    """Cover construction knobs from the 'cover' config section."""
    settings = {key: get_setting("cover", key) for key in (
        "probe_budget", "packing_pitch_fraction", "packing_extra_samples",
        "scan_pitch_fraction", "face_budget")}
    settings["floor"] = get_setting("cover", "epsilon_floor")
    return settings


def _stage_nerve(state: TrialState, domain: Domain, r: float, epsilon: float) -> Dict[str, Any]:
    if r >= domain.diameter:
        return {"values": {"condition_a": True, "condition_b": True, "condition_c": True, "epsilon": None}}
    settings = cover_settings()
    cover = build_cover_adaptive(domain, r, epsilon, seed=state.seed, **settings)
    report = verify_nerve(state.cloud, state.graph, cover, settings["scan_pitch_fraction"])
    return {"values": {"condition_a": report.condition_a, "condition_b": report.condition_b,
                       "condition_c": report.condition_c, "epsilon": cover.epsilon}}


def _stage_pursuit(state: TrialState, robber: str) -> Dict[str, Any]:
    if not state.record.complete:
        return {"values": {"captured": None, "turns": None}}
    transcript = pursue(state.graph, state.record, robber, seed=state.seed)
    return {"values": {"captured": transcript.captured, "turns": transcript.turns}}


def build_stages(cell: Cell, config: SweepConfig) -> Dict[str, Any]:
    domain = config.domain.build(cell.d)
    density = config.density.build(domain)
    r = cell.r
    return {
        "sample": partial(_stage_sample, domain=domain, density=density, n=cell.n),
        "graph": partial(_stage_graph, r=r),
        "dismantle": _stage_dismantle,
        "betti": partial(_stage_betti, dim_cap=config.dim_cap_for(cell.d),
                         budget=config.simplex_budget, reduce=config.reduce_homology),
        "coverage": partial(_stage_coverage, domain=domain, r=r,
                            pitch_fraction=config.coverage_pitch_fraction),
        "nerve": partial(_stage_nerve, domain=domain, r=r, epsilon=config.epsilon),
        "pursuit": partial(_stage_pursuit, robber=config.robber),
    }


def run_trial(cell: Cell, trial_index: int, config: SweepConfig,
              event_logger: Optional[LabLogger] = None) -> TrialResult:
    """Run one trial; stage failures are recorded, never raised."""
    seed = trial_seed(config.base_seed, cell.index, trial_index)
    state = TrialState(cell=cell.to_dict(), seed=seed)
    if event_logger:
        event_logger.start_trial(cell.to_dict(), trial_index, seed)

    result = TrialResult(cell=cell.to_dict(), cell_index=cell.index, trial_index=trial_index,
                         seed=seed, r=cell.r)
    try:
        orchestrator = TrialOrchestrator(build_stages(cell, config), state, config.checks, event_logger)
        orchestrator.run_all()
    except Exception as e:
        logger.error(f"Trial {cell.index}/{trial_index} could not be set up: {e}")
        state.failed_stages["trial"] = f"{type(e).__name__}: {e}"
        state.runtimes_ms = {}

    is_valid, problems = state.validate_state()
    if not is_valid:
        logger.warning(f"Trial {cell.index}/{trial_index} left an inconsistent state: {problems}")
        state.failed_stages["state"] = "; ".join(problems)

    outputs = state.outputs
    if "dismantle" in outputs:
        result.dismantlable = outputs["dismantle"]["dismantlable"]
    if "betti" in outputs:
        result.betti = outputs["betti"]["profile"]
        result.point_like = outputs["betti"]["point_like"]
    if "coverage" in outputs:
        result.covered = outputs["coverage"]["covered"]
    if "nerve" in outputs:
        result.nerve = dict(outputs["nerve"])
    if "pursuit" in outputs:
        result.pursuit = dict(outputs["pursuit"])
    result.errors = dict(state.failed_stages)
    result.skipped = list(state.skipped_stages)
    result.runtimes_ms = {k: round(v, 3) for k, v in state.runtimes_ms.items()}

    if event_logger:
        event_logger.end_trial({"seed": seed, "error": bool(result.errors),
                                "failed": sorted(result.errors), "dismantlable": result.dismantlable})
    return result


def _run_task(cell: Cell, trial_index: int, config: SweepConfig) -> TrialResult:
    return run_trial(cell, trial_index, config)


def run_sweep(config: SweepConfig, progress: bool = False,
              event_logger: Optional[LabLogger] = None) -> List[TrialResult]:
    """Run every (cell, trial); results come back sorted by (cell index, trial index).

    With ``config.stream_path`` set, each finished trial is appended there as
    one JSON line in completion order.
    """
    cells = config.cells()
    tasks = [(cell, t) for cell in cells for t in range(config.trials)]
    if event_logger:
        event_logger.start_sweep(config.model_dump(), len(cells), config.trials)
    logger.info(f"Sweep: {len(cells)} cells x {config.trials} trials on {config.workers} worker(s)")
    started = time.perf_counter()

    stream = None
    if config.stream_path:
        try:
            Path(config.stream_path).parent.mkdir(parents=True, exist_ok=True)
            stream = open(config.stream_path, "a", encoding="utf-8")
        except OSError as e:
            raise LabIOError(f"Could not open result stream: {e}", config.stream_path)

    results: List[TrialResult] = []

    def collect(result: TrialResult) -> None:
        results.append(result)
        if stream is not None:
            stream.write(json.dumps(result.to_dict(), sort_keys=True) + "\n")
            stream.flush()

    bar = tqdm(total=len(tasks), desc="trials", disable=not progress)
    try:
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                futures = {pool.submit(_run_task, cell, t, config): (cell, t) for cell, t in tasks}
                for future in as_completed(futures):
                    cell, t = futures[future]
                    try:
                        collect(future.result())
                    except Exception as e:
                        logger.error(f"Worker failed on cell {cell.index} trial {t}: {e}")
                        collect(TrialResult(cell=cell.to_dict(), cell_index=cell.index, trial_index=t,
                                            seed=trial_seed(config.base_seed, cell.index, t), r=cell.r,
                                            errors={"worker": f"{type(e).__name__}: {e}"}))
                    bar.update(1)
        else:
            for cell, t in tasks:
                try:
                    collect(run_trial(cell, t, config, event_logger))
                except Exception as e:
                    logger.error(f"Trial {cell.index}/{t} failed outside its stages: {e}\n{traceback.format_exc()}")
                    collect(TrialResult(cell=cell.to_dict(), cell_index=cell.index, trial_index=t,
                                        seed=trial_seed(config.base_seed, cell.index, t), r=cell.r,
                                        errors={"trial": f"{type(e).__name__}: {e}"}))
                bar.update(1)
    finally:
        bar.close()
        if stream is not None:
            stream.close()

    results.sort(key=lambda res: (res.cell_index, res.trial_index))
    failed = sum(1 for res in results if res.errors)
    if event_logger:
        event_logger.end_sweep(len(results) - failed, failed, (time.perf_counter() - started) * 1000.0)
    return results


@dataclass
class ThresholdEstimate:
    domain: str
    d: int
    n: int
    c_hat: float
    ci: Tuple[float, float]
    slope: Optional[float]
    method: str
    observed: Dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["ci"] = list(self.ci)
        data["observed"] = {str(c): p for c, p in self.observed.items()}
        return data


def _logistic(c: np.ndarray, c0: float, k: float) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-k * (c - c0)))


def _interpolate(cs: np.ndarray, ps: np.ndarray, target: float) -> Optional[float]:
    for i in range(len(cs) - 1):
        if ps[i] < target <= ps[i + 1]:
            return float(cs[i] + (target - ps[i]) * (cs[i + 1] - cs[i]) / (ps[i + 1] - ps[i]))
    return None


def _fit_crossing(cs: np.ndarray, ps: np.ndarray, target: float) -> Tuple[Optional[float], Optional[float], str]:
    """Crossing point of a logistic fit in c, or of the piecewise-linear curve if the fit fails."""
    span = float(cs[-1] - cs[0]) or 1.0
    fallback = _interpolate(cs, ps, target)
    start = fallback if fallback is not None else float(np.median(cs))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            warnings.simplefilter("ignore", RuntimeWarning)
            (c0, k), _ = curve_fit(_logistic, cs, ps, p0=[start, 4.0 / span],
                                   bounds=([cs[0] - span, 1e-6], [cs[-1] + span, 1e6]), maxfev=5000)
        crossing = float(c0 + math.log(target / (1.0 - target)) / k)
        if cs[0] <= crossing <= cs[-1]:
            return crossing, float(k), "logistic"
    except (RuntimeError, ValueError):
        pass
    return fallback, None, "interpolation"


def estimate_threshold(results: Sequence[TrialResult], target_prob: float, resamples: int = 200,
                       seed: int = 0, key: str = "dismantlable") -> List[ThresholdEstimate]:
    """Per (domain, d, n): the c where the fitted P(key | c) crosses target_prob.

    The interval is the 2.5-97.5 percentile range of refits on bootstrap
    resamples of the trials within each c.
    """
    if not 0 < target_prob < 1:
        raise ValueError(f"target_prob must lie in (0, 1), got {target_prob}")
    rows = [{"domain": res.cell["domain"], "d": res.cell["d"], "n": res.cell["n"], "c": res.cell["c"],
             "value": float(getattr(res, key))}
            for res in results if getattr(res, key) is not None]
    if not rows:
        raise ThresholdError(f"no trial recorded '{key}'")
    df = pd.DataFrame(rows)
    rng = np.random.default_rng(seed)
    estimates = []
    for (domain, d, n), group in df.groupby(["domain", "d", "n"], sort=True):
        table = group.groupby("c")["value"].mean().sort_index()
        cs, ps = table.index.to_numpy(dtype=float), table.to_numpy(dtype=float)
        if not (ps.min() <= target_prob <= ps.max()) or ps.min() == ps.max():
            observed = {(domain, int(d), int(n)): (float(ps.min()), float(ps.max()))}
            raise ThresholdError(
                f"P({key}) over c for n={n}, d={d}, {domain} spans [{ps.min():.3f}, {ps.max():.3f}], "
                f"which does not bracket {target_prob}", observed)
        c_hat, slope, method = _fit_crossing(cs, ps, target_prob)
        if c_hat is None:
            raise ThresholdError(f"P({key}) never rises through {target_prob} for n={n}, d={d}")

        outcomes = [group.loc[group["c"] == c, "value"].to_numpy() for c in cs]
        boot = []
        for _ in range(resamples):
            ps_b = np.array([rng.choice(o, size=o.size, replace=True).mean() for o in outcomes])
            if not (ps_b.min() <= target_prob <= ps_b.max()) or ps_b.min() == ps_b.max():
                continue
            c_b, _, _ = _fit_crossing(cs, ps_b, target_prob)
            if c_b is not None:
                boot.append(c_b)
        ci = (float(np.percentile(boot, 2.5)), float(np.percentile(boot, 97.5))) if boot else (c_hat, c_hat)
        estimates.append(ThresholdEstimate(domain=str(domain), d=int(d), n=int(n), c_hat=c_hat, ci=ci,
                                           slope=slope, method=method,
                                           observed={float(c): float(p) for c, p in zip(cs, ps)}))
        logger.info(f"Threshold for {key} at n={n}, d={d}: c_hat={c_hat:.4g} ({method}), ci={ci}")
    return estimates


def summarize(results: Sequence[TrialResult]) -> pd.DataFrame:
    """Per-cell frequencies with binomial standard errors."""
    columns = ["domain", "d", "n", "c", "trials", "failed",
               "p_dismantlable", "se_dismantlable", "p_covered", "se_covered"]
    if not results:
        return pd.DataFrame(columns=columns)
    df = pd.DataFrame([{
        "domain": res.cell["domain"], "d": res.cell["d"], "n": res.cell["n"], "c": res.cell["c"],
        "dismantlable": res.dismantlable, "covered": res.covered, "failed": bool(res.errors),
    } for res in results])
    rows = []
    for (domain, d, n, c), group in df.groupby(["domain", "d", "n", "c"], sort=True):
        row = {"domain": domain, "d": int(d), "n": int(n), "c": float(c),
               "trials": int(len(group)), "failed": int(group["failed"].sum())}
        for name in ("dismantlable", "covered"):
            values = group[name].dropna().astype(float)
            if len(values):
                p = float(values.mean())
                row[f"p_{name}"] = p
                row[f"se_{name}"] = math.sqrt(p * (1.0 - p) / len(values))
            else:
                row[f"p_{name}"] = None
                row[f"se_{name}"] = None
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def emit(results: Sequence[TrialResult], fmt: str = "csv", path: Optional[str] = None) -> str:
    """Render results as CSV (fixed columns) or JSON; write them to ``path`` if given."""
    if fmt == "csv":
        frame = pd.DataFrame([res.to_row() for res in results], columns=CSV_COLUMNS)
        text = frame.to_csv(index=False, lineterminator="\n")
    elif fmt == "json":
        text = json.dumps([res.to_dict() for res in results], sort_keys=True, indent=2) + "\n"
    else:
        raise ConfigError(f"unknown output format '{fmt}'; expected 'csv' or 'json'")
    if path is not None:
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            raise LabIOError(f"Could not write results: {e}", str(path))
    return text


def load_results(path: str) -> List[TrialResult]:
    """Read results written by ``emit`` (JSON or CSV) or a JSON-lines stream."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise LabIOError(f"Could not read results: {e}", str(path))
    if path.endswith(".csv"):
        frame = pd.read_csv(path, keep_default_na=True)
        out = []
        for i, row in frame.iterrows():
            cell = {"n": int(row["n"]), "c": float(row["c"]), "d": int(row["d"]), "domain": str(row["domain"])}
            out.append(TrialResult(
                cell=cell, cell_index=-1, trial_index=int(i), seed=int(row["seed"]),
                r=radius_for(cell["c"], cell["n"], cell["d"]),
                dismantlable=None if pd.isna(row["dismantlable"]) else bool(row["dismantlable"]),
                covered=None if pd.isna(row["covered"]) else bool(row["covered"])))
        return out
    try:
        stripped = text.lstrip()
        if stripped.startswith("["):
            return [TrialResult.from_dict(item) for item in json.loads(text)]
        return [TrialResult.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
    except (json.JSONDecodeError, TypeError, KeyError) as e:
        raise LabIOError(f"Malformed results file: {e}", str(path))

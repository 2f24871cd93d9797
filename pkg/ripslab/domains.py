"""
Supports K, densities on K, i.i.d. sampling, and the coverage event.

Convex kinds: box, ball, convex polytope (halfspace list). Non-convex kinds
standing in for smooth manifolds with boundary: annulus (outer ball minus an
open inner ball) and box-minus-ball.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.spatial.distance import cdist, pdist

from .config import get_setting
from .errors import ConfigError, GeometryError, LabIOError, SamplingError
from .geometry import TOL, delta3

logger = logging.getLogger(__name__)

# Acceptance is judged only after this many draws.
_ACCEPTANCE_WINDOW = 100_000
# Distance blocks are kept below this many entries.
_BLOCK_ENTRIES = 2_000_000


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def axis_grid(lo: np.ndarray, hi: np.ndarray, step: float) -> np.ndarray:
    """Row-major lattice over the box [lo, hi] with pitch <= step, both ends included."""
    if not step > 0:
        raise GeometryError(f"grid step must be > 0, got {step}")
    axes = []
    for a, b in zip(lo, hi):
        count = max(2, int(math.ceil((b - a) / step - 1e-9)) + 1)
        axes.append(np.linspace(a, b, count))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


class Domain(ABC):
    """A compact region K ⊆ R^d with nonempty interior."""

    kind: str = "abstract"
    convex: bool = True

    def __init__(self, dim: int):
        if dim < 1:
            raise GeometryError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)

    @abstractmethod
    def contains(self, points: np.ndarray, tol: float = TOL) -> np.ndarray:
        """Boolean mask of the rows of ``points`` lying in K (closed)."""

    @abstractmethod
    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Positive inside K: a lower bound on the distance to the boundary.
        Negative outside."""

    @property
    @abstractmethod
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        ...

    @property
    @abstractmethod
    def volume(self) -> float:
        ...

    @abstractmethod
    def constraints(self) -> List[Callable[[np.ndarray], np.ndarray]]:
        """Smooth inequality constraints g(x) >= 0 describing K."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    @property
    def diameter(self) -> float:
        lo, hi = self.bounding_box
        return float(np.linalg.norm(hi - lo))

    @property
    def inradius(self) -> float:
        return self._inball[1]

    @property
    def incenter(self) -> np.ndarray:
        return self._inball[0].copy()

    @cached_property
    def _inball(self) -> Tuple[np.ndarray, float]:
        # Generic fallback: best lattice point by signed distance.
        lo, hi = self.bounding_box
        pts = axis_grid(lo, hi, float(np.max(hi - lo)) / 64.0)
        sd = self.signed_distance(pts)
        best = int(np.argmax(sd))
        return pts[best], float(sd[best])

    @property
    def tag(self) -> str:
        return self.kind

    @property
    def midplane_symmetric(self) -> bool:
        """True when K is symmetric about every bounding-box mid-hyperplane."""
        return False

    def project(self, points: np.ndarray) -> np.ndarray:
        """Nearest points of K (convex kinds only)."""
        raise GeometryError(f"{self.kind} domain is not convex; use rejection instead of projection")

    def grid(self, step: float) -> np.ndarray:
        """Lattice points of pitch <= step inside K, in row-major order."""
        lo, hi = self.bounding_box
        pts = axis_grid(lo, hi, step)
        return pts[self.contains(pts)]

    def _as_points(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise GeometryError(f"expected {self.dim}-dimensional points, got {pts.shape[1]}")
        return pts

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


class BoxDomain(Domain):
    kind = "box"

    def __init__(self, lo: Sequence[float], hi: Sequence[float]):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise GeometryError("box corners must be vectors of equal length")
        if not np.all(self.hi > self.lo):
            raise GeometryError(f"box needs hi > lo in every coordinate: {self.lo} / {self.hi}")
        super().__init__(self.lo.size)

    def contains(self, points, tol=TOL):
        pts = self._as_points(points)
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def signed_distance(self, points):
        pts = self._as_points(points)
        return np.minimum(pts - self.lo, self.hi - pts).min(axis=1)

    @property
    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    @property
    def volume(self):
        return float(np.prod(self.hi - self.lo))

    @cached_property
    def _inball(self):
        return (self.lo + self.hi) / 2.0, float(np.min(self.hi - self.lo) / 2.0)

    @property
    def midplane_symmetric(self):
        return True

    def project(self, points):
        return np.clip(self._as_points(points), self.lo, self.hi)

    def constraints(self):
        return [lambda x: x - self.lo, lambda x: self.hi - x]

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class BallDomain(Domain):
    kind = "ball"

    def __init__(self, center: Sequence[float], radius: float):
        self.center = np.asarray(center, dtype=float)
        if not radius > 0:
            raise GeometryError(f"ball radius must be > 0, got {radius}")
        self.radius = float(radius)
        super().__init__(self.center.size)

    def contains(self, points, tol=TOL):
        pts = self._as_points(points)
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius + tol

    def signed_distance(self, points):
        pts = self._as_points(points)
        return self.radius - np.linalg.norm(pts - self.center, axis=1)

    @property
    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def volume(self):
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    @cached_property
    def _inball(self):
        return self.center.copy(), self.radius

    @property
    def midplane_symmetric(self):
        return True

    def project(self, points):
        pts = self._as_points(points)
        offset = pts - self.center
        norms = np.linalg.norm(offset, axis=1)
        scale = np.where(norms > self.radius, self.radius / np.maximum(norms, 1e-300), 1.0)
        return self.center + offset * scale[:, None]

    def constraints(self):
        return [lambda x: np.atleast_1d(self.radius ** 2 - np.sum((x - self.center) ** 2))]

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


class PolytopeDomain(Domain):
    """Bounded intersection of halfspaces A x <= b."""
    kind = "polytope"

    def __init__(self, A: Sequence[Sequence[float]], b: Sequence[float]):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.asarray(b, dtype=float)
        if self.A.shape[0] != self.b.size:
            raise GeometryError(f"{self.A.shape[0]} halfspace normals but {self.b.size} offsets")
        norms = np.linalg.norm(self.A, axis=1)
        if np.any(norms == 0):
            raise GeometryError("halfspace normals must be nonzero")
        self._norms = norms
        super().__init__(self.A.shape[1])
        if self.inradius <= 0:
            raise GeometryError("polytope has empty interior")

    def contains(self, points, tol=TOL):
        pts = self._as_points(points)
        return np.all(pts @ self.A.T <= self.b + tol, axis=1)

    def signed_distance(self, points):
        pts = self._as_points(points)
        return ((self.b - pts @ self.A.T) / self._norms).min(axis=1)

    @cached_property
    def _inball(self):
        # Chebyshev centre: maximise t subject to a_i.x + t |a_i| <= b_i.
        d = self.dim
        cost = np.zeros(d + 1)
        cost[-1] = -1.0
        res = linprog(cost, A_ub=np.hstack([self.A, self._norms[:, None]]), b_ub=self.b,
                      bounds=[(None, None)] * d + [(0, None)], method="highs")
        if res.status != 0:
            raise GeometryError(f"polytope is unbounded or infeasible: {res.message}")
        return res.x[:d], float(res.x[-1])

    @cached_property
    def _box(self) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = np.empty(self.dim), np.empty(self.dim)
        for k in range(self.dim):
            cost = np.zeros(self.dim)
            for sign in (1.0, -1.0):
                cost[k] = sign
                res = linprog(cost, A_ub=self.A, b_ub=self.b, bounds=[(None, None)] * self.dim,
                              method="highs")
                if res.status != 0:
                    raise GeometryError(f"polytope is unbounded along axis {k}: {res.message}")
                if sign > 0:
                    lo[k] = res.x[k]
                else:
                    hi[k] = res.x[k]
        return lo, hi

    @cached_property
    def vertices(self) -> np.ndarray:
        if self.dim == 1:
            lo, hi = self._box
            return np.array([lo, hi])
        halfspaces = np.hstack([self.A, -self.b[:, None]])
        hs = HalfspaceIntersection(halfspaces, self.incenter)
        return hs.intersections

    @property
    def bounding_box(self):
        lo, hi = self._box
        return lo.copy(), hi.copy()

    @property
    def diameter(self):
        verts = self.vertices
        return float(pdist(verts).max()) if len(verts) > 1 else 0.0

    @property
    def volume(self):
        if self.dim == 1:
            lo, hi = self._box
            return float(hi[0] - lo[0])
        return float(ConvexHull(self.vertices).volume)

    def project(self, points, iterations: int = 200):
        # Dykstra's alternating projections onto the halfspaces.
        pts = self._as_points(points).copy()
        out = np.empty_like(pts)
        unit = self.A / self._norms[:, None]
        offsets = self.b / self._norms
        for row, p in enumerate(pts):
            x = p.copy()
            corrections = np.zeros((len(offsets), self.dim))
            for _ in range(iterations):
                previous = x.copy()
                for i in range(len(offsets)):
                    y = x + corrections[i]
                    excess = unit[i] @ y - offsets[i]
                    x_new = y - max(excess, 0.0) * unit[i]
                    corrections[i] = y - x_new
                    x = x_new
                if np.linalg.norm(x - previous) < 1e-14:
                    break
            out[row] = x
        return out

    def constraints(self):
        return [lambda x: self.b - self.A @ x]

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist()}


class AnnulusDomain(Domain):
    """Closed outer ball minus an open inner ball, sharing a centre."""
    kind = "annulus"
    convex = False

    def __init__(self, center: Sequence[float], inner: float, outer: float):
        self.center = np.asarray(center, dtype=float)
        if not 0 < inner < outer:
            raise GeometryError(f"annulus needs 0 < inner < outer, got {inner}, {outer}")
        self.inner = float(inner)
        self.outer = float(outer)
        super().__init__(self.center.size)

    def contains(self, points, tol=TOL):
        pts = self._as_points(points)
        rho = np.linalg.norm(pts - self.center, axis=1)
        return (rho >= self.inner - tol) & (rho <= self.outer + tol)

    def signed_distance(self, points):
        pts = self._as_points(points)
        rho = np.linalg.norm(pts - self.center, axis=1)
        return np.minimum(self.outer - rho, rho - self.inner)

    @property
    def bounding_box(self):
        return self.center - self.outer, self.center + self.outer

    @property
    def diameter(self):
        return 2.0 * self.outer

    @property
    def volume(self):
        return unit_ball_volume(self.dim) * (self.outer ** self.dim - self.inner ** self.dim)

    @cached_property
    def _inball(self):
        offset = np.zeros(self.dim)
        offset[0] = (self.inner + self.outer) / 2.0
        return self.center + offset, (self.outer - self.inner) / 2.0

    @property
    def midplane_symmetric(self):
        return True

    def constraints(self):
        return [
            lambda x: np.atleast_1d(self.outer ** 2 - np.sum((x - self.center) ** 2)),
            lambda x: np.atleast_1d(np.sum((x - self.center) ** 2) - self.inner ** 2),
        ]

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(),
                "inner": self.inner, "outer": self.outer}


class BoxMinusBallDomain(Domain):
    """Box with an open ball removed from its interior."""
    kind = "box-minus-ball"
    convex = False

    def __init__(self, lo: Sequence[float], hi: Sequence[float],
                 hole_center: Sequence[float], hole_radius: float):
        self.box = BoxDomain(lo, hi)
        self.hole_center = np.asarray(hole_center, dtype=float)
        self.hole_radius = float(hole_radius)
        if self.hole_center.shape != self.box.lo.shape:
            raise GeometryError("hole centre dimension differs from the box")
        if not self.hole_radius > 0:
            raise GeometryError(f"hole radius must be > 0, got {hole_radius}")
        if self.box.signed_distance(self.hole_center)[0] <= self.hole_radius:
            raise GeometryError("the removed ball must lie in the interior of the box")
        super().__init__(self.box.dim)

    def contains(self, points, tol=TOL):
        pts = self._as_points(points)
        outside_hole = np.linalg.norm(pts - self.hole_center, axis=1) >= self.hole_radius - tol
        return self.box.contains(pts, tol) & outside_hole

    def signed_distance(self, points):
        pts = self._as_points(points)
        hole = np.linalg.norm(pts - self.hole_center, axis=1) - self.hole_radius
        return np.minimum(self.box.signed_distance(pts), hole)

    @property
    def bounding_box(self):
        return self.box.bounding_box

    @property
    def volume(self):
        return self.box.volume - unit_ball_volume(self.dim) * self.hole_radius ** self.dim

    @property
    def midplane_symmetric(self):
        return bool(np.allclose(self.hole_center, (self.box.lo + self.box.hi) / 2.0))

    def constraints(self):
        return self.box.constraints() + [
            lambda x: np.atleast_1d(np.sum((x - self.hole_center) ** 2) - self.hole_radius ** 2)
        ]

    def to_dict(self):
        return {"kind": self.kind, "lo": self.box.lo.tolist(), "hi": self.box.hi.tolist(),
                "hole_center": self.hole_center.tolist(), "hole_radius": self.hole_radius}


DOMAIN_KINDS = ("box", "ball", "polytope", "annulus", "box-minus-ball")


def make_domain(kind: str, dim: int, **params: Any) -> Domain:
    """Build a domain of the given kind; unspecified parameters take the standard shapes.

    box: unit cube. ball: unit ball at the origin. annulus: radii 0.5 and 1
    about the origin. box-minus-ball: unit cube minus the ball of radius 0.25
    at its centre. polytope: ``A`` and ``b`` are required.
    """
    if kind == "box":
        return BoxDomain(params.get("lo", [0.0] * dim), params.get("hi", [1.0] * dim))
    if kind == "ball":
        return BallDomain(params.get("center", [0.0] * dim), params.get("radius", 1.0))
    if kind == "annulus":
        return AnnulusDomain(params.get("center", [0.0] * dim),
                             params.get("inner", 0.5), params.get("outer", 1.0))
    if kind == "box-minus-ball":
        return BoxMinusBallDomain(params.get("lo", [0.0] * dim), params.get("hi", [1.0] * dim),
                                  params.get("hole_center", [0.5] * dim),
                                  params.get("hole_radius", 0.25))
    if kind == "polytope":
        if "A" not in params or "b" not in params:
            raise ConfigError("polytope domains need halfspace normals 'A' and offsets 'b'")
        domain = PolytopeDomain(params["A"], params["b"])
        if domain.dim != dim:
            raise ConfigError(f"polytope is {domain.dim}-dimensional, requested dimension {dim}")
        return domain
    raise ConfigError(f"Unknown domain kind '{kind}'; expected one of {DOMAIN_KINDS}")


def domain_from_dict(data: Dict[str, Any]) -> Domain:
    params = dict(data)
    kind = params.pop("kind")
    if kind == "polytope":
        return PolytopeDomain(params["A"], params["b"])
    dim = len(params.get("lo") or params.get("center"))
    return make_domain(kind, dim, **params)


@dataclass(frozen=True)
class DensitySpec:
    """A probability density on K bounded away from zero.

    ``uniform``: constant 1/vol(K). ``bounded-ratio``: proportional to 1 on
    the part of K below the bounding-box mid-plane of ``axis`` and to
    ``ratio`` above it.
    """
    kind: str
    nu_min: float
    ratio: float = 1.0
    axis: int = 0
    split: float = 0.0
    normalizer: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "bounded-ratio"):
            raise ConfigError(f"Unknown density kind '{self.kind}'")
        if not self.nu_min > 0:
            raise ConfigError(f"density must be uniformly positive on K, got nu_min = {self.nu_min}")
        if not self.ratio >= 1:
            raise ConfigError(f"density ratio must be >= 1, got {self.ratio}")

    @classmethod
    def uniform(cls, domain: Domain) -> "DensitySpec":
        vol = domain.volume
        return cls(kind="uniform", nu_min=1.0 / vol, normalizer=vol)

    @classmethod
    def bounded_ratio(cls, domain: Domain, ratio: float, axis: int = 0,
                      quadrature_step: Optional[float] = None) -> "DensitySpec":
        if not 0 <= axis < domain.dim:
            raise ConfigError(f"axis {axis} out of range for dimension {domain.dim}")
        lo, hi = domain.bounding_box
        split = float((lo[axis] + hi[axis]) / 2.0)
        if domain.midplane_symmetric:
            normalizer = domain.volume * (1.0 + ratio) / 2.0
        else:
            pts, cell = _midpoint_grid(domain, quadrature_step or float(np.max(hi - lo)) / 200.0)
            weights = np.where(pts[:, axis] < split, 1.0, ratio)
            normalizer = float(weights.sum() * cell)
        return cls(kind="bounded-ratio", nu_min=1.0 / normalizer, ratio=float(ratio),
                   axis=axis, split=split, normalizer=normalizer)

    @property
    def nu_max(self) -> float:
        return self.ratio * self.nu_min

    def weight(self, points: np.ndarray) -> np.ndarray:
        """Unnormalised density in [1, ratio]."""
        pts = np.atleast_2d(points)
        if self.kind == "uniform":
            return np.ones(pts.shape[0])
        return np.where(pts[:, self.axis] < self.split, 1.0, self.ratio)

    def pdf(self, points: np.ndarray, domain: Domain) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.where(domain.contains(pts), self.weight(pts) / self.normalizer, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "nu_min": self.nu_min, "ratio": self.ratio,
                "axis": self.axis, "split": self.split, "normalizer": self.normalizer}


def make_density(kind: str, domain: Domain, ratio: float = 2.0, axis: int = 0) -> DensitySpec:
    if kind == "uniform":
        return DensitySpec.uniform(domain)
    if kind == "bounded-ratio":
        return DensitySpec.bounded_ratio(domain, ratio, axis)
    raise ConfigError(f"Unknown density kind '{kind}'; expected 'uniform' or 'bounded-ratio'")


def _midpoint_grid(domain: Domain, step: float) -> Tuple[np.ndarray, float]:
    lo, hi = domain.bounding_box
    counts = [max(1, int(math.ceil((b - a) / step))) for a, b in zip(lo, hi)]
    axes = [a + (np.arange(k) + 0.5) * (b - a) / k for a, b, k in zip(lo, hi, counts)]
    cell = float(np.prod([(b - a) / k for a, b, k in zip(lo, hi, counts)]))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return pts[domain.contains(pts)], cell


def density_integral(domain: Domain, density: DensitySpec, step: float) -> float:
    """Midpoint-rule integral of the density over K."""
    pts, cell = _midpoint_grid(domain, step)
    return float(density.pdf(pts, domain).sum() * cell)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n labelled points in R^d; row i is X_i."""
    points: np.ndarray
    seed: Optional[int] = None
    domain_tag: str = "unknown"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise GeometryError(f"point cloud must be a 2-D array, got shape {pts.shape}")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.n


def sample(domain: Domain, density: DensitySpec, n: int, seed: int,
           batch: Optional[int] = None, min_acceptance: Optional[float] = None) -> PointCloud:
    """Draw n i.i.d. points from the density by rejection against the bounding box.

    ``batch`` and ``min_acceptance`` default to the ``domains`` section of the
    lab configuration. Raises SamplingError once at least 100k draws have
    been made and the acceptance rate is below ``min_acceptance``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if batch is None:
        batch = int(get_setting("domains", "sample_batch"))
    if min_acceptance is None:
        min_acceptance = float(get_setting("domains", "min_acceptance"))
    rng = np.random.default_rng(seed)
    lo, hi = domain.bounding_box
    kept: List[np.ndarray] = []
    have = 0
    drawn = 0
    while have < n:
        cand = rng.uniform(lo, hi, size=(batch, domain.dim))
        thresholds = rng.random(batch) * density.ratio
        drawn += batch
        mask = domain.contains(cand) & (thresholds <= density.weight(cand))
        if mask.any():
            kept.append(cand[mask])
            have += int(mask.sum())
        if drawn >= _ACCEPTANCE_WINDOW and have / drawn < min_acceptance:
            acceptance = have / drawn
            raise SamplingError(
                f"Rejection sampling accepted {acceptance:.2e} of draws on {domain.tag}; "
                f"reparameterise the domain so it fills more of its bounding box", acceptance)
    points = np.vstack(kept)[:n]
    logger.debug(f"Sampled {n} points on {domain.tag} with seed {seed} ({have}/{drawn} accepted)")
    return PointCloud(points, seed=seed, domain_tag=domain.tag)


def first_uncovered(queries: np.ndarray, points: np.ndarray, reach: float) -> Optional[int]:
    """Index of the first query farther than ``reach`` from every point, or None."""
    if points.shape[0] == 0:
        return 0 if queries.shape[0] else None
    step = max(1, _BLOCK_ENTRIES // points.shape[0])
    for start in range(0, queries.shape[0], step):
        near = cdist(queries[start:start + step], points).min(axis=1)
        bad = np.flatnonzero(near > reach + TOL)
        if bad.size:
            return start + int(bad[0])
    return None


@dataclass(frozen=True, eq=False)
class CoverageResult:
    covered: bool
    witness: Optional[np.ndarray]
    r: float
    grid_step: float
    certified_radius: float
    grid_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "covered": self.covered,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "r": self.r,
            "grid_step": self.grid_step,
            "certified_radius": self.certified_radius,
            "grid_points": self.grid_points,
        }


def check_coverage(cloud: PointCloud, domain: Domain, r: float,
                   grid_step: Optional[float] = None) -> CoverageResult:
    """Coverage K ⊆ ⋃ B(X_i, r) at grid resolution.

    A true verdict certifies K ⊆ ⋃ B(X_i, r + grid_step * sqrt(d)).
    """
    if not r > 0:
        raise GeometryError(f"r must be > 0, got {r}")
    step = r / 10.0 if grid_step is None else float(grid_step)
    if step > r / 4.0 + TOL:
        raise GeometryError(f"grid_step <= r/4 violated: grid_step = {step}, r = {r}")
    grid = domain.grid(step)
    certified = r + step * math.sqrt(domain.dim)
    idx = first_uncovered(grid, cloud.points, r)
    if idx is None:
        return CoverageResult(True, None, r, step, certified, int(grid.shape[0]))
    return CoverageResult(False, grid[idx].copy(), r, step, certified, int(grid.shape[0]))


def greedy_packing(domain: Domain, radius: float, grid_step: Optional[float] = None,
                   extra: int = 256, seed: int = 0) -> np.ndarray:
    """Greedy maximal packing of radius-``radius`` balls with centres in K.

    Candidates are the lattice of pitch ``grid_step`` (default radius/10) in
    K plus ``extra`` uniform points, scanned in a seeded random order; a
    candidate is accepted when it is more than 2*radius from every accepted
    centre. Every candidate therefore ends within 2*radius of a centre.
    """
    if not radius > 0:
        raise GeometryError(f"packing radius must be > 0, got {radius}")
    step = radius / 10.0 if grid_step is None else float(grid_step)
    rng = np.random.default_rng(seed)
    candidates = domain.grid(step)
    if extra > 0:
        candidates = np.vstack([candidates, sample(domain, DensitySpec.uniform(domain), extra,
                                                   int(rng.integers(2 ** 31))).points])
    order = rng.permutation(candidates.shape[0])

    lo, _ = domain.bounding_box
    cell = 2.0 * radius
    buckets: Dict[Tuple[int, ...], List[int]] = {}
    offsets = np.array(np.meshgrid(*[[-1, 0, 1]] * domain.dim, indexing="ij")).reshape(domain.dim, -1).T
    accepted: List[np.ndarray] = []
    limit = (2.0 * radius) ** 2
    for idx in order:
        p = candidates[idx]
        key = np.floor((p - lo) / cell).astype(int)
        clash = False
        for off in offsets:
            for j in buckets.get(tuple(key + off), ()):
                if np.sum((accepted[j] - p) ** 2) <= limit:
                    clash = True
                    break
            if clash:
                break
        if not clash:
            buckets.setdefault(tuple(key), []).append(len(accepted))
            accepted.append(p)
    logger.debug(f"Greedy packing on {domain.tag}: {len(accepted)} centres of radius {radius}")
    return np.array(accepted)


def coverage_union_bound(domain: Domain, density: DensitySpec, r: float, n: int,
                         seed: int = 0) -> Dict[str, float]:
    """Union bound on P(K not covered by the r-balls around n samples).

    Pack radius-r/4 balls greedily (N centres); each B(x_i, r/2) holds a
    ball of radius delta3 * r/2 inside K, hence has measure at least
    p = nu_min * vol(unit ball) * (delta3 * r/2)^d, and a sample point in
    every B(x_i, r/2) covers K. Requires a convex K.
    """
    if not domain.convex:
        raise GeometryError("the coverage union bound relies on a convex domain")
    s = r / 4.0
    centres = greedy_packing(domain, s, seed=seed)
    lam = domain.diameter / domain.inradius
    p = density.nu_min * unit_ball_volume(domain.dim) * (delta3(lam) * 2.0 * s) ** domain.dim
    p = min(p, 1.0)
    log_miss = n * math.log1p(-p) if p < 1.0 else -math.inf
    bound = min(1.0, len(centres) * math.exp(log_miss))
    return {"N": float(len(centres)), "p_min": p, "bound": bound, "delta3": delta3(lam)}


def format_cloud_csv(cloud: PointCloud) -> str:
    """``dim,<d>`` then one point per line with round-trip float precision."""
    lines = [f"dim,{cloud.dim}"] + [",".join(repr(float(v)) for v in row) for row in cloud.points]
    return "\n".join(lines) + "\n"


def write_cloud_csv(cloud: PointCloud, path: str) -> None:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_cloud_csv(cloud))
    except OSError as e:
        raise LabIOError(f"Could not write point cloud: {e}", str(path))


def read_cloud_csv(path: str, domain_tag: str = "file") -> PointCloud:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = [line.strip() for line in f if line.strip()]
    except OSError as e:
        raise LabIOError(f"Could not read point cloud: {e}", str(path))
    if not lines or not lines[0].startswith("dim,"):
        raise LabIOError("Point cloud file must start with 'dim,<d>'", str(path))
    try:
        dim = int(lines[0].split(",", 1)[1])
        rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    except ValueError as e:
        raise LabIOError(f"Malformed point cloud: {e}", str(path))
    if any(len(row) != dim for row in rows):
        raise LabIOError(f"Every point must have {dim} coordinates", str(path))
    points = np.array(rows, dtype=float).reshape(len(rows), dim)
    return PointCloud(points, seed=None, domain_tag=domain_tag)

"""
Ball geometry behind the dismantling argument.

W(x, y, r) is the set of points z in B(y, |y - x|) whose r-ball swallows
B(x, r) ∩ B(y, |y - x|). A sample point in W(x, y, r) dominates x in any
induced subgraph where x is the vertex furthest from y. This module decides
W-membership by probing, and builds the explicit witness ball inside W and
the inner ball inside B(x, r) ∩ X for a convex X.

All containment checks are closed with an absolute tolerance; under
continuous sampling boundary ties have probability zero.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .config import get_setting
from .errors import GeometryError

logger = logging.getLogger(__name__)

TOL = 1e-12
# Rejection sampling gives up after this many draws per requested probe.
_MAX_DRAWS_PER_PROBE = 64


def as_point(coords: Sequence[float], name: str = "point") -> np.ndarray:
    """Convert to a finite 1-D float array."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise GeometryError(f"{name} must be a non-empty coordinate vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise GeometryError(f"{name} has non-finite coordinates: {p}")
    return p


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed ball B(center, radius)."""
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, "center"))
        if not self.radius >= 0:
            raise GeometryError(f"Ball radius must be >= 0, got {self.radius}")

    @property
    def dim(self) -> int:
        return int(self.center.size)

    def contains(self, points: np.ndarray, tol: float = TOL) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius + tol


@dataclass(frozen=True, eq=False)
class WitnessBall(Ball):
    """A ball certifying a containment claim.

    ``claim`` names the construction: ``w-witness`` (inside W(x, y, r)),
    ``inner-ball`` (inside B(x, r) ∩ X), ``intersection`` (inside an
    intersection of cover balls, centre in K) or ``w-intersection`` (both of
    the latter two at once).
    """
    claim: str = "unspecified"
    details: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        super().__post_init__()
        if not self.radius > 0:
            raise GeometryError(f"WitnessBall radius must be > 0, got {self.radius}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": [float(v) for v in self.center],
            "radius": float(self.radius),
            "claim": self.claim,
            "details": self.details,
        }


@dataclass(frozen=True)
class WMembership:
    """Full outcome of a W(x, y, r) membership probe."""
    contained: bool
    vacuous: bool
    violations: int
    probes_used: int
    reason: str = ""


def delta1(lam: float) -> float:
    """Relative radius of the witness ball inside W(x, y, r) for |x - y| <= lam * r."""
    if not lam >= 1:
        raise GeometryError(f"lambda must be >= 1, got {lam}")
    q = 1.0 / (100.0 * lam * lam)
    # 1 - sqrt(1 - q) without cancellation
    return min(1.0 / (10.0 * lam), -math.expm1(0.5 * math.log1p(-q)))


def delta3(lam: float) -> float:
    """Relative radius of the inner ball for a convex X with diam(X) <= lam * inr(X)."""
    if not lam > 0:
        raise GeometryError(f"lambda must be > 0, got {lam}")
    return 1.0 / (1.0 + 2.0 * lam)


def sample_ball(center: np.ndarray, radius: float, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw m points uniformly from the d-ball B(center, radius)."""
    center = np.asarray(center, dtype=float)
    d = center.size
    directions = rng.standard_normal((m, d))
    norms = np.linalg.norm(directions, axis=1)
    norms[norms == 0] = 1.0
    radii = radius * rng.random(m) ** (1.0 / d)
    return center + directions * (radii / norms)[:, None]


def _check_pair(x: np.ndarray, y: np.ndarray, r: float) -> float:
    if x.shape != y.shape:
        raise GeometryError(f"x and y differ in dimension: {x.size} vs {y.size}")
    if not r > 0:
        raise GeometryError(f"r must be > 0, got {r}")
    dist = float(np.linalg.norm(y - x))
    if dist == 0.0:
        raise GeometryError("degenerate input: x = y, W(x, y, r) is undefined")
    return dist


def _axis_extremes(x: np.ndarray, y: np.ndarray, r: float, dist: float) -> np.ndarray:
    """Endpoints of the intersection B(x, r) ∩ B(y, |y-x|) along the x -> y axis."""
    axis = (y - x) / dist
    return np.vstack([x, x + min(r, 2.0 * dist) * axis])


def probe_count(probes: Optional[int] = None) -> int:
    """Probe count to use; None means the configured ``geometry.probes``."""
    return int(get_setting("geometry", "probes")) if probes is None else int(probes)


def intersection_probes(x: np.ndarray, y: np.ndarray, r: float, probes: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Uniform points of B(x, r) ∩ B(y, |y - x|), rejection-sampled from the smaller ball.

    Returns fewer than ``probes`` rows (possibly none) only when the draw
    allowance runs out.
    """
    dist = float(np.linalg.norm(y - x))
    if r <= dist:
        source_center, source_radius, other_center, other_radius = x, r, y, dist
    else:
        source_center, source_radius, other_center, other_radius = y, dist, x, r

    accepted = []
    have = 0
    drawn = 0
    limit = probes * _MAX_DRAWS_PER_PROBE
    batch = max(64, probes)
    while have < probes and drawn < limit:
        cand = sample_ball(source_center, source_radius, batch, rng)
        drawn += batch
        keep = cand[np.linalg.norm(cand - other_center, axis=1) <= other_radius]
        if keep.size:
            accepted.append(keep)
            have += keep.shape[0]
    if not accepted:
        return np.empty((0, x.size))
    return np.vstack(accepted)[:probes]


def w_membership(x: Sequence[float], y: Sequence[float], r: float, z: Sequence[float],
                 probes: Optional[int] = None, seed: int = 0, tol: float = TOL) -> WMembership:
    """Decide z ∈ W(x, y, r) by probing.

    z must lie in the closed ball B(y, |y - x|), both axis endpoints of the
    intersection must be within r of z, and every probe point drawn from the
    intersection must lie within r + tol of z.
    """
    x, y, z = as_point(x, "x"), as_point(y, "y"), as_point(z, "z")
    dist = _check_pair(x, y, r)
    if z.shape != x.shape:
        raise GeometryError(f"z has dimension {z.size}, expected {x.size}")
    probes = probe_count(probes)
    if probes < 1:
        raise GeometryError(f"probes must be positive, got {probes}")

    if np.linalg.norm(z - y) > dist + tol:
        return WMembership(False, False, 0, 0, "z outside B(y, |y-x|)")

    extremes = _axis_extremes(x, y, r, dist)
    far = int(np.count_nonzero(np.linalg.norm(extremes - z, axis=1) > r + tol))
    if far:
        return WMembership(False, False, far, 0, "axis endpoint of the intersection beyond r")

    rng = np.random.default_rng(seed)
    pts = intersection_probes(x, y, r, probes, rng)
    if pts.shape[0] == 0:
        logger.warning(f"Empty probe set for W({x}, {y}, {r}); treating membership as vacuous")
        return WMembership(True, True, 0, 0, "empty intersection")

    violations = int(np.count_nonzero(np.linalg.norm(pts - z, axis=1) > r + tol))
    reason = "" if violations == 0 else "probe point beyond r"
    return WMembership(violations == 0, False, violations, int(pts.shape[0]), reason)


def w_contains(x: Sequence[float], y: Sequence[float], r: float, z: Sequence[float],
               probes: Optional[int] = None, seed: int = 0, tol: float = TOL) -> bool:
    """True iff z ∈ W(x, y, r) according to ``probes`` random probe points."""
    return w_membership(x, y, r, z, probes=probes, seed=seed, tol=tol).contained


def w_margin(x: Sequence[float], y: Sequence[float], r: float, centers: np.ndarray,
             probes: Optional[int] = None, seed: int = 0) -> np.ndarray:
    """Largest rho per candidate centre with B(z, rho) ⊆ W(x, y, r), estimated from probes.

    Negative values mean the centre itself is not in W.
    """
    x, y = as_point(x, "x"), as_point(y, "y")
    dist = _check_pair(x, y, r)
    zs = np.atleast_2d(np.asarray(centers, dtype=float))
    rng = np.random.default_rng(seed)
    pts = np.vstack([_axis_extremes(x, y, r, dist), intersection_probes(x, y, r, probe_count(probes), rng)])

    reach = np.empty(zs.shape[0])
    # chunk to keep the distance block small
    step = max(1, 1_000_000 // max(1, pts.shape[0]))
    for start in range(0, zs.shape[0], step):
        block = zs[start:start + step]
        d = np.linalg.norm(block[:, None, :] - pts[None, :, :], axis=2)
        reach[start:start + step] = d.max(axis=1)
    return np.minimum(r - reach, dist - np.linalg.norm(zs - y, axis=1))


def w_witness_ball(x: Sequence[float], y: Sequence[float], r: float, lam: float,
                   tol: float = TOL) -> WitnessBall:
    """The explicit ball inside W(x, y, r) for r <= |x - y| <= lam * r.

    Centre x + r/(10 lam) along the unit vector towards y, radius delta1(lam) * r.
    """
    x, y = as_point(x, "x"), as_point(y, "y")
    dist = _check_pair(x, y, r)
    if not lam >= 1:
        raise GeometryError(f"lambda >= 1 violated: lambda = {lam}")
    slack = tol * max(1.0, r)
    if dist < r - slack:
        raise GeometryError(f"r <= |x - y| violated: r = {r}, |x - y| = {dist}")
    if dist > lam * r + slack:
        raise GeometryError(f"|x - y| <= lambda * r violated: |x - y| = {dist}, lambda * r = {lam * r}")

    shift = r / (10.0 * lam)
    center = x + shift * (y - x) / dist
    return WitnessBall(center, delta1(lam) * r, claim="w-witness",
                       details={"lambda": float(lam), "r": float(r)})


def inner_ball(x: Sequence[float], inball_center: Sequence[float], inball_radius: float,
               r: float, lam: float, diameter: Optional[float] = None,
               tol: float = TOL) -> WitnessBall:
    """A ball of radius delta3(lam) * r inside B(x, r) ∩ X.

    The caller asserts B(inball_center, inball_radius) ⊆ X for the convex X
    and diam(X) <= lam * inball_radius. The ball is the image of
    B(inball_center, inball_radius / 2) under the homothety with centre x and
    ratio mu = (r / inball_radius) / (1/2 + lam), which keeps it inside X by
    convexity and inside B(x, r) because |x - inball_center| <= lam * inball_radius.

    Args:
        diameter: diam(X) if known; enables the r <= diam(X) and
            diam(X) <= lam * inr(X) checks.
    """
    x = as_point(x, "x")
    c = as_point(inball_center, "inball_center")
    if x.shape != c.shape:
        raise GeometryError(f"x and inball_center differ in dimension: {x.size} vs {c.size}")
    if not inball_radius > 0:
        raise GeometryError(f"inball_radius must be > 0, got {inball_radius}")
    if not r > 0:
        raise GeometryError(f"r must be > 0, got {r}")
    if not lam > 0:
        raise GeometryError(f"lambda must be > 0, got {lam}")

    slack = tol * max(1.0, lam * inball_radius)
    if diameter is not None:
        if r > diameter + slack:
            raise GeometryError(f"r <= diam(X) violated: r = {r}, diam(X) = {diameter}")
        if diameter > lam * inball_radius + slack:
            raise GeometryError(
                f"diam(X) <= lambda * inr(X) violated: diam(X) = {diameter}, "
                f"lambda * inr(X) = {lam * inball_radius}")
    offset = float(np.linalg.norm(x - c))
    if offset > lam * inball_radius + slack:
        raise GeometryError(
            f"|x - incenter| <= lambda * inr(X) violated: {offset} > {lam * inball_radius}")

    mu = (r / inball_radius) / (0.5 + lam)
    if mu > 1.0:
        raise GeometryError(f"r too large for the inner-ball construction (mu = {mu:.6g} > 1)")
    center = (1.0 - mu) * x + mu * c
    return WitnessBall(center, mu * inball_radius / 2.0, claim="inner-ball",
                       details={"mu": float(mu), "lambda": float(lam), "r": float(r)})

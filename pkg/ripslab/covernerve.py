"""
Ball cover of K with radius inflation, and the nerve verifier.

The cover starts from a greedy maximal r-packing {x_i} (the balls B(x_i, 2r)
then cover K) with radii s_i = 3r. Whenever K ∩ ⋂_{i∈I} B(x_i, s_i) is
nonempty but holds no ball of radius εr, every s_i with i ∈ I grows by εr.
Only index sets I whose balls pairwise meet are examined.

Intersections are scanned face by face, smallest faces first: the objective
t(x) = min_{i∈I} (s_i - |x - x_i|) is evaluated on a lattice in K, and
faces the lattice cannot decide go to a constrained local ascent (SLSQP).
Emptiness is probe-based: a face whose lattice values all sit below
-2 * pitch * sqrt(d) and is never picked up by the ascent counts as empty.
"""

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import cdist, pdist, squareform

from .complex import maximal_cliques
from .dismantle import anchored_chain, dismantle
from .domains import Domain, PointCloud, first_uncovered, greedy_packing
from .errors import CoverError, CoverOverflowError, GeometryError, SearchBudgetError
from .geometry import TOL, WitnessBall, as_point, intersection_probes, probe_count, w_margin, w_witness_ball
from .proximity import GeometricGraph, bits_of

logger = logging.getLogger(__name__)

Face = Tuple[int, ...]

DEFAULT_EPSILON = 0.05
EPSILON_FLOOR = 2.0 ** -20
DEFAULT_PROBE_BUDGET = 2_000_000
DEFAULT_FACE_BUDGET = 1_000_000
SCAN_PITCH_FRACTION = 0.1
# Probe count for the per-face witness search on non-convex domains.
WITNESS_PROBES = 512


@dataclass(eq=False)
class Cover:
    """Centres x_i, radii s_i and the bookkeeping of the inflation loop.

    ``inner_balls`` maps every face found nonempty in the final scan to a
    ball inside K-centred ⋂ B(x_i, s_i); it doubles as the nerve of the A_i.
    """
    centers: np.ndarray
    radii: np.ndarray
    r: float
    epsilon: float
    domain: Domain = field(repr=False)
    inner_balls: Dict[Face, WitnessBall] = field(default_factory=dict, repr=False)
    inflations: Dict[Face, int] = field(default_factory=dict)
    epsilon_history: List[float] = field(default_factory=list)
    neighbor_counts: List[int] = field(default_factory=list)
    passes: int = 0

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        self.radii = np.asarray(self.radii, dtype=float).copy()
        if self.centers.shape[0] != self.radii.size:
            raise CoverError(f"{self.centers.shape[0]} centres but {self.radii.size} radii")

    @property
    def N(self) -> int:
        return int(self.centers.shape[0])

    def membership(self, points: np.ndarray) -> np.ndarray:
        """Boolean matrix: point p lies in the open ball B(x_i, s_i)."""
        return cdist(np.atleast_2d(points), self.centers) < self.radii[None, :]

    def container_of(self, points: np.ndarray) -> Optional[int]:
        """Lowest i whose A_i holds all the given points, or None."""
        inside = self.membership(points).all(axis=0)
        hits = np.flatnonzero(inside)
        return int(hits[0]) if hits.size else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "centers": self.centers.tolist(),
            "radii": self.radii.tolist(),
            "r": self.r,
            "epsilon": self.epsilon,
            "epsilon_history": list(self.epsilon_history),
            "domain": self.domain.to_dict(),
            "passes": self.passes,
            "neighbor_counts": list(self.neighbor_counts),
            "inflated_faces": [list(face) for face in sorted(self.inflations)],
            "faces": {",".join(map(str, face)): ball.radius
                      for face, ball in sorted(self.inner_balls.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class FaceScan:
    balls: Dict[Face, WitnessBall]
    thin: List[Face]
    faces_examined: int
    evaluations: int


def inner_ball_search(domain: Domain, centers: np.ndarray, radii: np.ndarray, I: Sequence[int],
                      target: float = 0.0, budget: int = 10_000,
                      starts: Optional[Sequence[np.ndarray]] = None) -> Optional[WitnessBall]:
    """Find x in K maximising t(x) = min_{i∈I} (s_i - |x - x_i|).

    Multi-start SLSQP on (x, t) with (s_i - t)^2 >= |x - x_i|^2, s_i >= t and
    the domain's inequality constraints. The returned radius is t re-evaluated
    exactly at the final point. Returns None unless that radius is positive
    and at least ``target``.
    """
    face = tuple(I)
    if not face:
        raise ValueError("index set must be nonempty")
    c = np.asarray(centers, dtype=float)[list(face)]
    s = np.asarray(radii, dtype=float)[list(face)]

    if starts is None:
        starts = [c.mean(axis=0)] + list(c)
        if not domain.convex:
            lo, hi = domain.bounding_box
            rng = np.random.default_rng(len(face))
            starts += list(rng.uniform(lo, hi, size=(2 * len(face), c.shape[1])))

    best_x, best_t, used = _ascend(domain, c, s, starts, budget)
    if best_x is None or best_t <= 0 or best_t < target:
        return None
    return WitnessBall(best_x, best_t, claim="intersection",
                       details={"face": list(face), "evaluations": used, "source": "ascent"})


def _ascend(domain: Domain, c: np.ndarray, s: np.ndarray, starts: Sequence[np.ndarray],
            budget: int) -> Tuple[Optional[np.ndarray], float, int]:
    """Best point of K for min_i (s_i - |x - c_i|) over the starts; returns (x, t, evaluations)."""
    d = c.shape[1]
    constraints = [
        {"type": "ineq", "fun": lambda v: (s - v[-1]) ** 2 - np.sum((v[:d] - c) ** 2, axis=1)},
        {"type": "ineq", "fun": lambda v: s - v[-1]},
    ]
    for g in domain.constraints():
        constraints.append({"type": "ineq", "fun": lambda v, g=g: np.atleast_1d(g(v[:d]))})

    def value(x: np.ndarray) -> float:
        return float(np.min(s - np.linalg.norm(c - x, axis=1)))

    best_x: Optional[np.ndarray] = None
    best_t = -math.inf
    used = 0
    for x0 in starts:
        if used >= budget:
            break
        x0 = np.asarray(x0, dtype=float)
        res = minimize(lambda v: -v[-1], np.append(x0, value(x0)),
                       jac=lambda v: np.append(np.zeros(d), -1.0),
                       method="SLSQP", constraints=constraints,
                       options={"maxiter": 200, "ftol": 1e-13})
        used += int(res.nfev)
        for x in (res.x[:d], x0):
            if not domain.contains(x)[0]:
                if not domain.convex:
                    continue
                x = domain.project(x)[0]
            t = value(x)
            if t > best_t:
                best_x, best_t = x.copy(), t
    return best_x, best_t, used


def _overlap_masks(centers: np.ndarray, radii: np.ndarray) -> List[int]:
    """Bit j of entry i set when B(x_i, s_i) and B(x_j, s_j) meet (i != j)."""
    dist = squareform(pdist(centers)) if len(centers) > 1 else np.zeros((1, 1))
    meets = dist < radii[:, None] + radii[None, :]
    np.fill_diagonal(meets, False)
    return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in meets]


def _face_ball(domain: Domain, grid: np.ndarray, centers: np.ndarray, radii: np.ndarray,
               face: Face, idx: np.ndarray, t: np.ndarray, target: float,
               budget: int) -> Tuple[Optional[WitnessBall], int]:
    """Decide one face from its lattice values, falling back to local ascent.

    ``idx``/``t`` are the lattice points still in play and their objective
    values. Returns the best ball found (None when the face looks empty) and
    the number of objective evaluations spent.
    """
    if not idx.size:
        return None, 0
    best = int(np.argmax(t))
    gmax = float(t[best])
    if gmax > 0 and gmax >= target:
        return WitnessBall(grid[idx[best]], gmax, claim="intersection",
                           details={"face": list(face), "source": "lattice"}), 0
    if budget <= 0:
        raise SearchBudgetError("inner-ball search exhausted its evaluation budget")
    starts = [grid[idx[best]], centers[list(face)].mean(axis=0)]
    if not domain.convex:
        starts += list(grid[idx[np.argsort(-t)[1:2 + 2 * len(face)]]])
    x, value, used = _ascend(domain, centers[list(face)], radii[list(face)], starts, budget)
    if x is None or value <= 0:
        return None, used
    return WitnessBall(x, value, claim="intersection",
                       details={"face": list(face), "evaluations": used, "source": "ascent"}), used


def scan_faces(domain: Domain, centers: np.ndarray, radii: np.ndarray, target: float,
               pitch: float, face_budget: int = DEFAULT_FACE_BUDGET,
               probe_budget: int = DEFAULT_PROBE_BUDGET,
               grid: Optional[np.ndarray] = None) -> FaceScan:
    """Classify every nerve face: nonempty with a ball of radius >= target,
    nonempty but thinner (``thin``), or empty (absent from ``balls``).

    Faces are visited by increasing size, lexicographically within a size;
    a face is only tried when all its codimension-one subfaces are nonempty.
    Lattice values only decrease as a face grows, so points below the band
    are dropped for good.
    """
    if grid is None:
        grid = domain.grid(pitch)
    if grid.shape[0] == 0:
        raise CoverError(f"no lattice points of pitch {pitch} inside the domain")
    band = 2.0 * pitch * math.sqrt(domain.dim)
    dist = cdist(grid, centers)
    overlaps = _overlap_masks(centers, radii)

    balls: Dict[Face, WitnessBall] = {}
    examined = 0
    evaluations = 0
    level: Dict[Face, Tuple[np.ndarray, np.ndarray]] = {}

    def visit(face: Face, idx: np.ndarray, t: np.ndarray) -> None:
        nonlocal examined, evaluations
        examined += 1
        if examined > face_budget:
            raise SearchBudgetError(f"face scan exceeded {face_budget} index sets")
        keep = t > -band
        idx, t = idx[keep], t[keep]
        ball, used = _face_ball(domain, grid, centers, radii, face, idx, t, target,
                                probe_budget - evaluations)
        evaluations += used
        if ball is not None:
            balls[face] = ball
            level[face] = (idx, t)

    everything = np.arange(grid.shape[0])
    for i in range(centers.shape[0]):
        visit((i,), everything, radii[i] - dist[:, i])

    while level:
        current, level = level, {}
        for face, (idx, t) in current.items():
            common = overlaps[face[0]]
            for i in face[1:]:
                common &= overlaps[i]
            for j in bits_of(common >> (face[-1] + 1) << (face[-1] + 1)):
                child = face + (j,)
                if any(child[:k] + child[k + 1:] not in balls for k in range(len(child) - 1)):
                    continue
                visit(child, idx, np.minimum(t, radii[j] - dist[idx, j]))

    thin = sorted((f for f, b in balls.items() if b.radius < target), key=lambda f: (len(f), f))
    return FaceScan(balls=balls, thin=thin, faces_examined=examined, evaluations=evaluations)


def _check_packing(domain: Domain, centers: np.ndarray, r: float, pitch: float) -> List[int]:
    if len(centers) > 1 and pdist(centers).min() <= 2.0 * r:
        raise CoverError("packing centres closer than 2r")
    grid = domain.grid(pitch)
    miss = first_uncovered(grid, centers, 2.0 * r)
    if miss is not None:
        raise CoverError(f"2r-balls miss the lattice point {grid[miss].tolist()}")
    near = cdist(centers, centers) < 8.0 * r
    counts = near.sum(axis=1).astype(int).tolist()
    bound = 9 ** domain.dim
    if max(counts) > bound:
        raise CoverError(f"locality bound violated: {max(counts)} centres within 8r of one centre (> {bound})")
    return counts


def build_cover(domain: Domain, r: float, epsilon: float = DEFAULT_EPSILON,
                probe_budget: int = DEFAULT_PROBE_BUDGET, seed: int = 0,
                packing_pitch_fraction: float = 0.1, packing_extra_samples: int = 256,
                scan_pitch_fraction: float = SCAN_PITCH_FRACTION,
                face_budget: int = DEFAULT_FACE_BUDGET) -> Cover:
    """Greedy packing plus the inflation loop.

    Each pass scans all nerve faces at the current radii. Thin faces are
    re-checked in order against the radii as they grow within the pass and
    inflated only if still thin. The loop ends on a pass with no thin face.

    Raises:
        CoverOverflowError: some s_i would exceed 4r.
        CoverError: a face would be inflated a second time.
        SearchBudgetError: face or evaluation budget exhausted.
    """
    if not r > 0:
        raise GeometryError(f"r must be > 0, got {r}")
    if r >= domain.diameter:
        raise GeometryError(f"r < diam(K) violated: r = {r}, diam = {domain.diameter}; "
                            f"the complex is complete and needs no cover")
    if not epsilon > 0:
        raise GeometryError(f"epsilon must be > 0, got {epsilon}")

    packing_pitch = r * packing_pitch_fraction
    centers = greedy_packing(domain, r, grid_step=packing_pitch,
                             extra=packing_extra_samples, seed=seed)
    counts = _check_packing(domain, centers, r, packing_pitch)
    radii = np.full(len(centers), 3.0 * r)
    step = epsilon * r
    pitch = r * scan_pitch_fraction
    grid = domain.grid(pitch)
    inflations: Dict[Face, int] = {}
    logger.info(f"Cover on {domain.tag}: {len(centers)} centres, r={r}, epsilon={epsilon}")

    passes = 0
    while True:
        passes += 1
        scan = scan_faces(domain, centers, radii, step, pitch, face_budget, probe_budget, grid)
        if not scan.thin:
            break
        logger.debug(f"Pass {passes}: {len(scan.thin)} thin faces out of {len(scan.balls)}")
        for face in scan.thin:
            t = np.min(radii[list(face)][None, :] - cdist(grid, centers[list(face)]), axis=1)
            ball, _ = _face_ball(domain, grid, centers, radii, face, np.arange(grid.shape[0]), t,
                                 step, probe_budget)
            if ball is not None and ball.radius >= step:
                continue
            if face in inflations:
                raise CoverError(f"face {face} would be inflated twice (epsilon={epsilon})")
            inflations[face] = 1
            radii[list(face)] += step
            if np.any(radii > 4.0 * r + TOL):
                raise CoverOverflowError(
                    f"radius above 4r after inflating {face}; retry with a smaller epsilon than {epsilon}",
                    face, epsilon)

    cover = Cover(centers=centers, radii=radii, r=float(r), epsilon=float(epsilon), domain=domain,
                  inner_balls=scan.balls, inflations=inflations, epsilon_history=[float(epsilon)],
                  neighbor_counts=counts, passes=passes)
    logger.info(f"Cover done after {passes} passes: {len(inflations)} inflations, "
                f"{len(scan.balls)} nonempty faces")
    return cover


def build_cover_adaptive(domain: Domain, r: float, epsilon: float = DEFAULT_EPSILON,
                         floor: float = EPSILON_FLOOR, **kwargs: Any) -> Cover:
    """build_cover, halving epsilon after each overflow until ``floor``."""
    history: List[float] = []
    eps = epsilon
    while True:
        history.append(eps)
        try:
            cover = build_cover(domain, r, eps, **kwargs)
        except CoverOverflowError as e:
            if eps / 2.0 < floor:
                raise
            logger.warning(f"Cover overflow at epsilon={eps} on face {e.index_set}; halving")
            eps /= 2.0
            continue
        cover.epsilon_history = history
        return cover


@dataclass
class NerveReport:
    condition_a: bool
    condition_b: bool
    condition_c: bool
    nerve_A: List[Face]
    nerve_Delta: List[Face]
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return self.condition_a and self.condition_b and self.condition_c

    def to_dict(self) -> Dict[str, Any]:
        return {
            "condition_a": self.condition_a,
            "condition_b": self.condition_b,
            "condition_c": self.condition_c,
            "nerve_A": [list(f) for f in self.nerve_A],
            "nerve_Delta": [list(f) for f in self.nerve_Delta],
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


def _maximal(faces: Set[Face]) -> List[Face]:
    tops = [f for f in faces if not any(len(g) > len(f) and set(f) <= set(g) for g in faces)]
    return sorted(tops, key=lambda f: (len(f), f))


def _downward_closure(tops: Sequence[Face]) -> Set[Face]:
    faces: Set[Face] = set()
    for top in tops:
        for k in range(1, len(top) + 1):
            faces.update(itertools.combinations(top, k))
    return faces


def verify_nerve(cloud: PointCloud, graph: GeometricGraph, cover: Cover,
                 pitch_fraction: float = SCAN_PITCH_FRACTION,
                 witness_probes: int = WITNESS_PROBES) -> NerveReport:
    """Check the three conditions for A_i = B(x_i, s_i) ∩ K and Δ_i = K(G[A_i]).

    condition_a: every clique of G lies in a single A_i (vertices whose
    whole closed neighbourhood sits in one A_i are settled at once; the
    rest are checked through their maximal cliques).
    condition_b: for every face I of the nerve of the Δ_i, the graph
    induced on the points of ⋂_{i∈I} A_i dismantles completely.
    condition_c: the nerve of the A_i equals the nerve of the Δ_i.

    Alongside condition_b each face gets a witness-ball search for its
    point farthest from the anchor: the closed-form path on convex domains,
    the smooth search otherwise. Faces without a witness are listed in
    ``details["missing_witness_faces"]``; they do not affect the verdicts.
    """
    if abs(graph.r - cover.r) > TOL * max(1.0, cover.r):
        raise CoverError(f"cover built for r={cover.r} but graph has r={graph.r}")
    if cloud.n != graph.n:
        raise CoverError(f"cloud has {cloud.n} points, graph has {graph.n} vertices")

    if cover.r >= cover.domain.diameter:
        return NerveReport(True, True, True, [], [], {"short_circuit": "r >= diam(K): complete complex"})

    inside = cover.membership(cloud.points)
    a_masks = [sum(1 << int(p) for p in np.flatnonzero(inside[:, i])) for i in range(cover.N)]

    # condition a
    a_failures: List[List[int]] = []
    for v in range(graph.n):
        closed = graph.closed_bits(v)
        if any(closed & ~mask == 0 for mask in a_masks):
            continue
        for clique in maximal_cliques(graph, bits_of(closed)):
            cmask = sum(1 << u for u in clique)
            if not any(cmask & ~mask == 0 for mask in a_masks):
                a_failures.append(list(clique))
    condition_a = not a_failures

    # nerve of the Δ_i: downward closure of the per-point membership sets
    member_sets = {tuple(np.flatnonzero(row).tolist()) for row in inside}
    member_sets.discard(())
    delta_faces = _downward_closure(list(member_sets))

    # nerve of the A_i
    if cover.inner_balls:
        a_balls = dict(cover.inner_balls)
    else:
        scan = scan_faces(cover.domain, cover.centers, cover.radii, 0.0, cover.r * pitch_fraction)
        a_balls = scan.balls
    a_faces = set(a_balls)

    only_a = sorted(a_faces - delta_faces, key=lambda f: (len(f), f))
    only_delta = sorted(delta_faces - a_faces, key=lambda f: (len(f), f))
    condition_c = not only_a and not only_delta

    # condition b, with the anchored-chain and witness diagnostics alongside
    if cover.domain.convex:
        witness_path, witness_search = "convex", convex_condition_b5
    else:
        witness_path, witness_search = "smooth", partial(smooth_condition_b5, probes=witness_probes)
    witness_checks = 0
    missing_witness: List[List[int]] = []
    verdicts: Dict[int, bool] = {}
    b_failures: List[Dict[str, Any]] = []
    chain_failures: List[Dict[str, Any]] = []
    for face in sorted(delta_faces, key=lambda f: (len(f), f)):
        pmask = graph.all_mask
        for i in face:
            pmask &= a_masks[i]
        members = list(bits_of(pmask))
        sub, _ = graph.induced(members)
        if pmask not in verdicts:
            verdicts[pmask] = dismantle(sub).complete
        if not verdicts[pmask]:
            b_failures.append({"face": list(face), "points": len(members)})

        ball = a_balls.get(face)
        focus = ball.center if ball is not None else cloud.points[members].mean(axis=0)
        offsets = np.linalg.norm(cloud.points[members] - focus, axis=1)
        anchor = int(np.argmin(offsets))
        spread = np.linalg.norm(cloud.points[members] - cloud.points[members[anchor]], axis=1)
        order = sorted(range(len(members)), key=lambda k: (float(spread[k]), k))
        ok, _ = anchored_chain(sub, order)
        if not ok:
            chain_failures.append({"face": list(face), "anchor": members[anchor]})

        far = int(np.argmax(spread))
        if spread[far] >= cover.r:
            witness_checks += 1
            if witness_search(cover, face, cloud.points[members[far]], cloud.points[members[anchor]]) is None:
                missing_witness.append(list(face))
    condition_b = not b_failures

    details = {
        "epsilon": cover.epsilon,
        "faces_A": len(a_faces),
        "faces_Delta": len(delta_faces),
        "clique_failures": a_failures,
        "dismantle_failures": b_failures,
        "faces_only_in_A": [list(f) for f in only_a],
        "faces_only_in_Delta": [list(f) for f in only_delta],
        "anchored_chain_failures": chain_failures,
        "witness_path": witness_path,
        "witness_checks": witness_checks,
        "missing_witness_faces": missing_witness,
        "min_inner_radius": min((b.radius for b in a_balls.values()), default=None),
    }
    report = NerveReport(condition_a, condition_b, condition_c,
                         nerve_A=_maximal(a_faces), nerve_Delta=_maximal(delta_faces), details=details)
    logger.info(f"Nerve check: a={condition_a} b={condition_b} c={condition_c} "
                f"({len(a_faces)} / {len(delta_faces)} faces)")
    return report


def _face_value(cover: Cover, I: Sequence[int], z: np.ndarray) -> np.ndarray:
    zs = np.atleast_2d(z)
    idx = list(I)
    return np.min(cover.radii[idx][None, :] - cdist(zs, cover.centers[idx]), axis=1)


def smooth_condition_b5(cover: Cover, I: Sequence[int], x: Sequence[float], y: Sequence[float],
                        probes: Optional[int] = None, seed: int = 0) -> Optional[WitnessBall]:
    """Ball inside W(x, y, r) ∩ ⋂_{i∈I} A_i, searched without convexity.

    The score of a centre z is min(t_I(z), W-margin of z, distance of z to
    the boundary of K). Candidates lie along the segment from x towards y,
    at the explicit witness centre, and at probe points of
    B(x, r) ∩ B(y, |y - x|); the best is polished by Nelder-Mead.
    Returns None when |x - y| < r (adjacent points need no witness) or when
    no candidate scores above zero.
    """
    x, y = as_point(x, "x"), as_point(y, "y")
    r = cover.r
    dist = float(np.linalg.norm(y - x))
    if dist < r:
        return None
    unit = (y - x) / dist
    lam = dist / r
    probes = probe_count(probes)
    rng = np.random.default_rng(seed)
    candidates = np.vstack([
        x + np.outer(np.linspace(0.0, min(r, dist), 41), unit),
        x + r / (10.0 * lam) * unit,
        intersection_probes(x, y, r, 256, rng),
    ])

    def score(zs: np.ndarray) -> np.ndarray:
        zs = np.atleast_2d(zs)
        return np.minimum.reduce([
            _face_value(cover, I, zs),
            w_margin(x, y, r, zs, probes, seed),
            cover.domain.signed_distance(zs),
        ])

    values = score(candidates)
    best = int(np.argmax(values))
    z, best_value = candidates[best], float(values[best])
    res = minimize(lambda v: -float(score(v)[0]), z, method="Nelder-Mead",
                    options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
    if -res.fun > best_value:
        z, best_value = res.x, float(-res.fun)
    if best_value <= 0:
        logger.debug(f"No witness ball in W ∩ A_I for I={tuple(I)} ({len(candidates)} candidates)")
        return None
    return WitnessBall(z, best_value, claim="w-intersection",
                       details={"face": list(I), "candidates": int(len(candidates)), "probes": probes})


def convex_condition_b5(cover: Cover, I: Sequence[int], x: Sequence[float],
                        y: Sequence[float]) -> Optional[WitnessBall]:
    """The explicit witness ball of W(x, y, r), shrunk to fit ⋂_{i∈I} A_i."""
    x, y = as_point(x, "x"), as_point(y, "y")
    r = cover.r
    dist = float(np.linalg.norm(y - x))
    if dist < r:
        return None
    witness = w_witness_ball(x, y, r, dist / r)
    radius = min(witness.radius,
                 float(_face_value(cover, I, witness.center)[0]),
                 float(cover.domain.signed_distance(witness.center)[0]))
    if radius <= 0:
        return None
    return WitnessBall(witness.center, radius, claim="w-intersection",
                       details={"face": list(I), "lambda": dist / r})

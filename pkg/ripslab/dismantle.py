"""
Dominated-vertex dismantling, the cop-win decision and the pursuit game.

A vertex v is dominated by w != v when N[v] ⊆ N[w]. Deleting it leaves the
homotopy type of the clique complex unchanged; a graph that dismantles to a
single vertex is cop-win and its clique complex is contractible.
"""

import heapq
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .complex import DEFAULT_SIMPLEX_BUDGET, betti, enumerate_complex, is_point_like
from .errors import ComplexBudgetError, PursuitError
from .proximity import Graph, bits_of

logger = logging.getLogger(__name__)

CERTIFIED = "certified-contractible"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"

ROBBER_STRATEGIES = ("greedy", "random")
# Descriptive names accepted for the two strategies.
ROBBER_ALIASES = {"greedy-distance-maximizing": "greedy", "uniform-random": "random"}


def robber_strategy(name: str) -> str:
    """Short strategy name for ``name``, which may be a short name or an alias."""
    strategy = ROBBER_ALIASES.get(name, name)
    if strategy not in ROBBER_STRATEGIES:
        expected = list(ROBBER_STRATEGIES) + list(ROBBER_ALIASES)
        raise PursuitError(f"unknown robber strategy '{name}'; expected one of {expected}")
    return strategy


@dataclass
class EliminationRecord:
    """Deletion sequence of (removed, dominator) pairs and the surviving vertices."""
    n: int
    steps: List[Tuple[int, int]] = field(default_factory=list)
    residual: Tuple[int, ...] = ()

    @property
    def complete(self) -> bool:
        return len(self.residual) == 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "steps": [[v, w] for v, w in self.steps],
            "residual": list(self.residual),
            "complete": self.complete,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EliminationRecord":
        data = json.loads(text)
        return cls(n=int(data["n"]),
                   steps=[(int(v), int(w)) for v, w in data["steps"]],
                   residual=tuple(int(v) for v in data["residual"]))


def _dominator(v: int, alive: int, closed: Sequence[int]) -> Optional[int]:
    """Lowest-id w != v in the alive graph with N[v] ⊆ N[w], if any."""
    nv = closed[v] & alive
    for w in bits_of(nv & ~(1 << v)):
        if nv & ~closed[w] == 0:
            return w
    return None


def dismantle(g: Graph, seed: Optional[int] = None) -> EliminationRecord:
    """Delete dominated vertices until none is left.

    With ``seed=None`` the lowest-id dominated vertex goes first; an integer
    seed replaces ids by a seeded random priority. Only neighbours of a
    deleted vertex can become newly dominated, so only they are re-queued.
    """
    if g.n == 0:
        raise ValueError("cannot dismantle an empty graph")
    closed = [g.closed_bits(v) for v in range(g.n)]
    if seed is None:
        priority = list(range(g.n))
    else:
        priority = np.random.default_rng(seed).permutation(g.n).tolist()

    alive = g.all_mask
    remaining = g.n
    heap = [(priority[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    queued = [True] * g.n
    steps: List[Tuple[int, int]] = []

    while heap and remaining > 1:
        _, v = heapq.heappop(heap)
        queued[v] = False
        if not (alive >> v) & 1:
            continue
        w = _dominator(v, alive, closed)
        if w is None:
            continue
        alive &= ~(1 << v)
        remaining -= 1
        steps.append((v, w))
        for u in bits_of(g.bits[v] & alive):
            if not queued[u]:
                queued[u] = True
                heapq.heappush(heap, (priority[u], u))

    record = EliminationRecord(n=g.n, steps=steps, residual=tuple(bits_of(alive)))
    logger.debug(f"Dismantled {g.n} vertices: {len(steps)} deletions, residual {len(record.residual)}")
    return record


def is_copwin(g: Graph) -> bool:
    return dismantle(g).complete


def replay(g: Graph, record: EliminationRecord) -> bool:
    """Re-check every witness against the evolving induced graph, and that the
    residual is what the steps leave behind with nothing in it dominated."""
    if record.n != g.n:
        return False
    closed = [g.closed_bits(v) for v in range(g.n)]
    alive = g.all_mask
    for v, w in record.steps:
        if v == w or not (alive >> v) & 1 or not (alive >> w) & 1:
            return False
        if (closed[v] & alive) & ~closed[w]:
            return False
        alive &= ~(1 << v)
    if tuple(bits_of(alive)) != tuple(record.residual):
        return False
    if len(record.residual) > 1:
        return all(_dominator(v, alive, closed) is None for v in record.residual)
    return True


def core_graph(g: Graph, record: EliminationRecord) -> Graph:
    """Subgraph induced on the residual vertices."""
    core, _ = g.induced(record.residual)
    return core


def anchored_chain(g: Graph, order: Sequence[int]) -> Tuple[bool, List[int]]:
    """Check the chain G_1 ⊂ G_2 ⊂ ... built from ``order``.

    G_k is induced by the first k vertices; each order[k-1] with k >= 2 must
    be dominated inside G_k. Returns the verdict and the failing vertices.
    """
    closed = [g.closed_bits(v) for v in range(g.n)]
    prefix = 0
    failures: List[int] = []
    for k, v in enumerate(order):
        prefix |= 1 << v
        if k == 0:
            continue
        if _dominator(v, prefix, closed) is None:
            failures.append(v)
    return not failures, failures


@dataclass
class ContractibilityCertificate:
    verdict: str
    evidence: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict, "evidence": self.evidence}


def certify_contractible(record: EliminationRecord, graph: Graph,
                         oracle_budget: int = DEFAULT_SIMPLEX_BUDGET,
                         dim_cap: int = 3) -> ContractibilityCertificate:
    """Combine the dismantling certificate with the homology oracle.

    A complete record certifies contractibility. Otherwise the homology of
    the residual core (same homotopy type as the whole complex) is computed:
    nonzero reduced Betti numbers refute contractibility; a point-like or
    over-budget profile leaves the question open. A disconnected core is
    refuted before any simplex is enumerated.
    """
    if record.n != graph.n:
        raise ValueError(f"record is for {record.n} vertices, graph has {graph.n}")
    if record.complete:
        return ContractibilityCertificate(CERTIFIED, {"steps": len(record.steps)})

    core = core_graph(graph, record)
    if not core.is_connected():
        unseen, components = set(range(core.n)), 0
        while unseen:
            unseen -= set(core.distances_from(min(unseen)))
            components += 1
        return ContractibilityCertificate(REFUTED, {"reason": "disconnected core", "core_size": core.n,
                                                    "b0": components})
    try:
        profile = betti(enumerate_complex(core, dim_cap, oracle_budget))
    except ComplexBudgetError as e:
        logger.warning(f"Homology oracle over budget on a core of {core.n} vertices")
        return ContractibilityCertificate(INCONCLUSIVE, {
            "reason": "homology budget exceeded",
            "core_size": core.n,
            "partial_counts": e.partial_counts,
        })

    evidence = {"core_size": core.n, "profile": profile.to_dict()}
    values = profile.full()
    reduced = [values[0] - 1] + list(values[1:]) if values else []
    if any(reduced):
        return ContractibilityCertificate(REFUTED, evidence)
    evidence["reason"] = "point-like up to dim_cap" if is_point_like(profile) else "no homology computed"
    return ContractibilityCertificate(INCONCLUSIVE, evidence)


@dataclass
class PursuitTranscript:
    """Positions after each move; cop_moves[0] and robber_moves[0] are the starts."""
    cop_moves: List[int]
    robber_moves: List[int]
    captured: bool
    turns: int

    def to_dict(self) -> Dict[str, Any]:
        return {"cop_moves": self.cop_moves, "robber_moves": self.robber_moves,
                "captured": self.captured, "turns": self.turns}


def _shadow(steps: Sequence[Tuple[int, int]], k: int, x: int) -> int:
    """F_k(x): apply the first k deletion maps (removed -> dominator) in order."""
    for v, w in steps[:k]:
        if x == v:
            x = w
    return x


def pursue(g: Graph, record: EliminationRecord, robber: str = "greedy", seed: int = 0,
           robber_start: Optional[int] = None) -> PursuitTranscript:
    """Cop plays the retract strategy induced by the elimination order.

    The cop starts on the residual vertex, the image of every vertex under
    F_m (all m deletion maps). The cop always stands on F_k(robber) for the
    smallest such k; after the robber moves to R the cop moves to
    F_{k-1}(R), which is within one step because the robber's previous
    shadow at level k-1 was the vertex deleted at step k and the cop its
    dominator. Each move lowers k, so capture takes at most m moves.
    """
    if not record.complete:
        raise PursuitError("pursuit needs a complete elimination record (the graph is not cop-win)")
    if record.n != g.n:
        raise PursuitError(f"record is for {record.n} vertices, graph has {g.n}")
    robber = robber_strategy(robber)

    rng = np.random.default_rng(seed)
    steps = record.steps
    k = len(steps)
    cop = record.residual[0]

    if robber_start is not None:
        if not 0 <= robber_start < g.n:
            raise IndexError(f"vertex {robber_start} out of range for {g.n} vertices")
        position = robber_start
    elif robber == "greedy":
        dist = g.distances_from(cop)
        position = max(range(g.n), key=lambda v: (dist.get(v, g.n + 1), -v))
    else:
        position = int(rng.integers(g.n))

    cops = [cop]
    robbers = [position]
    turns = 0
    captured = cop == position
    while not captured and turns <= g.n:
        # cop == F_k(robber); drop to the lowest level that still holds
        while k > 0 and _shadow(steps, k - 1, position) == cop:
            k -= 1
        options = [u for u in (position,) + g.neighbors[position] if u != cop]
        if options:
            if robber == "greedy":
                dist = g.distances_from(cop)
                position = max(options, key=lambda u: (dist.get(u, g.n + 1), -u))
            else:
                position = int(options[rng.integers(len(options))])
        robbers.append(position)

        if (g.bits[cop] >> position) & 1:
            cop = position
        else:
            k = max(k - 1, 0)
            target = _shadow(steps, k, position)
            if target != cop and not (g.bits[cop] >> target) & 1:
                raise PursuitError(f"retract strategy broke: cop at {cop} cannot reach shadow {target}")
            cop = target
        cops.append(cop)
        turns += 1
        captured = cop == position

    logger.debug(f"Pursuit on {g.n} vertices vs {robber} robber: captured={captured} in {turns} moves")
    return PursuitTranscript(cop_moves=cops, robber_moves=robbers, captured=captured, turns=turns)

"""
Clique (flag) complexes and their GF(2) homology.

Homology here is a necessary-condition oracle: a profile that is not point-like
refutes contractibility, a point-like one proves nothing. Chains are Python
ints used as bit vectors over GF(2).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

from .errors import ComplexBudgetError
from .proximity import Graph, bits_of

logger = logging.getLogger(__name__)

DEFAULT_SIMPLEX_BUDGET = 10_000_000

Simplex = Tuple[int, ...]


@dataclass
class CliqueComplex:
    """All cliques of G with at most dim_cap + 1 vertices, per dimension.

    ``simplices[k]`` lists the k-simplices as ascending vertex tuples in
    lexicographic order.
    """
    graph: Graph = field(repr=False)
    dim_cap: int
    simplices: List[List[Simplex]]
    truncated: bool = False

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    @property
    def euler(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts))

    @property
    def size(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class BettiProfile:
    betti: Tuple[int, ...]
    euler: int
    truncated: bool
    top_betti: Optional[int] = None
    counts: Tuple[int, ...] = ()

    @property
    def dim_cap(self) -> int:
        return len(self.betti)

    def full(self) -> Tuple[int, ...]:
        """b_0..b_{dim_cap-1}, plus b_{dim_cap} when it is known."""
        return self.betti + (() if self.top_betti is None else (self.top_betti,))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "betti": {str(k): b for k, b in enumerate(self.betti)},
            "top_betti": self.top_betti,
            "counts": {str(k): c for k, c in enumerate(self.counts)},
            "euler": self.euler,
            "truncated": self.truncated,
        }


def enumerate_complex(graph: Graph, dim_cap: int,
                      budget: int = DEFAULT_SIMPLEX_BUDGET) -> CliqueComplex:
    """Enumerate cliques of size <= dim_cap + 1 by ordered expansion.

    Each clique is extended only by common neighbours with a larger id, so
    every simplex is produced once. ``truncated`` is set when some clique
    of size dim_cap + 1 still has a common higher neighbour.
    """
    if dim_cap < 0:
        raise ValueError(f"dim_cap must be >= 0, got {dim_cap}")
    simplices: List[List[Simplex]] = [[] for _ in range(dim_cap + 1)]
    higher = [graph.bits[v] >> (v + 1) << (v + 1) for v in range(graph.n)]
    total = 0
    truncated = False

    stack: List[Tuple[Simplex, int]] = [((v,), higher[v]) for v in reversed(range(graph.n))]
    while stack:
        clique, candidates = stack.pop()
        k = len(clique) - 1
        simplices[k].append(clique)
        total += 1
        if total > budget:
            counts = [len(s) for s in simplices]
            raise ComplexBudgetError(
                f"clique enumeration exceeded the budget of {budget} simplices (dim_cap={dim_cap})",
                counts)
        if k == dim_cap:
            if candidates:
                truncated = True
            continue
        # push in reverse so the lowest extension is expanded first
        for u in reversed(list(bits_of(candidates))):
            stack.append((clique + (u,), candidates & higher[u]))

    logger.debug(f"Enumerated clique complex: counts={[len(s) for s in simplices]}, truncated={truncated}")
    return CliqueComplex(graph=graph, dim_cap=dim_cap, simplices=simplices, truncated=truncated)


def gf2_rank(columns: Iterable[int]) -> int:
    """Rank over GF(2) of the matrix whose columns are the given bit vectors."""
    pivots: Dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            top = col.bit_length() - 1
            pivot = pivots.get(top)
            if pivot is None:
                pivots[top] = col
                rank += 1
                break
            col ^= pivot
    return rank


def boundary_columns(faces: List[Simplex], cofaces: List[Simplex]) -> Iterator[int]:
    index = {s: i for i, s in enumerate(faces)}
    for simplex in cofaces:
        col = 0
        for drop in range(len(simplex)):
            col |= 1 << index[simplex[:drop] + simplex[drop + 1:]]
        yield col


def betti(cx: CliqueComplex) -> BettiProfile:
    """b_k = dim ker d_k - rank d_{k+1} over GF(2) for k < dim_cap.

    b_{dim_cap} is reported as ``top_betti`` only when the enumeration was
    not truncated, i.e. when no simplices exist above dim_cap.
    """
    counts = cx.counts
    ranks = [0] * (cx.dim_cap + 2)
    for k in range(1, cx.dim_cap + 1):
        ranks[k] = gf2_rank(boundary_columns(cx.simplices[k - 1], cx.simplices[k]))
    values = [counts[k] - ranks[k] - ranks[k + 1] for k in range(cx.dim_cap + 1)]
    top = None if cx.truncated else values[cx.dim_cap]
    return BettiProfile(betti=tuple(values[:cx.dim_cap]), euler=cx.euler,
                        truncated=cx.truncated, top_betti=top, counts=counts)


def is_point_like(profile: BettiProfile) -> bool:
    values = profile.full()
    if not values or values[0] != 1:
        return False
    if any(values[1:]):
        return False
    if not profile.truncated and profile.euler != 1:
        return False
    return True


def betti_of_graph(graph: Graph, dim_cap: int, budget: int = DEFAULT_SIMPLEX_BUDGET,
                   reduce: bool = True) -> BettiProfile:
    """Betti profile of K(graph).

    With ``reduce`` the graph is first dismantled and the homology is taken
    on the residual core; deleting a dominated vertex does not change the
    homotopy type of the clique complex, so the Betti numbers agree. Counts
    and Euler characteristic then describe the core.
    """
    target = graph
    if reduce and graph.n > 0:
        from .dismantle import core_graph, dismantle

        record = dismantle(graph)
        target = core_graph(graph, record)
        logger.debug(f"Homology on dismantling core: {graph.n} -> {target.n} vertices")
    return betti(enumerate_complex(target, dim_cap, budget))


def maximal_cliques(graph: Graph, vertices: Optional[Iterable[int]] = None) -> Iterator[Simplex]:
    """Maximal cliques of the subgraph induced on ``vertices`` (default: all).

    Bron-Kerbosch with pivoting on bitsets; cliques come out as ascending tuples.
    """
    if vertices is None:
        start = graph.all_mask
    else:
        start = 0
        for v in vertices:
            start |= 1 << v
    stack: List[Tuple[int, int, int]] = [(0, start, 0)]
    while stack:
        chosen, candidates, excluded = stack.pop()
        if not candidates:
            if not excluded and chosen:
                yield tuple(bits_of(chosen))
            continue
        pivot = max(bits_of(candidates | excluded),
                    key=lambda w: bin(candidates & graph.bits[w]).count("1"))
        for v in bits_of(candidates & ~graph.bits[pivot]):
            nb = graph.bits[v]
            stack.append((chosen | (1 << v), candidates & nb, excluded & nb))
            candidates &= ~(1 << v)
            excluded |= 1 << v

"""
Tests for dominated-vertex dismantling, certificates and the pursuit game.
"""

import networkx as nx
import numpy as np
import pytest

from ripslab.complex import betti, betti_of_graph, enumerate_complex, is_point_like, maximal_cliques
from ripslab.dismantle import (CERTIFIED, INCONCLUSIVE, REFUTED, EliminationRecord, anchored_chain,
                               certify_contractible, core_graph, dismantle, is_copwin, pursue, replay)
from ripslab.domains import DensitySpec, make_domain, sample
from ripslab.errors import PursuitError
from ripslab.proximity import Graph, build_graph


def from_nx(g):
    return Graph.from_networkx(g)


def random_tree(n, seed):
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, [(v, int(rng.integers(v))) for v in range(1, n)])


def geometric_graphs(count, n, r, seed=0):
    domain = make_domain("box", 2)
    density = DensitySpec.uniform(domain)
    return [build_graph(sample(domain, density, n, seed=seed + i), r) for i in range(count)]


@pytest.fixture
def cross_polytope_3sphere():
    # boundary of the 4-dimensional cross-polytope: a flag triangulation of S^3
    return from_nx(nx.complete_multipartite_graph(2, 2, 2, 2))


def test_complete_graph_dismantles():
    record = dismantle(from_nx(nx.complete_graph(6)))
    assert record.complete
    assert len(record.steps) == 5


def test_four_cycle_does_not_dismantle():
    record = dismantle(from_nx(nx.cycle_graph(4)))
    assert not record.complete
    assert record.residual == (0, 1, 2, 3)
    assert record.steps == []


def test_path_dismantles():
    record = dismantle(from_nx(nx.path_graph(5)))
    assert record.complete
    assert replay(from_nx(nx.path_graph(5)), record)


def test_empty_and_isolated_vertices():
    with pytest.raises(ValueError):
        dismantle(Graph(0, []))
    assert dismantle(Graph(1, [[]])).complete
    assert not dismantle(Graph(2, [[], []])).complete


@pytest.mark.parametrize("seed", range(50))
def test_trees_are_copwin(seed):
    assert is_copwin(random_tree(2 + seed % 20, seed))


def test_large_radius_gives_copwin():
    domain = make_domain("box", 2)
    cloud = sample(domain, DensitySpec.uniform(domain), 25, seed=1)
    assert is_copwin(build_graph(cloud, domain.diameter))


def test_replay_detects_tampering():
    g = from_nx(nx.path_graph(4))
    record = dismantle(g)
    assert replay(g, record)
    v, w = record.steps[0]
    bad = EliminationRecord(n=g.n, steps=[(v, (w + 2) % g.n)] + record.steps[1:], residual=record.residual)
    assert not replay(g, bad)
    stopped_early = EliminationRecord(n=g.n, steps=record.steps[:1],
                                      residual=tuple(u for u in range(g.n) if u != v))
    assert not replay(g, stopped_early)


def test_record_json_round_trip():
    record = dismantle(from_nx(nx.path_graph(6)))
    again = EliminationRecord.from_json(record.to_json())
    assert again == record
    assert again.complete


def test_confluence_over_random_orders():
    graphs = [from_nx(nx.gnp_random_graph(14, p, seed=s)) for s, p in enumerate(np.linspace(0.2, 0.8, 25))]
    graphs += geometric_graphs(25, 40, 0.3)
    for g in graphs:
        verdict = dismantle(g).complete
        for seed in range(20):
            record = dismantle(g, seed=seed)
            assert record.complete == verdict
            assert replay(g, record)


def test_complete_record_implies_point_like_homology():
    checked = 0
    for g in geometric_graphs(30, 20, 0.4, seed=100):
        if dismantle(g).complete:
            assert is_point_like(betti_of_graph(g, 4, reduce=False))
            checked += 1
    assert checked > 0


def test_each_deletion_preserves_betti_numbers():
    for g in geometric_graphs(5, 18, 0.4, seed=200) + [from_nx(nx.path_graph(5))]:
        record = dismantle(g)
        cap = max(len(c) for c in maximal_cliques(g)) - 1
        alive = list(range(g.n))
        before = betti(enumerate_complex(g, cap)).full()
        for v, _ in record.steps:
            alive.remove(v)
            sub, _ = g.induced(alive)
            after = betti(enumerate_complex(sub, cap)).full()
            assert after == before


def test_core_graph_has_no_dominated_vertex():
    g = from_nx(nx.cycle_graph(5))
    g_with_tail = Graph.from_edges(6, list(g.edges()) + [(0, 5)])
    record = dismantle(g_with_tail)
    core = core_graph(g_with_tail, record)
    assert core == g
    assert not dismantle(core).steps


def test_certificates(cross_polytope_3sphere):
    k10 = from_nx(nx.complete_graph(10))
    assert certify_contractible(dismantle(k10), k10).verdict == CERTIFIED

    c4 = from_nx(nx.cycle_graph(4))
    cert = certify_contractible(dismantle(c4), c4)
    assert cert.verdict == REFUTED
    assert cert.evidence["profile"]["betti"]["1"] == 1

    sphere = cross_polytope_3sphere
    record = dismantle(sphere)
    assert not record.complete
    # point-like up to the cap, the 3-sphere is only seen by b_3
    assert certify_contractible(record, sphere, dim_cap=2).verdict == INCONCLUSIVE
    assert certify_contractible(record, sphere, dim_cap=3).verdict == REFUTED


@pytest.mark.parametrize("length", [5, 6])
def test_longer_cycles_are_refuted(length):
    cycle = from_nx(nx.cycle_graph(length))
    cert = certify_contractible(dismantle(cycle), cycle)
    assert cert.verdict == REFUTED
    assert cert.evidence["core_size"] == length
    assert cert.evidence["profile"]["betti"] == {"0": 1, "1": 1, "2": 0}


def test_disconnected_core_is_refuted_without_homology():
    g = from_nx(nx.disjoint_union(nx.path_graph(3), nx.complete_graph(4)))
    record = dismantle(g)
    cert = certify_contractible(record, g, oracle_budget=1)
    assert cert.verdict == REFUTED
    assert cert.evidence == {"reason": "disconnected core", "core_size": 2, "b0": 2}


def test_certificate_over_budget():
    octahedron = from_nx(nx.complete_multipartite_graph(2, 2, 2))
    cert = certify_contractible(dismantle(octahedron), octahedron, oracle_budget=5)
    assert cert.verdict == INCONCLUSIVE
    assert cert.evidence["reason"] == "homology budget exceeded"
    assert sum(cert.evidence["partial_counts"]) == 6


def test_anchored_chain():
    path = from_nx(nx.path_graph(4))
    assert anchored_chain(path, [0, 1, 2, 3]) == (True, [])
    ok, failures = anchored_chain(from_nx(nx.cycle_graph(4)), [0, 1, 3, 2])
    assert not ok
    assert failures == [2]


def _assert_legal(g, transcript):
    for a, b in zip(transcript.cop_moves, transcript.cop_moves[1:]):
        assert a == b or b in g.neighbors[a]
    for a, b in zip(transcript.robber_moves, transcript.robber_moves[1:]):
        assert a == b or b in g.neighbors[a]


def test_pursuit_on_k2():
    g = from_nx(nx.complete_graph(2))
    for start in (0, 1):
        transcript = pursue(g, dismantle(g), robber_start=start)
        assert transcript.captured
        assert transcript.turns <= 1


def test_pursuit_on_star():
    g = from_nx(nx.star_graph(5))
    # leaves first, so the cop starts on the centre
    record = EliminationRecord(n=6, steps=[(v, 0) for v in range(1, 6)], residual=(0,))
    assert replay(g, record)
    for robber in ("greedy", "random"):
        transcript = pursue(g, record, robber=robber, seed=3)
        assert transcript.cop_moves[0] == 0
        assert transcript.captured
        assert transcript.turns <= 1


def test_pursuit_captures_on_random_copwin_graphs():
    runs = 0
    for g in geometric_graphs(100, 30, 0.45, seed=300):
        record = dismantle(g)
        if not record.complete:
            continue
        for robber in ("greedy", "random"):
            transcript = pursue(g, record, robber=robber, seed=runs)
            assert transcript.captured
            assert transcript.turns <= g.n
            _assert_legal(g, transcript)
            runs += 1
    assert runs > 0


@pytest.mark.parametrize("seed", range(10))
def test_pursuit_on_trees(seed):
    g = random_tree(25, seed)
    transcript = pursue(g, dismantle(g), robber="random", seed=seed)
    assert transcript.captured
    assert transcript.turns <= g.n
    _assert_legal(g, transcript)


def test_pursuit_errors():
    c4 = from_nx(nx.cycle_graph(4))
    with pytest.raises(PursuitError):
        pursue(c4, dismantle(c4))
    k3 = from_nx(nx.complete_graph(3))
    with pytest.raises(PursuitError):
        pursue(k3, dismantle(k3), robber="teleporting")
    with pytest.raises(IndexError):
        pursue(k3, dismantle(k3), robber_start=7)

from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, settings

from conftest import graphs
from hamspan import graph as G
from hamspan.checkers import (
    SplitError,
    check_edge_distribution,
    expansion_slack,
    check_property_P,
    degree_split,
    greedy_robust_neighbourhood,
    is_c_expander,
    min_robust_neighbourhood,
    pair_deviation_slack,
    path_neighbour_bound,
    path_vertex_cap,
    robust_diameter,
    set_deviation_slack,
    split_conditions_hold,
)
from hamspan.graph import Graph, vertex_mask
from hamspan.models import sample_regular
from oracles import adjacency, expander_verdict, min_robust_neighbourhood as brute_robust, neighbourhood


def test_edge_distribution_k4():
    rep = check_edge_distribution(G.complete_graph(4), "exhaustive")
    assert rep.mode == "exhaustive" and rep.holds and rep.margin >= 0


def test_empty_sets_have_zero_deviation():
    g = G.petersen_graph()
    assert pair_deviation_slack(g, 3, 0, 0) == 0
    assert set_deviation_slack(g, 3, 0) == 0


def test_edge_distribution_witness_recheck():
    # with constant 0 almost any pair deviates; the witness must reproduce the margin
    g = sample_regular(10, 3, 1)
    rep = check_edge_distribution(g, "exhaustive", constant=0.0)
    assert not rep.holds
    w = rep.witness
    if w["part"] == "pair":
        slack = pair_deviation_slack(g, 3, vertex_mask(w["A"]), vertex_mask(w["B"]), 0.0)
    else:
        slack = set_deviation_slack(g, 3, vertex_mask(w["A"]), 0.0)
    assert slack == pytest.approx(rep.margin)


def test_edge_distribution_sampled_large():
    g = sample_regular(200, 8, 0)
    rep = check_edge_distribution(g, "sampled", samples=2000, seed=1)
    assert rep.mode == "sampled" and rep.holds


def test_edge_distribution_gnp_form():
    g = G.complete_graph(8)
    rep = check_edge_distribution(g, "exhaustive", form="gnp", alpha=0.25, beta=0.25, c=0.4)
    assert rep.holds and rep.margin == pytest.approx(4 - 3.2, abs=1e-9)
    two = G.disjoint_union(G.complete_graph(4), G.complete_graph(4))
    rep = check_edge_distribution(two, "exhaustive", form="gnp", alpha=0.5, beta=0.5, c=0.0)
    assert not rep.holds
    a, b = set(rep.witness["A"]), set(rep.witness["B"])
    assert not any((u in a and v in b) or (u in b and v in a) for u, v in two.edges)
    with pytest.raises(ValueError):
        check_edge_distribution(two, form="gnp")
    with pytest.raises(ValueError):
        check_edge_distribution(G.path_graph(4))


def test_complete_graph_singletons_expand():
    for n in (4, 6, 7):
        g = G.complete_graph(n)
        for c in (0.5, 1, 2, n - 1):
            assert all(expansion_slack(g, 1 << v, c) >= 0 for v in range(n))
            assert is_c_expander(g, c, "exhaustive").holds == expander_verdict(n, g.edges, c)
    assert is_c_expander(G.complete_graph(7), 6, "exhaustive").holds


def test_two_cliques_violate_large_set_condition():
    g = G.disjoint_union(G.complete_graph(8), G.complete_graph(8))
    rep = is_c_expander(g, 3, "exhaustive")
    assert not rep.holds and rep.witness["part"] == "E2"
    x, y = set(rep.witness["X"]), set(rep.witness["Y"])
    assert not any((u in x and v in y) or (u in y and v in x) for u, v in g.edges)
    assert is_c_expander(g, 3, "sampled", samples=200).verdict == "violated"


@settings(max_examples=40)
@given(graphs(min_n=1, max_n=9))
def test_expander_matches_brute_force(g):
    for c in (0.5, 1.0, 1.5, 2.5):
        assert is_c_expander(g, c, "exhaustive").holds == expander_verdict(g.n, g.edges, c)


def test_expander_on_random_regular_is_stable():
    verdicts = [is_c_expander(sample_regular(14, 6, s), 2, "exhaustive").holds for s in range(20)]
    again = [is_c_expander(sample_regular(14, 6, s), 2, "exhaustive").holds for s in range(20)]
    assert verdicts == again


def test_robust_diameter_examples():
    k5 = G.complete_graph(5)
    rep = robust_diameter(k5, k5.all_edges_mask(), 0, 1)
    assert rep.holds and rep.margin == 0
    p = G.path_graph(6)
    rep = robust_diameter(p, p.all_edges_mask(), 0, 4)
    assert not rep.holds
    assert {rep.witness["x"], rep.witness["y"]} == {0, 5}


def test_robust_diameter_random():
    g = sample_regular(100, 10, 2)
    rng = __import__("random").Random(0)
    r = 0
    for v in range(g.n):
        star = [i for i in range(g.m) if (g.star_mask[v] >> i) & 1]
        for i in rng.sample(star, 5):
            r |= 1 << i
    bound = 10 * math.log(100) / math.log(10)
    rep = robust_diameter(g, r, 5, bound, "sampled", samples=100, seed=3)
    assert rep.holds and rep.details["sets_checked"] == 100
    assert "half_degree" in rep.details


def test_degree_split_complete_graph():
    g = G.complete_graph(6)
    s = degree_split(g, range(6), 3, 3)
    assert split_conditions_hold(g, vertex_mask(range(6)), vertex_mask(s.a), vertex_mask(s.b), 3, 3)
    assert s.tries == 1


def test_degree_split_rejects_bad_sizes():
    g = G.complete_graph(6)
    with pytest.raises(ValueError):
        degree_split(g, range(6), 6, 0)
    with pytest.raises(ValueError):
        degree_split(g, range(6), 2, 2)


def test_degree_split_failure_is_reported():
    # the leaf of a star sees only the centre, so one side always misses it
    g = G.star_graph(5)
    with pytest.raises(SplitError) as exc:
        degree_split(g, range(6), 3, 3, max_tries=20)
    assert exc.value.worst_vertex is not None


def test_degree_split_random_regular():
    g = sample_regular(60, 12, 4)
    cycle = list(range(10))
    y = vertex_mask(range(10, 60))
    s = degree_split(g, y, 30, 20, seed=1)
    a, b = vertex_mask(s.a), vertex_mask(s.b)
    assert a | b == y and not a & b and len(s.a) == 30
    for v in range(60):
        dy = (g.adj_mask[v] & y).bit_count()
        assert (g.adj_mask[v] & a).bit_count() >= 30 / (3 * 50) * dy
        assert (g.adj_mask[v] & b).bit_count() >= 20 / (3 * 50) * dy
    assert min(s.margins) >= 0
    del cycle


def test_robust_neighbourhood_examples():
    k10 = G.complete_graph(10)
    size, f = min_robust_neighbourhood(k10, 1, 0.0)
    assert size == 9 and f == []
    for d_prime in range(1, 5):
        assert check_property_P(k10, 0.0, 1, d_prime, "exhaustive").holds
    # alpha = 0 is plain expansion
    g = sample_regular(10, 3, 0)
    adj = adjacency(g.n, g.edges)
    for xs in itertools.combinations(range(10), 2):
        assert min_robust_neighbourhood(g, vertex_mask(xs), 0.0)[0] == len(neighbourhood(adj, xs))


@settings(max_examples=30)
@given(graphs(min_n=2, max_n=8, p=0.6))
def test_robust_neighbourhood_matches_brute_force(g):
    for alpha in (0.0, 0.34, 0.5, 0.75):
        for size in (1, 2, 3):
            for xs in itertools.combinations(range(g.n), size):
                want = brute_robust(g.n, g.edges, xs, alpha)
                got, f = min_robust_neighbourhood(g, vertex_mask(xs), alpha)
                assert got == want
                assert greedy_robust_neighbourhood(g, vertex_mask(xs), alpha)[0] >= got
                # the returned F respects every vertex budget
                for x in xs:
                    assert sum(1 for u, _ in f if u == x) <= math.floor(alpha * g.degrees()[x] + 1e-9)
                break


def test_property_P_sampled():
    g = sample_regular(80, 10, 0)
    rep = check_property_P(g, 0.1, 3, 1.0, "sampled", samples=300)
    assert rep.mode == "sampled" and rep.verdict in ("holds", "violated")
    with pytest.raises(ValueError):
        check_property_P(g, 1.0, 3, 1.0)


def test_path_neighbour_examples():
    k5 = G.complete_graph(5)
    assert path_vertex_cap(k5) == 1
    assert path_neighbour_bound(k5).holds
    edge = Graph(2, [(0, 1)])
    assert path_neighbour_bound(edge, max_vertices=2).holds
    k6 = G.complete_graph(6)
    rep = path_neighbour_bound(k6, max_vertices=5)
    assert not rep.holds and rep.witness["deg_into_path"] == 5 and not rep.witness["on_path"]


def test_path_neighbour_sampled():
    g = sample_regular(2000, 20, 0)
    rep = path_neighbour_bound(g, "sampled", samples=300)
    assert rep.details["cap"] == 2 and rep.trials == 300


@pytest.mark.parametrize("size", [5, 6])
def test_two_equal_cliques_violate_for_every_c_at_least_one(size):
    g = G.disjoint_union(G.complete_graph(size), G.complete_graph(size))
    for c in (1, 1.25, 2, 3, size - 1):
        assert is_c_expander(g, c, "exhaustive").verdict == "violated"


@settings(max_examples=25)
@given(graphs(min_n=3, max_n=12, p=0.4))
def test_property_P_without_removals_is_plain_expansion(g):
    adj = adjacency(g.n, g.edges)
    for d_prime in (0.5, 1.0):
        expect = all(
            len(neighbourhood(adj, xs)) >= 2 * d_prime * size
            for size in (1, 2)
            for xs in itertools.combinations(range(g.n), size)
        )
        assert check_property_P(g, 0.0, 2, d_prime, "exhaustive").holds == expect


def test_property_P_witness_rechecks():
    g = sample_regular(10, 4, 3)
    rep = check_property_P(g, 0.5, 2, 2.0, "exhaustive")
    assert rep.verdict == "violated"
    xs, f = rep.witness["X"], {frozenset(e) for e in rep.witness["F"]}
    for x in xs:
        assert sum(1 for e in f if x in e) <= math.floor(0.5 * 4)
    adj = adjacency(g.n, g.edges)
    left = {w for x in xs for w in adj[x] if frozenset((x, w)) not in f} - set(xs)
    assert len(left) - 2 * 2.0 * len(xs) == rep.margin


def test_robust_diameter_witness_rechecks():
    g = sample_regular(12, 3, 5)
    rep = robust_diameter(g, g.all_edges_mask(), 1, 2)
    assert rep.verdict == "violated"
    s, x, y = set(rep.witness["S"]), rep.witness["x"], rep.witness["y"]
    dist = G.distance(g, x, y, forbidden=s) if y is not None else None
    assert dist is None or dist > 2

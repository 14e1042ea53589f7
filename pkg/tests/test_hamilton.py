from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given

from conftest import graphs
from hamspan import graph as G
from hamspan.graph import Cycle
from hamspan.hamilton import (
    HamiltonBudget,
    Status,
    canonical_cycle,
    enumerate_hamilton_cycles,
    enumerate_k_cycles,
    hamilton_cycles,
    hamilton_path_between,
    is_hamilton_connected,
    random_hamilton_cycle,
)
from hamspan.models import make_rng, sample_regular
from oracles import all_cycles, hamilton_cycles as brute_cycles, hamilton_path_exists

BIG = HamiltonBudget()


def test_budget_validation():
    with pytest.raises(ValueError):
        HamiltonBudget(max_nodes_expanded=0)
    with pytest.raises(ValueError):
        HamiltonBudget(time_limit=-1)


def test_counts_on_named_graphs():
    assert len(hamilton_cycles(G.cycle_graph(5))[0]) == 1
    assert len(hamilton_cycles(G.complete_graph(5))[0]) == 12
    assert len(hamilton_cycles(G.complete_bipartite(3, 3))[0]) == 6
    cycles, complete = hamilton_cycles(G.petersen_graph())
    assert cycles == [] and complete


def test_canonical_form_and_validity():
    g = G.complete_graph(6)
    cycles, complete = hamilton_cycles(g)
    assert complete and len(cycles) == 60
    masks = set()
    for c in cycles:
        assert c[0] == 0 and c[1] < c[-1]
        assert canonical_cycle(c) == c
        masks.add(Cycle.of(g, c).edges)
    assert len(masks) == len(cycles)


def test_budget_trips_cleanly():
    stream = enumerate_hamilton_cycles(G.complete_graph(9), HamiltonBudget(max_nodes_expanded=50))
    got = list(stream)
    assert not stream.complete
    assert len(got) < 20160
    stream = enumerate_hamilton_cycles(G.complete_graph(7), HamiltonBudget(max_cycles=5))
    assert len(list(stream)) == 5 and not stream.complete


@given(graphs(min_n=3, max_n=8))
def test_enumeration_matches_brute_force(g):
    cycles, complete = hamilton_cycles(g)
    assert complete
    got = {frozenset(frozenset(p) for p in g.edges_of(Cycle.of(g, c).edges)) for c in cycles}
    assert len(got) == len(cycles)
    assert got == set(brute_cycles(g.n, g.edges))


@given(graphs(min_n=3, max_n=7))
def test_k_cycles_match_brute_force(g):
    by_len = {}
    for c in all_cycles(g.n, g.edges):
        by_len.setdefault(len(c), set()).add(frozenset(frozenset((c[i], c[(i + 1) % len(c)])) for i in range(len(c))))
    for k in range(3, g.n + 1):
        stream = enumerate_k_cycles(g, k, BIG)
        got = [frozenset(frozenset(p) for p in g.edges_of(g.cycle_mask(c))) for c in stream]
        assert stream.complete
        assert len(got) == len(set(got))
        assert set(got) == by_len.get(k, set())


def test_path_examples():
    p = G.path_graph(4)
    out = hamilton_path_between(p, 0, 3, BIG)
    assert out.found and out.payload.vertices == (0, 1, 2, 3)
    k4 = G.complete_graph(4)
    for x, y in itertools.combinations(range(4), 2):
        out = hamilton_path_between(k4, x, y, BIG)
        assert out.found and out.payload.vertices[0] == x and out.payload.vertices[-1] == y
    out = hamilton_path_between(p, 0, 2, BIG)
    assert out.status is Status.EXHAUSTED_NONE
    with pytest.raises(ValueError):
        hamilton_path_between(p, 1, 1, BIG)


@given(graphs(min_n=2, max_n=8))
def test_exact_path_search_matches_brute_force(g):
    rng = random.Random(g.m)
    pairs = list(itertools.combinations(range(g.n), 2))
    for x, y in rng.sample(pairs, min(4, len(pairs))):
        for frac in (0.0, 0.3):
            out = hamilton_path_between(g, x, y, BIG, heuristic_fraction=frac)
            assert out.status is not Status.BUDGET_EXCEEDED
            assert out.found == hamilton_path_exists(g.n, g.edges, x, y)
            if out.found:
                vs = out.payload.vertices
                assert (vs[0], vs[-1]) == (x, y) and sorted(vs) == list(range(g.n))


def test_exact_path_search_n10_sample():
    # a few n = 10 instances against permutation brute force
    for seed in range(3):
        g = sample_regular(10, 3, seed)
        for x, y in [(0, 1), (2, 7), (4, 9)]:
            out = hamilton_path_between(g, x, y, BIG, heuristic_fraction=0.0)
            assert out.found == hamilton_path_exists(g.n, g.edges, x, y)


def test_paths_in_random_expanders():
    g = sample_regular(40, 8, 5)
    rng = random.Random(0)
    for _ in range(100):
        x, y = rng.sample(range(40), 2)
        out = hamilton_path_between(g, x, y, BIG, seed=x * 41 + y)
        assert out.found
        assert sorted(out.payload.vertices) == list(range(40))


def test_hamilton_connected_examples():
    assert is_hamilton_connected(G.complete_graph(4), BIG).status == "yes"
    res = is_hamilton_connected(G.complete_bipartite(3, 3), BIG)
    assert res.status == "no"
    x, y = res.pair
    assert (x < 3) == (y < 3)  # same side
    c5 = is_hamilton_connected(G.cycle_graph(5), BIG)
    assert c5.status == "no"
    assert not hamilton_path_exists(5, G.cycle_graph(5).edges, *c5.pair)


def test_random_hamilton_cycle_is_valid():
    g = sample_regular(30, 6, 1)
    rng = make_rng(9)
    c = random_hamilton_cycle(g, rng)
    assert c is not None
    Cycle.of(g, c)
    assert len(c) == 30
    assert random_hamilton_cycle(G.petersen_graph(), rng, 5000) is None

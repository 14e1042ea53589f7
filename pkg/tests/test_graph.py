from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given

from conftest import graphs
from hamspan import graph as G
from hamspan.graph import Cycle, EdgeSet, Graph, GraphFormatError, Path
from oracles import components_count


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_rejects_loops_and_duplicates():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(2, [(0, 2)])


def test_degree_examples():
    tri = G.complete_graph(3)
    assert all(G.deg(tri, v) == 2 for v in range(3))
    star = G.star_graph(4)
    assert G.deg(star, 0) == 4 and all(G.deg(star, v) == 1 for v in range(1, 5))
    pet = G.petersen_graph()
    assert pet.is_regular(3) and pet.m == 15
    assert G.deg_into(pet, 0, G.neighbours(pet, 0)) == 3
    with pytest.raises(IndexError):
        G.deg(tri, 3)


def test_distance_examples():
    p = G.path_graph(4)
    assert G.distance(p, 2, 2) == 0
    assert G.distance(p, 0, 3) == 3
    assert G.distance(p, 0, 3, forbidden=[1]) is None
    pet = G.petersen_graph()
    assert max(G.distance(pet, x, y) for x in range(10) for y in range(10)) == 2


def test_components_and_bipartite():
    a, b = G.is_bipartite(G.cycle_graph(6))
    assert len(a) == len(b) == 3
    assert G.is_bipartite(G.cycle_graph(5)) is None
    assert len(G.components(G.disjoint_union(G.complete_graph(3), G.complete_graph(3)))) == 2


def test_induced_delete_examples():
    k4 = G.complete_graph(4)
    same = G.induced_delete(k4, [])
    assert same.graph == k4 and same.to_parent_vertex == (0, 1, 2, 3)
    tri = G.induced_delete(k4, [2]).graph
    assert tri.n == 3 and tri.m == 3
    pet = G.petersen_graph()
    outer = [0, 1, 2, 3, 4]
    assert Cycle.of(pet, outer)
    rest = G.induced_delete(pet, outer).graph
    assert rest.is_regular(2) and rest.m == 5 and G.is_connected(rest)


def test_edge_counts_examples():
    c6 = G.cycle_graph(6)
    assert G.cut_edge_count(c6, []) == 0 and G.internal_edge_count(c6, []) == 0
    assert G.cut_edge_count(c6, [0, 2, 4]) == 6
    assert G.internal_edge_count(c6, [0, 2, 4]) == 0


def test_path_and_cycle_validation():
    g = G.cycle_graph(5)
    p = Path.of(g, [0, 1, 2])
    assert len(p) == 2 and p.edges.bit_count() == 2
    with pytest.raises(ValueError):
        Path.of(g, [0, 2])
    with pytest.raises(ValueError):
        Cycle.of(g, [0, 1, 2])
    assert len(Cycle.of(g, [0, 1, 2, 3, 4])) == 5


def test_edgeset_xor():
    g = G.complete_graph(4)
    a = EdgeSet.from_pairs(g, [(0, 1), (1, 2)])
    b = EdgeSet.from_pairs(g, [(1, 2), (2, 3)])
    assert sorted((a ^ b).pairs()) == [(0, 1), (2, 3)]
    assert (1, 0) in a and len(a) == 2


def test_text_format_round_trip_and_errors():
    g = G.petersen_graph()
    assert G.loads(G.dumps(g)) == g
    with pytest.raises(GraphFormatError, match="line 3"):
        G.loads("3 2\n0 1\n1 1\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        G.loads("3 2\n0 1\n1 0\n")
    with pytest.raises(GraphFormatError):
        G.loads("3 2\n0 1\n")


@given(graphs(max_n=9))
def test_handshake_and_cut_identity(g):
    assert sum(g.degrees()) == 2 * g.m
    for size in range(g.n + 1):
        for a in itertools.combinations(range(g.n), size):
            assert 2 * G.internal_edge_count(g, a) + G.cut_edge_count(g, a) == sum(G.deg(g, v) for v in a)
        if size >= 3:
            break


@given(graphs(max_n=9))
def test_counts_match_naive(g):
    a = set(range(0, g.n, 2))
    naive_cut = sum(1 for u, v in g.edges if (u in a) != (v in a))
    naive_int = sum(1 for u, v in g.edges if u in a and v in a)
    assert G.cut_edge_count(g, a) == naive_cut
    assert G.internal_edge_count(g, a) == naive_int
    assert G.cut_mask(g, a).bit_count() == naive_cut


@given(graphs(max_n=9))
def test_induced_delete_maps_back(g):
    remove = list(range(0, g.n, 3))
    sub = G.induced_delete(g, remove)
    for i, (u, v) in enumerate(sub.graph.edges):
        pu, pv = sub.to_parent_vertex[u], sub.to_parent_vertex[v]
        assert g.has_edge(pu, pv)
        assert g.edges[sub.to_parent_edge[i]] == (min(pu, pv), max(pu, pv))
    assert not set(sub.to_parent_vertex) & set(remove)


@given(graphs(max_n=9))
def test_agrees_with_networkx(g):
    h = to_nx(g)
    assert len(G.components(g)) == nx.number_connected_components(h) == components_count(g.n, g.edges)
    assert (G.is_bipartite(g) is not None) == nx.is_bipartite(h)
    expect = g.n >= 3 and nx.is_connected(h) and nx.is_biconnected(h)
    assert G.is_biconnected(g) == expect
    if g.n:
        d = nx.single_source_shortest_path_length(h, 0)
        for v in range(g.n):
            assert G.distance(g, 0, v) == d.get(v)


@given(graphs(max_n=9))
def test_two_colouring_is_proper(g):
    col = G.two_colouring(g)
    if col is not None:
        assert all(col[u] != col[v] for u, v in g.edges)

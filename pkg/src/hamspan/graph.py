"""Immutable simple graphs with stable edge indices.

Vertices are ``0..n-1``.  Edges are numbered in insertion order and an edge
subset is an integer bitmask over those numbers, which is exactly a GF(2)
vector of the edge space.  Neighbourhoods are kept both as sorted tuples and
as vertex bitmasks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from hamspan.gf2 import BitVector, iter_bits


class GraphFormatError(ValueError):
    pass


class Graph:
    __slots__ = ("n", "edges", "edge_index", "neighbours_sorted", "adj_mask", "star_mask")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()) -> None:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        norm: list[tuple[int, int]] = []
        index: dict[tuple[int, int], int] = {}
        adj = [0] * n
        star = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in index:
                raise ValueError(f"duplicate edge {e}")
            i = len(norm)
            index[e] = i
            norm.append(e)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            star[u] |= 1 << i
            star[v] |= 1 << i
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(norm)
        self.edge_index = index
        self.adj_mask: tuple[int, ...] = tuple(adj)
        self.star_mask: tuple[int, ...] = tuple(star)
        self.neighbours_sorted: tuple[tuple[int, ...], ...] = tuple(tuple(iter_bits(a)) for a in adj)

    def __setattr__(self, name, value):
        if hasattr(self, name):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adj_mask[u] >> v) & 1 == 1

    def index_of(self, u: int, v: int) -> int:
        return self.edge_index[(u, v) if u < v else (v, u)]

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj_mask]

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def is_regular(self, d: int | None = None) -> bool:
        degs = set(self.degrees())
        if d is None:
            return len(degs) <= 1
        return degs <= {d}

    def all_edges_mask(self) -> int:
        return (1 << self.m) - 1

    # -- conversion helpers between vertex sequences and edge masks ---------

    def path_mask(self, vertices: Sequence[int]) -> int:
        mask = 0
        for a, b in zip(vertices, vertices[1:]):
            mask |= 1 << self.index_of(a, b)
        return mask

    def cycle_mask(self, vertices: Sequence[int]) -> int:
        return self.path_mask(list(vertices) + [vertices[0]])

    def edges_of(self, mask: int) -> list[tuple[int, int]]:
        return [self.edges[i] for i in iter_bits(mask)]

    def mask_of(self, pairs: Iterable[tuple[int, int]]) -> int:
        mask = 0
        for u, v in pairs:
            mask |= 1 << self.index_of(u, v)
        return mask

    def edge_subgraph(self, mask: int) -> Graph:
        """Spanning subgraph with the given edges; edge order is preserved."""
        return Graph(self.n, self.edges_of(mask))


def vertex_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class EdgeSet:
    """A subset of E(G); symmetric difference is XOR of the masks."""

    graph: Graph
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.graph.m:
            raise ValueError("edge set refers to edges outside the graph")

    @classmethod
    def from_pairs(cls, g: Graph, pairs: Iterable[tuple[int, int]]) -> EdgeSet:
        return cls(g, g.mask_of(pairs))

    @classmethod
    def from_indices(cls, g: Graph, indices: Iterable[int]) -> EdgeSet:
        return cls(g, BitVector.from_indices(g.m, indices).bits)

    def __xor__(self, other: EdgeSet) -> EdgeSet:
        return EdgeSet(self.graph, self.bits ^ other.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, pair: tuple[int, int]) -> bool:
        e = self.graph.edge_index.get(tuple(sorted(pair)))
        return e is not None and (self.bits >> e) & 1 == 1

    @property
    def vector(self) -> BitVector:
        return BitVector(self.graph.m, self.bits)

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def pairs(self) -> list[tuple[int, int]]:
        return self.graph.edges_of(self.bits)


@dataclass(frozen=True)
class Path:
    vertices: tuple[int, ...]
    edges: int

    @classmethod
    def of(cls, g: Graph, vertices: Sequence[int]) -> Path:
        vs = tuple(vertices)
        if len(set(vs)) != len(vs):
            raise ValueError(f"path repeats a vertex: {vs}")
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                raise ValueError(f"path uses non-edge ({a}, {b})")
        return cls(vs, g.path_mask(vs))

    def __len__(self) -> int:
        """Number of edges."""
        return max(len(self.vertices) - 1, 0)


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]
    edges: int

    @classmethod
    def of(cls, g: Graph, vertices: Sequence[int]) -> Cycle:
        vs = tuple(vertices)
        if len(vs) < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        if len(set(vs)) != len(vs):
            raise ValueError(f"cycle repeats a vertex: {vs}")
        for a, b in zip(vs, vs[1:] + vs[:1]):
            if not g.has_edge(a, b):
                raise ValueError(f"cycle uses non-edge ({a}, {b})")
        return cls(vs, g.cycle_mask(vs))

    def __len__(self) -> int:
        return len(self.vertices)


# -- elementary queries ------------------------------------------------------


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range 0..{g.n - 1}")


def neighbours(g: Graph, v: int) -> frozenset[int]:
    _check_vertex(g, v)
    return frozenset(g.neighbours_sorted[v])


def deg(g: Graph, v: int) -> int:
    _check_vertex(g, v)
    return g.adj_mask[v].bit_count()


def deg_into(g: Graph, v: int, s: Iterable[int] | int) -> int:
    """``|N(v) ∩ S|``; ``S`` may be an iterable of vertices or a vertex bitmask."""
    _check_vertex(g, v)
    mask = s if isinstance(s, int) else vertex_mask(s)
    return (g.adj_mask[v] & mask).bit_count()


def bfs_path(g: Graph, x: int, y: int, forbidden: int = 0, edge_forbidden: int = 0) -> list[int] | None:
    """Shortest x-y path avoiding a vertex mask and an edge mask, or None."""
    if (forbidden >> x) & 1 or (forbidden >> y) & 1:
        raise ValueError("endpoints must not be forbidden")
    if x == y:
        return [x]
    parent = {x: -1}
    queue = deque([x])
    nbrs = g.neighbours_sorted
    index = g.edge_index
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if w in parent or (forbidden >> w) & 1:
                continue
            if edge_forbidden and (edge_forbidden >> index[(u, w) if u < w else (w, u)]) & 1:
                continue
            parent[w] = u
            if w == y:
                path = [y]
                while path[-1] != x:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(w)
    return None


def distance(g: Graph, x: int, y: int, forbidden: Iterable[int] = ()) -> int | None:
    """BFS distance in ``g - forbidden``; None when unreachable."""
    _check_vertex(g, x)
    _check_vertex(g, y)
    path = bfs_path(g, x, y, vertex_mask(forbidden))
    return None if path is None else len(path) - 1


def bfs_distances(g: Graph, source: int, allowed: int | None = None) -> dict[int, int]:
    if allowed is None:
        allowed = (1 << g.n) - 1
    dist = {source: 0}
    frontier = 1 << source
    seen = frontier
    level = 0
    adj = g.adj_mask
    while frontier:
        level += 1
        nxt = 0
        for u in iter_bits(frontier):
            nxt |= adj[u]
        nxt &= allowed & ~seen
        for w in iter_bits(nxt):
            dist[w] = level
        seen |= nxt
        frontier = nxt
    return dist


def component_mask(g: Graph, start: int, allowed: int) -> int:
    """Vertices reachable from ``start`` inside the vertex mask ``allowed``."""
    seen = frontier = 1 << start
    adj = g.adj_mask
    while frontier:
        nxt = 0
        for u in iter_bits(frontier):
            nxt |= adj[u]
        frontier = nxt & allowed & ~seen
        seen |= frontier
    return seen


def components(g: Graph) -> list[list[int]]:
    remaining = (1 << g.n) - 1
    out = []
    while remaining:
        start = (remaining & -remaining).bit_length() - 1
        comp = component_mask(g, start, remaining)
        out.append(list(iter_bits(comp)))
        remaining &= ~comp
    return out


def is_connected(g: Graph) -> bool:
    return len(components(g)) <= 1


def two_colouring(g: Graph) -> list[int] | None:
    """Colour per vertex (0/1, each component rooted at colour 0), or None if an odd cycle exists."""
    colour = [-1] * g.n
    for s in range(g.n):
        if colour[s] != -1:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbours_sorted[u]:
                if colour[w] == -1:
                    colour[w] = colour[u] ^ 1
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return None
    return colour


def is_bipartite(g: Graph) -> tuple[list[int], list[int]] | None:
    colour = two_colouring(g)
    if colour is None:
        return None
    a = [v for v in range(g.n) if colour[v] == 0]
    b = [v for v in range(g.n) if colour[v] == 1]
    return a, b


@dataclass(frozen=True)
class InducedSubgraph:
    """``g[V \\ remove]`` with index maps in both directions."""

    graph: Graph
    to_parent_vertex: tuple[int, ...]
    from_parent_vertex: dict[int, int]
    to_parent_edge: tuple[int, ...]

    def lift_vertices(self, vs: Iterable[int]) -> list[int]:
        return [self.to_parent_vertex[v] for v in vs]

    def lift_edges(self, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= 1 << self.to_parent_edge[i]
        return out


def induced_delete(g: Graph, remove: Iterable[int] | int) -> InducedSubgraph:
    rm = remove if isinstance(remove, int) else vertex_mask(remove)
    keep = [v for v in range(g.n) if not (rm >> v) & 1]
    fwd = {v: i for i, v in enumerate(keep)}
    edges = []
    parent_edges = []
    for idx, (u, v) in enumerate(g.edges):
        if u in fwd and v in fwd:
            edges.append((fwd[u], fwd[v]))
            parent_edges.append(idx)
    return InducedSubgraph(Graph(len(keep), edges), tuple(keep), fwd, tuple(parent_edges))


def induced_subgraph(g: Graph, keep: Iterable[int]) -> InducedSubgraph:
    km = vertex_mask(keep)
    return induced_delete(g, ((1 << g.n) - 1) & ~km)


def cut_edge_count(g: Graph, a: Iterable[int] | int) -> int:
    """``e_G(A, V \\ A)``."""
    am = a if isinstance(a, int) else vertex_mask(a)
    return sum((g.adj_mask[v] & ~am).bit_count() for v in iter_bits(am))


def internal_edge_count(g: Graph, a: Iterable[int] | int) -> int:
    """``e_G(A)``."""
    am = a if isinstance(a, int) else vertex_mask(a)
    return sum((g.adj_mask[v] & am).bit_count() for v in iter_bits(am)) // 2


def edges_between(g: Graph, a: int, b: int) -> int:
    """``e_G(A, B)`` for disjoint vertex masks."""
    return sum((g.adj_mask[v] & b).bit_count() for v in iter_bits(a))


def external_neighbourhood(g: Graph, x: int) -> int:
    """``N_G(X)`` as a vertex mask (neighbours outside X)."""
    out = 0
    for v in iter_bits(x):
        out |= g.adj_mask[v]
    return out & ~x


def cut_mask(g: Graph, a: Iterable[int] | int) -> int:
    """Edge mask of ``G[A, V \\ A]`` (the XOR of the stars of A)."""
    am = a if isinstance(a, int) else vertex_mask(a)
    out = 0
    for v in iter_bits(am):
        out ^= g.star_mask[v]
    return out


def is_biconnected(g: Graph) -> bool:
    """True iff g is connected, has at least 3 vertices and no cut vertex."""
    n = g.n
    if n < 3 or not is_connected(g):
        return False
    disc = [-1] * n
    low = [0] * n
    timer = 0
    root_children = 0
    # iterative Tarjan from vertex 0
    disc[0] = low[0] = 0
    timer = 1
    stack = [(0, -1, iter(g.neighbours_sorted[0]))]
    while stack:
        u, parent, it = stack[-1]
        advanced = False
        for w in it:
            if disc[w] == -1:
                disc[w] = low[w] = timer
                timer += 1
                if u == 0:
                    root_children += 1
                stack.append((w, u, iter(g.neighbours_sorted[w])))
                advanced = True
                break
            if w != parent:
                low[u] = min(low[u], disc[w])
        if advanced:
            continue
        stack.pop()
        if stack:
            p = stack[-1][0]
            low[p] = min(low[p], low[u])
            if p != 0 and low[u] >= disc[p]:
                return False
    return root_children <= 1


# -- text format --------------------------------------------------------------


def dumps(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; edge index = line order."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty graph file")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise GraphFormatError(f"line 1: expected 'n m', got {lines[0]!r}") from None
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header declares {m} edges but file has {len(lines) - 1}")
    seen: set[tuple[int, int]] = set()
    edges = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {ln!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: endpoint out of range 0..{n - 1}")
        if u == v:
            raise GraphFormatError(f"line {lineno}: loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((u, v))
    return Graph(n, edges)


def load(path) -> Graph:
    with open(path) as fh:
        return loads(fh.read())


def save(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(g))


# -- named graphs ---------------------------------------------------------------


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star_graph(leaves: int) -> Graph:
    return complete_bipartite(1, leaves)


def empty_graph(n: int) -> Graph:
    return Graph(n, [])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def disjoint_union(*gs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in gs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, edges)

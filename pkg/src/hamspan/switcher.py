"""Parity switchers: flip the R-parity of a Hamilton cycle.

Pipeline: find an even cycle C = (v_1..v_2k) with an odd number of R-edges,
join v_i to v_{2k-i+2} (i = 2..k) by vertex-disjoint connector paths, and take
W = C plus the connectors.  W has Hamilton v_1-v_{k+1} paths of both
R-parities; a Hamilton v_1-v_{k+1} path of the rest of the graph closes
either one into a Hamilton cycle, and picking the right one makes the total
R-count odd.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterator

from hamspan.checkers import SplitError, degree_split
from hamspan.gf2 import EchelonBasis, iter_bits
from hamspan.graph import Cycle, Graph, Path, bfs_path, induced_subgraph, vertex_mask
from hamspan.hamilton import HamiltonBudget, Status, enumerate_k_cycles, hamilton_path_between


class PreconditionError(ValueError):
    pass


class SwitcherError(RuntimeError):
    """Structural problem or a missing parity class while assembling W."""


class ConnectorError(RuntimeError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def length_bound(n: int, d: int, constant: float = 10.0) -> int:
    """Default ℓ = ceil(K log n / log d); odd cycles are searched up to length 2ℓ."""
    d = max(d, 2)
    return max(2, math.ceil(constant * math.log(max(n, 2)) / math.log(d)))


def r_parity(g: Graph, r_mask: int, vertices, closed: bool) -> int:
    mask = g.cycle_mask(vertices) if closed else g.path_mask(vertices)
    return (mask & r_mask).bit_count() & 1


# -- even cycles with an odd number of R-edges ----------------------------------------


def check_r_preconditions(g: Graph, r_mask: int) -> None:
    """Reject R outside E(G), R = E(G), or R equal to a cut G[A, B]."""
    full = g.all_edges_mask()
    if r_mask & ~full:
        raise PreconditionError("R contains indices outside E(G)")
    if r_mask == full:
        raise PreconditionError("R = E(G)")
    cut = EchelonBasis(g.m)
    for v in range(g.n):
        cut.insert(g.star_mask[v])
    if cut.contains(r_mask):
        raise PreconditionError("R is a cut G[A, B]")


def _r_adjacency(g: Graph, r_mask: int) -> list[int]:
    adj = [0] * g.n
    for i in iter_bits(r_mask):
        u, v = g.edges[i]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _bfs_tree(adj: list[int], source: int, forbidden: int = 0) -> tuple[dict[int, int], dict[int, int]]:
    parent = {source: -1}
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in iter_bits(adj[u] & ~forbidden):
            if w not in parent:
                parent[w] = u
                dist[w] = dist[u] + 1
                queue.append(w)
    return parent, dist


def _walk_back(parent: dict[int, int], v: int) -> list[int]:
    out = [v]
    while parent[out[-1]] != -1:
        out.append(parent[out[-1]])
    return out


def _path_to_targets(adj: list[int], source: int, targets: int, forbidden: int) -> list[int] | None:
    """Shortest path from source to the first target reached; inner vertices avoid targets."""
    if (targets >> source) & 1:
        return [source]
    parent = {source: -1}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in iter_bits(adj[u] & ~forbidden):
            if w in parent:
                continue
            parent[w] = u
            if (targets >> w) & 1:
                return _walk_back(parent, w)[::-1]
            queue.append(w)
    return None


def shortest_odd_cycle(adj: list[int]) -> list[int] | None:
    """Shortest odd cycle of the graph given by adjacency masks (BFS from every vertex)."""
    best: list[int] | None = None
    n = len(adj)
    for s in range(n):
        parent, dist = _bfs_tree(adj, s)
        for u in parent:
            for w in iter_bits(adj[u]):
                if u < w and dist.get(w) == dist[u]:
                    if best is not None and 2 * dist[u] + 1 >= len(best):
                        continue
                    pu, pw = _walk_back(parent, u), _walk_back(parent, w)
                    cyc = pu[::-1] + pw[:-1]  # s .. u, w .. (child of s)
                    if len(set(cyc)) == len(cyc) == 2 * dist[u] + 1:
                        best = cyc
    return best


def _bipartite_case(g: Graph, r_mask: int, adj: list[int], limit: int) -> Iterator[list[int]]:
    colour: dict[int, int] = {}
    comp: dict[int, int] = {}
    for s in range(g.n):
        if s in colour:
            continue
        colour[s], comp[s] = 0, s
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in iter_bits(adj[u]):
                if w not in colour:
                    colour[w] = colour[u] ^ 1
                    comp[w] = s
                    queue.append(w)
    found = []
    for i, (x, y) in enumerate(g.edges):
        if (r_mask >> i) & 1 or comp[x] != comp[y] or colour[x] == colour[y]:
            continue
        parent, _ = _bfs_tree(adj, x)
        path = _walk_back(parent, y)[::-1]  # odd length x .. y
        found.append(path)
        if len(found) >= limit:
            break
    found.sort(key=len)
    yield from found


def _non_bipartite_case(g: Graph, r_mask: int, adj: list[int], odd: list[int], limit: int) -> Iterator[list[int]]:
    on_c = vertex_mask(odd)
    pos = {v: i for i, v in enumerate(odd)}
    L = len(odd)
    # distance of every vertex to the odd cycle inside R, to order candidate edges
    dist = {v: 0 for v in odd}
    queue = deque(odd)
    while queue:
        u = queue.popleft()
        for w in iter_bits(adj[u]):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    cands = [
        (dist[x] + dist[y], x, y)
        for i, (x, y) in enumerate(g.edges)
        if not (r_mask >> i) & 1 and x in dist and y in dist
    ]
    cands.sort()
    found = []
    for _, x0, y0 in cands[: 4 * limit]:
        for x, y in ((x0, y0), (y0, x0)):
            px = _path_to_targets(adj, x, on_c & ~(1 << y), 1 << y)
            if px is None:
                continue
            u = px[-1]
            py = _path_to_targets(adj, y, on_c & ~(1 << u), vertex_mask(px))
            if py is None:
                continue
            v = py[-1]
            # arcs of the odd cycle from v to u, interior vertices only
            iu, iv = pos[u], pos[v]
            fwd = [odd[(iv + j) % L] for j in range(1, (iu - iv) % L)]
            bwd = [odd[(iv - j) % L] for j in range(1, (iv - iu) % L)]
            base = (len(px) - 1) + 1 + (len(py) - 1)
            arc = fwd if (base + len(fwd) + 1) % 2 == 0 else bwd
            cyc = px[::-1] + py + arc
            if len(set(cyc)) == len(cyc):
                found.append(cyc)
            break
        if len(found) >= limit:
            break
    found.sort(key=len)
    yield from found


def odd_R_cycles(
    g: Graph,
    r_mask: int,
    max_length: int | None = None,
    *,
    candidates: int = 16,
    fallback_nodes: int = 200_000,
) -> Iterator[Cycle]:
    """Even cycles with an odd number of R-edges, shortest constructions first.

    Constructed cycles use exactly one edge outside R.  When the constructive
    cases produce nothing within ``max_length``, even cycles up to that length
    are enumerated directly under a node budget.
    """
    check_r_preconditions(g, r_mask)
    if max_length is None:
        max_length = 2 * length_bound(g.n, g.max_degree())
    adj = _r_adjacency(g, r_mask)
    odd = shortest_odd_cycle(adj)
    gen = _bipartite_case(g, r_mask, adj, candidates) if odd is None else _non_bipartite_case(g, r_mask, adj, odd, candidates)
    seen = set()
    for vs in gen:
        if len(vs) > max_length or len(vs) % 2:
            continue
        c = Cycle.of(g, vs)
        if (c.edges & r_mask).bit_count() % 2 == 1 and c.edges not in seen:
            seen.add(c.edges)
            yield c
    if seen:
        return
    budget = HamiltonBudget(max_nodes_expanded=fallback_nodes)
    for k in range(4, min(max_length, g.n) + 1, 2):
        for vs in enumerate_k_cycles(g, k, budget):
            c = Cycle.of(g, vs)
            if (c.edges & r_mask).bit_count() % 2 == 1:
                yield c
                return


def find_odd_R_cycle(g: Graph, r_mask: int, max_length: int | None = None, **kwargs) -> Cycle | None:
    """Shortest constructed even cycle with odd R-intersection, or None within the bound."""
    return next(odd_R_cycles(g, r_mask, max_length, **kwargs), None)


# -- connectors -----------------------------------------------------------------------


def connector_endpoints(cycle: tuple[int, ...]) -> list[tuple[int, int]]:
    """(v_i, v_{2k-i+2}) for i = 2..k, with v_1 = cycle[0]."""
    L = len(cycle)
    if L % 2 or L < 2:
        raise ValueError("need an even number of cycle vertices")
    k = L // 2
    return [(cycle[i - 1], cycle[L - i + 1]) for i in range(2, k + 1)]


def _alternatives(g: Graph, a: int, b: int, forbidden: int, edge_forbidden: int, limit: int) -> list[list[int]]:
    first = bfs_path(g, a, b, forbidden, edge_forbidden)
    if first is None:
        return []
    out = [first]
    for w in first[1:-1]:
        p = bfs_path(g, a, b, forbidden | (1 << w), edge_forbidden)
        if p is not None and p not in out:
            out.append(p)
    out.sort(key=len)
    return out[:limit]


def build_connectors(
    g: Graph,
    cycle: Cycle | tuple[int, ...],
    reserved: int = 0,
    allowed: int | None = None,
    *,
    alternatives: int = 4,
    max_retries: int = 200,
) -> list[list[int]]:
    """Vertex-disjoint paths P_i from v_i to v_{2k-i+2}, i = 2..k.

    Each path avoids the other cycle vertices, the cycle's edges, earlier
    connectors, ``reserved`` and anything outside ``allowed``.  Failed indices
    backtrack into the previous connector's next alternative until
    ``max_retries`` undo steps have been spent.
    """
    vs = tuple(cycle.vertices if isinstance(cycle, Cycle) else cycle)
    ends = connector_endpoints(vs)
    on_c = vertex_mask(vs)
    c_edges = g.cycle_mask(vs)
    base = reserved | (0 if allowed is None else ((1 << g.n) - 1) & ~allowed)
    retries = 0
    chosen: list[list[int]] = []
    options: list[list[list[int]]] = []
    worst = 0

    def forbidden_for(i: int) -> int:
        a, b = ends[i]
        used = on_c & ~(1 << a) & ~(1 << b)
        for p in chosen:
            used |= vertex_mask(p)
        return (base | used) & ~(1 << a) & ~(1 << b)

    i = 0
    while i < len(ends):
        if len(options) == i:
            a, b = ends[i]
            if (base >> a) & 1 or (base >> b) & 1:
                raise ConnectorError(f"endpoint of connector {i + 2} is reserved", i + 2)
            options.append(_alternatives(g, a, b, forbidden_for(i), c_edges, alternatives))
        if options[i]:
            chosen.append(options[i].pop(0))
            i += 1
            worst = max(worst, i)
            continue
        # dead end: undo the previous connector and try its next alternative
        options.pop()
        if i == 0 or retries >= max_retries:
            raise ConnectorError(f"no connector for index {worst + 2}", worst + 2)
        retries += 1
        chosen.pop()
        i -= 1
    return chosen


# -- the switcher ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParitySwitcher:
    cycle: tuple[int, ...]
    connectors: tuple[tuple[int, ...], ...]
    w_vertices: frozenset[int]
    even_path: tuple[int, ...]
    odd_path: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.cycle) // 2

    @property
    def ends(self) -> tuple[int, int]:
        return self.cycle[0], self.cycle[self.k]

    def edge_mask(self, g: Graph) -> int:
        mask = g.cycle_mask(self.cycle)
        for p in self.connectors:
            mask |= g.path_mask(p)
        return mask


def _validate_structure(g: Graph, r_mask: int, vs: tuple[int, ...], connectors) -> None:
    try:
        c = Cycle.of(g, vs)
    except ValueError as exc:
        raise SwitcherError(f"bad cycle: {exc}") from None
    if len(vs) % 2 or len(vs) < 4:
        raise SwitcherError("cycle length must be even and at least 4")
    if (c.edges & r_mask).bit_count() % 2 == 0:
        raise SwitcherError("cycle has an even number of R-edges")
    ends = connector_endpoints(vs)
    if len(connectors) != len(ends):
        raise SwitcherError(f"expected {len(ends)} connectors, got {len(connectors)}")
    used = vertex_mask(vs)
    for (a, b), p in zip(ends, connectors):
        try:
            path = Path.of(g, p)
        except ValueError as exc:
            raise SwitcherError(f"bad connector: {exc}") from None
        if (p[0], p[-1]) != (a, b):
            raise SwitcherError(f"connector {p} should run from {a} to {b}")
        if path.edges & c.edges:
            raise SwitcherError(f"connector {p} uses an edge of the cycle")
        inner = vertex_mask(p[1:-1])
        if inner & used:
            raise SwitcherError(f"connector {p} meets the cycle or another connector")
        used |= inner


def _w_paths(g: Graph, r_mask: int, w_edges: int, w_verts: int, x: int, y: int, max_nodes: int) -> dict[int, list[int]]:
    """First Hamilton x-y path of W found for each R-parity."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in iter_bits(w_verts)}
    for i in iter_bits(w_edges):
        u, v = g.edges[i]
        bit = (r_mask >> i) & 1
        adj[u].append((v, bit))
        adj[v].append((u, bit))
    total = w_verts.bit_count()
    found: dict[int, list[int]] = {}
    nodes = 0
    path = [x]
    stack = [iter(adj[x])]
    parities = [0]
    seen = 1 << x
    while stack and len(found) < 2:
        step = next(stack[-1], None)
        if step is None:
            stack.pop()
            seen &= ~(1 << path.pop())
            parities.pop()
            continue
        v, bit = step
        if (seen >> v) & 1:
            continue
        nodes += 1
        if nodes > max_nodes:
            break
        par = parities[-1] ^ bit
        if v == y:
            if len(path) + 1 == total and par not in found:
                found[par] = path + [y]
            continue
        path.append(v)
        parities.append(par)
        seen |= 1 << v
        stack.append(iter(adj[v]))
    return found


def assemble_switcher(
    g: Graph,
    r_mask: int,
    cycle: Cycle | tuple[int, ...],
    connectors,
    *,
    max_nodes: int = 200_000,
) -> ParitySwitcher:
    vs = tuple(cycle.vertices if isinstance(cycle, Cycle) else cycle)
    connectors = [tuple(p) for p in connectors]
    _validate_structure(g, r_mask, vs, connectors)
    w_verts = vertex_mask(vs)
    w_edges = g.cycle_mask(vs)
    for p in connectors:
        w_verts |= vertex_mask(p)
        w_edges |= g.path_mask(p)
    k = len(vs) // 2
    found = _w_paths(g, r_mask, w_edges, w_verts, vs[0], vs[k], max_nodes)
    if len(found) < 2:
        missing = "even" if 0 not in found else "odd"
        raise SwitcherError(f"W has no Hamilton v_1-v_(k+1) path with {missing} R-parity")
    return ParitySwitcher(
        vs,
        tuple(connectors),
        frozenset(iter_bits(w_verts)),
        tuple(found[0]),
        tuple(found[1]),
    )


# -- full pipeline ---------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    length_constant: float = 10.0
    max_length: int | None = None
    split: bool | None = None  # None: on for regular graphs
    split_fraction: float = 0.5
    split_tries: int = 1000
    connector_alternatives: int = 4
    connector_retries: int = 200
    w_nodes: int = 200_000
    path_budget: HamiltonBudget = field(default_factory=lambda: HamiltonBudget(max_nodes_expanded=200_000))
    heuristic_fraction: float = 0.5
    max_odd_cycles: int = 3
    max_rotations: int = 4
    fallback_nodes: int = 200_000
    seed: int = 0


@dataclass
class PipelineResult:
    cycle: Cycle | None
    stage: str  # "ok" or the stage that failed last
    reason: str = ""
    switcher: ParitySwitcher | None = None
    outer_path: tuple[int, ...] | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def _rotations(vs: tuple[int, ...], count: int) -> Iterator[tuple[int, ...]]:
    L = len(vs)
    for j in range(min(count, L)):
        yield vs[j:] + vs[:j]


def _modes(g: Graph, cfg: PipelineConfig) -> list[str]:
    split = g.is_regular() if cfg.split is None else cfg.split
    return ["split", "plain"] if split else ["plain"]


def odd_parity_hamilton(g: Graph, r_mask: int, config: PipelineConfig | None = None) -> PipelineResult:
    """Hamilton cycle with an odd number of R-edges, built through a parity switcher.

    Every returned cycle is re-verified; stage failures are reported with a tag
    (``precondition``, ``odd_cycle``, ``connectors``, ``switcher``,
    ``hamilton_path`` or ``verify``).
    """
    cfg = config or PipelineConfig()
    stats: dict[str, Any] = {"odd_cycles": 0, "attempts": 0, "budget_exceeded": False}
    try:
        check_r_preconditions(g, r_mask)
    except PreconditionError as exc:
        return PipelineResult(None, "precondition", str(exc), stats=stats)
    max_len = cfg.max_length
    if max_len is None:
        max_len = 2 * length_bound(g.n, g.max_degree(), cfg.length_constant)
    last = PipelineResult(None, "odd_cycle", f"no even cycle with odd R-count up to length {max_len}", stats=stats)
    cycles = odd_R_cycles(g, r_mask, max_len, fallback_nodes=cfg.fallback_nodes)
    full = (1 << g.n) - 1
    for ci, cyc in enumerate(cycles):
        if ci >= cfg.max_odd_cycles:
            break
        stats["odd_cycles"] += 1
        on_c = vertex_mask(cyc.vertices)
        for mode in _modes(g, cfg):
            reserved = 0
            if mode == "split":
                y = full & ~on_c
                a = round(y.bit_count() * cfg.split_fraction)
                b = y.bit_count() - a
                if a < 1 or b < 1:
                    continue
                try:
                    split = degree_split(g, y, a, b, seed=cfg.seed + ci, max_tries=cfg.split_tries)
                except SplitError as exc:
                    last = PipelineResult(None, "split", str(exc), stats=stats)
                    continue
                reserved = vertex_mask(split.a)
            for vs in _rotations(cyc.vertices, cfg.max_rotations):
                stats["attempts"] += 1
                res = _attempt(g, r_mask, vs, reserved, cfg, stats)
                if res.ok:
                    res.stats["mode"] = mode
                    return res
                last = res
    return last


def _attempt(g: Graph, r_mask: int, vs: tuple[int, ...], reserved: int, cfg: PipelineConfig, stats) -> PipelineResult:
    try:
        conns = build_connectors(
            g, vs, reserved, alternatives=cfg.connector_alternatives, max_retries=cfg.connector_retries
        )
    except ConnectorError as exc:
        return PipelineResult(None, "connectors", str(exc), stats=stats)
    try:
        sw = assemble_switcher(g, r_mask, vs, conns, max_nodes=cfg.w_nodes)
    except SwitcherError as exc:
        return PipelineResult(None, "switcher", str(exc), stats=stats)
    v1, vk1 = sw.ends
    inner = vertex_mask(sw.w_vertices) & ~(1 << v1) & ~(1 << vk1)
    keep = [v for v in range(g.n) if not (inner >> v) & 1]
    sub = induced_subgraph(g, keep)
    x, y = sub.from_parent_vertex[v1], sub.from_parent_vertex[vk1]
    out = hamilton_path_between(
        sub.graph, x, y, cfg.path_budget, heuristic_fraction=cfg.heuristic_fraction, seed=cfg.seed
    )
    if not out.found:
        if out.status is Status.BUDGET_EXCEEDED:
            stats["budget_exceeded"] = True
        return PipelineResult(None, "hamilton_path", out.status.value, sw, stats=stats)
    outer = tuple(sub.lift_vertices(out.payload.vertices))
    par = r_parity(g, r_mask, outer, closed=False)
    inside = sw.even_path if par == 1 else sw.odd_path
    # inside runs v_1 -> v_(k+1); outer runs v_1 -> v_(k+1) as well
    ham = tuple(inside) + tuple(reversed(outer[1:-1]))
    try:
        cycle = Cycle.of(g, ham)
    except ValueError as exc:
        return PipelineResult(None, "verify", str(exc), sw, outer, stats)
    if len(ham) != g.n or (cycle.edges & r_mask).bit_count() % 2 == 0:
        return PipelineResult(None, "verify", "assembled cycle is not an odd Hamilton cycle", sw, outer, stats)
    return PipelineResult(cycle, "ok", "", sw, outer, dict(stats))


def certificate(g: Graph, r_mask: int, result: PipelineResult) -> dict[str, Any]:
    """JSON-ready certificate for a successful pipeline run."""
    if not result.ok or result.switcher is None:
        raise ValueError("only successful runs have certificates")
    sw = result.switcher
    return {
        "n": g.n,
        "edges": [list(e) for e in g.edges],
        "r": list(iter_bits(r_mask)),
        "cycle": list(sw.cycle),
        "connectors": [list(p) for p in sw.connectors],
        "even_path": list(sw.even_path),
        "odd_path": list(sw.odd_path),
        "outer_path": list(result.outer_path),
        "hamilton_cycle": list(result.cycle.vertices),
        "even_parity": r_parity(g, r_mask, sw.even_path, closed=False),
        "odd_parity": r_parity(g, r_mask, sw.odd_path, closed=False),
    }

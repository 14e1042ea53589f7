"""Hamilton cycle enumeration and Hamilton path search.

All searches work on vertex bitmasks.  Budgets are explicit: a search that
runs out reports ``budget_exceeded`` rather than a negative answer.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from hamspan.graph import Cycle, Graph, Path, is_biconnected, is_connected


@dataclass(frozen=True)
class HamiltonBudget:
    max_nodes_expanded: int = 5_000_000
    max_cycles: int = 10_000_000
    # None disables the wall-clock limit; only node/cycle limits are reproducible.
    time_limit: float | None = None

    def __post_init__(self) -> None:
        if self.max_nodes_expanded <= 0 or self.max_cycles <= 0:
            raise ValueError("budget limits must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")

    def scaled(self, fraction: float) -> HamiltonBudget:
        return HamiltonBudget(
            max(1, int(self.max_nodes_expanded * fraction)),
            self.max_cycles,
            None if self.time_limit is None else self.time_limit * fraction,
        )


class Status(str, enum.Enum):
    FOUND = "found"
    EXHAUSTED_NONE = "exhausted_none"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class SearchStats:
    nodes: int = 0
    seconds: float = 0.0


@dataclass
class SearchOutcome:
    status: Status
    payload: Path | Cycle | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND


class _Meter:
    """Shared node counter; raises _OutOfBudget once a limit trips."""

    __slots__ = ("nodes", "limit", "deadline", "start")

    def __init__(self, budget: HamiltonBudget) -> None:
        self.nodes = 0
        self.limit = budget.max_nodes_expanded
        self.start = time.perf_counter()
        self.deadline = None if budget.time_limit is None else self.start + budget.time_limit

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise _OutOfBudget
        if self.deadline is not None and not self.nodes & 1023 and time.perf_counter() > self.deadline:
            raise _OutOfBudget

    def stats(self) -> SearchStats:
        return SearchStats(self.nodes, time.perf_counter() - self.start)


class _OutOfBudget(Exception):
    pass


def _connected_mask(adj: tuple[int, ...], mask: int) -> bool:
    if not mask:
        return True
    seen = frontier = mask & -mask
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        frontier = nxt & mask & ~seen
        seen |= frontier
    return seen == mask


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


# -- cycle enumeration ----------------------------------------------------------


@dataclass
class CycleStream:
    """Iterator over Hamilton cycles (vertex tuples starting at 0).

    ``complete`` becomes meaningful once iteration stops: True iff the whole
    search space was explored.
    """

    graph: Graph
    budget: HamiltonBudget
    complete: bool = False
    count: int = 0
    stats: SearchStats = field(default_factory=SearchStats)
    _gen: Iterator[tuple[int, ...]] | None = None

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        meter = _Meter(self.budget)
        try:
            for cyc in _hamilton_cycles(self.graph, meter):
                self.count += 1
                yield cyc
                if self.count >= self.budget.max_cycles:
                    raise _OutOfBudget
            self.complete = True
        except _OutOfBudget:
            self.complete = False
        finally:
            self.stats = meter.stats()


def enumerate_hamilton_cycles(g: Graph, budget: HamiltonBudget) -> CycleStream:
    """Every Hamilton cycle exactly once, as ``(0, s, ..., t)`` with ``s < t``."""
    if g.n < 3:
        raise ValueError("Hamilton cycles need at least 3 vertices")
    return CycleStream(g, budget)


def hamilton_cycles(g: Graph, budget: HamiltonBudget | None = None) -> tuple[list[tuple[int, ...]], bool]:
    """Materialised enumeration: (cycles, complete)."""
    stream = enumerate_hamilton_cycles(g, budget or HamiltonBudget())
    cycles = list(stream)
    return cycles, stream.complete


def _hamilton_cycles(g: Graph, meter: _Meter) -> Iterator[tuple[int, ...]]:
    n = g.n
    adj = g.adj_mask
    if any(a.bit_count() < 2 for a in adj) or not is_biconnected(g):
        return
    full = (1 << n) - 1
    path = [0]
    # Explicit DFS: each frame holds the candidate mask still to try.
    unvisited0 = full & ~1
    stack: list[tuple[int, int, int]] = []  # (end, unvisited, candidates)
    # Second vertex s must be smaller than the last vertex t; both in N(0).
    first_cands = adj[0] & unvisited0
    stack.append((0, unvisited0, first_cands))
    second = -1
    while stack:
        end, unvisited, cands = stack[-1]
        if not cands:
            stack.pop()
            path.pop()
            continue
        low = cands & -cands
        stack[-1] = (end, unvisited, cands ^ low)
        nxt = low.bit_length() - 1
        meter.tick()
        rest = unvisited & ~low
        if len(path) == 1:
            second = nxt
            # some neighbour of 0 above s must remain to close the cycle
            if not (adj[0] & rest) >> (nxt + 1):
                continue
        if not rest:
            if adj[nxt] & 1 and nxt > second:
                yield tuple(path) + (nxt,)
            continue
        closing = adj[0] & rest
        if not closing >> (second + 1):
            continue
        # degree pruning and degree-2 forcing over the remaining vertices
        avail_base = rest | low | 1
        forced = -1
        dead = False
        r = rest
        while r:
            lb = r & -r
            u = lb.bit_length() - 1
            r ^= lb
            a = adj[u] & avail_base
            c = a.bit_count()
            if c < 2:
                dead = True
                break
            if c == 2 and a & low:
                if forced != -1:
                    dead = True
                    break
                forced = u
        if dead:
            continue
        if rest.bit_count() > 2 and not _connected_mask(adj, rest):
            continue
        next_cands = adj[nxt] & rest
        if forced != -1:
            next_cands &= 1 << forced
        # the final vertex must be adjacent to 0, so if only one vertex remains check it
        path.append(nxt)
        stack.append((nxt, rest, next_cands))


# -- random Hamilton cycles (used to saturate spans quickly) ----------------------


def random_hamilton_cycle(
    g: Graph,
    rng: np.random.Generator,
    max_nodes: int = 20_000,
) -> tuple[int, ...] | None:
    """A Hamilton cycle found by DFS with shuffled branching, or None."""
    n = g.n
    if n < 3:
        return None
    adj = g.adj_mask
    full = (1 << n) - 1
    start = int(rng.integers(n))
    path = [start]
    unvisited = full & ~(1 << start)
    frames = [_shuffled(adj[start] & unvisited, rng)]
    nodes = 0
    while frames:
        cands = frames[-1]
        if not cands:
            frames.pop()
            v = path.pop()
            unvisited |= 1 << v
            continue
        nxt = cands.pop()
        nodes += 1
        if nodes > max_nodes:
            return None
        rest = unvisited & ~(1 << nxt)
        if not rest:
            if (adj[nxt] >> start) & 1:
                return tuple(path) + (nxt,)
            continue
        avail_base = rest | (1 << nxt) | (1 << start)
        forced = -1
        ok = True
        for u in _bits(rest):
            a = adj[u] & avail_base
            c = a.bit_count()
            if c < 2 or (c == 2 and (a >> nxt) & 1 and forced != -1):
                ok = False
                break
            if c == 2 and (a >> nxt) & 1:
                forced = u
        if not ok or not _connected_mask(adj, rest):
            continue
        path.append(nxt)
        unvisited = rest
        nc = adj[nxt] & rest
        if forced != -1:
            nc &= 1 << forced
        frames.append(_shuffled(nc, rng))
    return None


def _shuffled(mask: int, rng: np.random.Generator) -> list[int]:
    items = _bits(mask)
    if len(items) > 1:
        perm = rng.permutation(len(items))
        items = [items[i] for i in perm]
    return items


def canonical_cycle(vertices: tuple[int, ...] | list[int]) -> tuple[int, ...]:
    """Rotate/reflect so the cycle starts at its smallest vertex with smaller second vertex."""
    vs = list(vertices)
    i = vs.index(min(vs))
    vs = vs[i:] + vs[:i]
    if len(vs) > 2 and vs[1] > vs[-1]:
        vs = [vs[0]] + vs[1:][::-1]
    return tuple(vs)


# -- cycles of fixed length k ---------------------------------------------------


def enumerate_k_cycles(g: Graph, k: int, budget: HamiltonBudget) -> CycleStream:
    """All cycles of length ``k``, each once, starting at their smallest vertex."""
    if k < 3:
        raise ValueError("cycles have length at least 3")
    stream = _KCycleStream(g, budget)
    stream.k = k
    return stream


@dataclass
class _KCycleStream(CycleStream):
    k: int = 3

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        meter = _Meter(self.budget)
        try:
            for cyc in _k_cycles(self.graph, self.k, meter):
                self.count += 1
                yield cyc
                if self.count >= self.budget.max_cycles:
                    raise _OutOfBudget
            self.complete = True
        except _OutOfBudget:
            self.complete = False
        finally:
            self.stats = meter.stats()


def _k_cycles(g: Graph, k: int, meter: _Meter) -> Iterator[tuple[int, ...]]:
    n = g.n
    adj = g.adj_mask
    for s in range(n):
        allowed = ((1 << n) - 1) & ~((1 << (s + 1)) - 1)  # vertices > s
        # distance back to s inside allowed ∪ {s}: lower bound used for pruning
        dist = _bfs_levels(adj, s, allowed | (1 << s))
        path = [s]
        stack = [(allowed, adj[s] & allowed)]
        while stack:
            free, cands = stack[-1]
            if not cands:
                stack.pop()
                path.pop()
                continue
            low = cands & -cands
            stack[-1] = (free, cands ^ low)
            v = low.bit_length() - 1
            meter.tick()
            depth = len(path) + 1  # vertices on path including v
            if depth == k:
                if (adj[v] >> s) & 1 and path[1] < v:
                    yield tuple(path) + (v,)
                continue
            remaining = k - depth  # vertices still to add
            if dist.get(v, n + 1) > remaining + 1:
                continue
            path.append(v)
            stack.append((free & ~low, adj[v] & free & ~low))


def _bfs_levels(adj: tuple[int, ...], source: int, allowed: int) -> dict[int, int]:
    dist = {source: 0}
    seen = frontier = 1 << source
    level = 0
    while frontier:
        level += 1
        nxt = 0
        for u in _bits(frontier):
            nxt |= adj[u]
        nxt &= allowed & ~seen
        for w in _bits(nxt):
            dist[w] = level
        seen |= nxt
        frontier = nxt
    return dist


# -- Hamilton paths between prescribed endpoints -----------------------------------


def _exact_path(g: Graph, x: int, y: int, meter: _Meter) -> list[int] | None:
    n = g.n
    adj = g.adj_mask
    full = (1 << n) - 1
    ybit = 1 << y
    if n == 2:
        return [x, y] if g.has_edge(x, y) else None
    path = [x]
    stack = [(full & ~(1 << x), adj[x] & full & ~(1 << x))]
    while stack:
        unvisited, cands = stack[-1]
        if not cands:
            stack.pop()
            path.pop()
            continue
        low = cands & -cands
        stack[-1] = (unvisited, cands ^ low)
        v = low.bit_length() - 1
        meter.tick()
        rest = unvisited & ~low
        if v == y:
            if not rest:
                return path + [y]
            continue
        if rest == ybit:
            if (adj[v] >> y) & 1:
                return path + [v, y]
            continue
        # every remaining non-y vertex needs two usable neighbours, y needs one
        base = rest | low
        forced = -1
        dead = False
        r = rest & ~ybit
        while r:
            lb = r & -r
            u = lb.bit_length() - 1
            r ^= lb
            a = adj[u] & base
            c = a.bit_count()
            if c < 2:
                dead = True
                break
            if c == 2 and a & low:
                if forced != -1:
                    dead = True
                    break
                forced = u
        if dead or not adj[y] & base:
            continue
        if not _connected_mask(adj, rest):
            continue
        nc = adj[v] & rest
        if forced != -1:
            nc &= 1 << forced
        else:
            nc &= ~ybit
        path.append(v)
        stack.append((rest, nc))
    return None


def _posa_path(
    g: Graph, x: int, y: int, rng: np.random.Generator, max_steps: int, meter: _Meter
) -> list[int] | None:
    """Rotation-extension with x fixed, y held back until the rest is covered.

    Builds a Hamilton path of ``g - y`` starting at ``x`` using Pósa rotations
    at the free end, then rotates until the free end is a neighbour of y.
    """
    n = g.n
    nbrs = g.neighbours_sorted
    adj = g.adj_mask
    target = n - 1  # vertices other than y
    path = [x]
    pos = {x: 0}
    ybit = 1 << y
    on_path = 1 << x
    steps = 0
    while True:
        steps += 1
        meter.tick()
        if steps > max_steps:
            return None
        end = path[-1]
        if len(path) == target:
            if (adj[end] >> y) & 1:
                return path + [y]
        else:
            free = adj[end] & ~on_path & ~ybit
            if free:
                opts = _bits(free)
                # prefer low remaining degree (Angluin-Valiant style)
                best = min(opts, key=lambda w: ((adj[w] & ~on_path).bit_count(), rng.random()))
                pos[best] = len(path)
                path.append(best)
                on_path |= 1 << best
                continue
        # rotate: pick a path neighbour p_i of the end (not its predecessor)
        choices = [w for w in nbrs[end] if (on_path >> w) & 1 and pos[w] < len(path) - 2]
        if not choices:
            return None
        w = choices[int(rng.integers(len(choices)))]
        i = pos[w]
        tail = path[i + 1 :]
        tail.reverse()
        path[i + 1 :] = tail
        for j in range(i + 1, len(path)):
            pos[path[j]] = j


def hamilton_path_between(
    g: Graph,
    x: int,
    y: int,
    budget: HamiltonBudget,
    *,
    heuristic_fraction: float = 0.25,
    exact: bool = True,
    seed: int = 0,
    max_restarts: int = 8,
) -> SearchOutcome:
    """Hamilton path of g from x to y.

    Rotation-extension runs first on ``heuristic_fraction`` of the node budget
    (and at most ``max_restarts`` restarts of ``4 n^2`` steps);
    the exact backtracking search then gets the remainder.  With
    ``heuristic_fraction=0`` the search is purely exact.
    """
    if x == y:
        raise ValueError("endpoints must differ")
    n = g.n
    meter = _Meter(budget)
    if any(not 0 <= v < n for v in (x, y)):
        raise IndexError("endpoint out of range")
    try:
        if not is_connected(g):
            return SearchOutcome(Status.EXHAUSTED_NONE, None, meter.stats())
        if heuristic_fraction > 0 and n > 3:
            rng = np.random.default_rng(seed)
            steps = max(4 * n * n, 1000)
            cap = min(int(budget.max_nodes_expanded * heuristic_fraction), max_restarts * steps)
            while meter.nodes < cap:
                try:
                    path = _posa_path(g, x, y, rng, min(steps, cap - meter.nodes), meter)
                except _OutOfBudget:
                    break
                if path is not None:
                    return SearchOutcome(Status.FOUND, Path.of(g, path), meter.stats())
                if not exact and meter.nodes >= cap:
                    break
        if not exact:
            return SearchOutcome(Status.BUDGET_EXCEEDED, None, meter.stats())
        path = _exact_path(g, x, y, meter)
    except _OutOfBudget:
        return SearchOutcome(Status.BUDGET_EXCEEDED, None, meter.stats())
    if path is None:
        return SearchOutcome(Status.EXHAUSTED_NONE, None, meter.stats())
    return SearchOutcome(Status.FOUND, Path.of(g, path), meter.stats())


@dataclass
class ConnectivityResult:
    status: str  # "yes" | "no" | "budget_exceeded"
    pair: tuple[int, int] | None = None
    nodes: int = 0


def is_hamilton_connected(g: Graph, budget: HamiltonBudget) -> ConnectivityResult:
    """Exact check over all unordered pairs (the budget applies per pair)."""
    if g.n < 3:
        raise ValueError("need at least 3 vertices")
    nodes = 0
    exceeded = None
    for x in range(g.n):
        for y in range(x + 1, g.n):
            out = hamilton_path_between(g, x, y, budget, heuristic_fraction=0.0)
            nodes += out.stats.nodes
            if out.status is Status.EXHAUSTED_NONE:
                return ConnectivityResult("no", (x, y), nodes)
            if out.status is Status.BUDGET_EXCEEDED and exceeded is None:
                exceeded = (x, y)
    if exceeded is not None:
        return ConnectivityResult("budget_exceeded", exceeded, nodes)
    return ConnectivityResult("yes", None, nodes)

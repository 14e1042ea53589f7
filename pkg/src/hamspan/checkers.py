"""Executable structural checks: edge distribution, expansion, robust diameter,
degree splitting, the neighbourhood property P_alpha and path-neighbour bounds.

Most of these inequalities are asymptotic statements, so a violation on a
concrete graph is data, not a bug.  Every check returns a :class:`CheckReport`
whose ``margin`` is the worst slack seen (negative means violated) and whose
``witness`` pins down one violating configuration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from hamspan.gf2 import iter_bits
from hamspan.graph import (
    Graph,
    edges_between,
    external_neighbourhood,
    internal_edge_count,
    vertex_mask,
)
from hamspan.models import make_rng

EXHAUSTIVE_SUBSET_LIMIT = 16
EXHAUSTIVE_PAIR_LIMIT = 10


@dataclass
class CheckReport:
    lemma_id: str
    mode: str  # "exhaustive" or "sampled"
    verdict: str  # "holds", "violated" or "inconclusive"
    margin: float | None = None
    witness: dict[str, Any] | None = None
    trials: int = 0
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_row(self) -> dict[str, Any]:
        return {
            "lemma_id": self.lemma_id,
            "mode": self.mode,
            "verdict": self.verdict,
            "margin": self.margin,
            "trials": self.trials,
            "witness": self.witness,
        }


class _Worst:
    """Tracks the smallest slack and its witness."""

    def __init__(self) -> None:
        self.margin: float | None = None
        self.witness: dict[str, Any] | None = None
        self.count = 0

    def see(self, slack: float, witness) -> None:
        self.count += 1
        if self.margin is None or slack < self.margin:
            self.margin = slack
            self.witness = witness() if callable(witness) else witness

    def report(self, lemma_id: str, mode: str, **details) -> CheckReport:
        if self.margin is None:
            verdict = "holds"
        else:
            verdict = "violated" if self.margin < 0 else "holds"
        return CheckReport(
            lemma_id,
            mode,
            verdict,
            self.margin,
            self.witness if verdict == "violated" else None,
            self.count,
            dict(details),
        )


def _resolve_mode(mode: str, n: int, limit: int) -> str:
    if mode == "auto":
        return "exhaustive" if n <= limit else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def _all_subsets(n: int, min_size: int = 0, max_size: int | None = None) -> Iterator[int]:
    max_size = n if max_size is None else min(max_size, n)
    for size in range(min_size, max_size + 1):
        for combo in itertools.combinations(range(n), size):
            yield vertex_mask(combo)


def _random_subset(rng: np.random.Generator, pool: list[int], size: int) -> int:
    if size <= 0:
        return 0
    idx = rng.choice(len(pool), size=size, replace=False)
    return vertex_mask(pool[i] for i in idx)


def _verts(mask: int) -> list[int]:
    return list(iter_bits(mask))


# -- edge distribution ------------------------------------------------------------------


def pair_deviation_slack(g: Graph, d: int, a: int, b: int, constant: float = 3.0) -> float:
    """``C sqrt(d|A||B|) - |e(A,B) - |A||B|d/n|``."""
    sa, sb = a.bit_count(), b.bit_count()
    dev = abs(edges_between(g, a, b) - sa * sb * d / g.n)
    return constant * math.sqrt(d * sa * sb) - dev


def set_deviation_slack(g: Graph, d: int, a: int, constant: float = 3.0) -> float:
    """``C sqrt(d)|A| - |e(A) - (d/n) C(|A|,2)|``."""
    sa = a.bit_count()
    dev = abs(internal_edge_count(g, a) - d / g.n * sa * (sa - 1) / 2)
    return constant * math.sqrt(d) * sa - dev


def check_edge_distribution(
    g: Graph,
    mode: str = "auto",
    *,
    form: str = "regular",
    constant: float = 3.0,
    alpha: float | None = None,
    beta: float | None = None,
    c: float = 0.0,
    samples: int = 2000,
    seed: int = 0,
) -> CheckReport:
    """Discrepancy bounds for regular graphs, or ``e(A,B) > cn`` for fixed-size pairs.

    ``form="regular"`` checks both the pair bound and the single-set bound.
    ``form="gnp"`` checks ``e(A,B) > c n`` for every ``|A| = alpha n``,
    ``|B| = beta n`` with A, B disjoint.
    """
    n = g.n
    rng = make_rng(seed)
    worst = _Worst()
    if form == "regular":
        if not g.is_regular():
            raise ValueError("the regular form needs a regular graph")
        d = g.max_degree()
        pair_mode = _resolve_mode(mode, n, EXHAUSTIVE_PAIR_LIMIT)
        set_mode = _resolve_mode(mode, n, EXHAUSTIVE_SUBSET_LIMIT)
        if pair_mode == "exhaustive":
            # every disjoint (A, B): assign each vertex to A, B or neither
            for labels in itertools.product((0, 1, 2), repeat=n):
                a = vertex_mask(v for v in range(n) if labels[v] == 1)
                b = vertex_mask(v for v in range(n) if labels[v] == 2)
                worst.see(pair_deviation_slack(g, d, a, b, constant), lambda a=a, b=b: {"part": "pair", "A": _verts(a), "B": _verts(b)})
        else:
            for _ in range(samples):
                sa = int(rng.integers(1, n))
                sb = int(rng.integers(1, n - sa + 1))
                perm = rng.permutation(n)
                a = vertex_mask(int(v) for v in perm[:sa])
                b = vertex_mask(int(v) for v in perm[sa : sa + sb])
                worst.see(pair_deviation_slack(g, d, a, b, constant), lambda a=a, b=b: {"part": "pair", "A": _verts(a), "B": _verts(b)})
        if set_mode == "exhaustive":
            for a in _all_subsets(n):
                worst.see(set_deviation_slack(g, d, a, constant), lambda a=a: {"part": "set", "A": _verts(a)})
        else:
            for _ in range(samples):
                sa = int(rng.integers(1, n + 1))
                a = _random_subset(rng, list(range(n)), sa)
                worst.see(set_deviation_slack(g, d, a, constant), lambda a=a: {"part": "set", "A": _verts(a)})
        return worst.report("edge_distribution", "exhaustive" if pair_mode == set_mode == "exhaustive" else "sampled", d=d, constant=constant)
    if form == "gnp":
        if alpha is None or beta is None:
            raise ValueError("gnp form needs alpha and beta")
        sa, sb = round(alpha * n), round(beta * n)
        if sa + sb > n:
            raise ValueError("alpha n + beta n exceeds n")
        mode = _resolve_mode(mode, n, EXHAUSTIVE_PAIR_LIMIT)
        threshold = c * n

        def see(a: int, b: int) -> None:
            worst.see(edges_between(g, a, b) - threshold - 1e-12, lambda: {"A": _verts(a), "B": _verts(b)})

        if mode == "exhaustive":
            for a_t in itertools.combinations(range(n), sa):
                a = vertex_mask(a_t)
                rest = [v for v in range(n) if not (a >> v) & 1]
                for b_t in itertools.combinations(rest, sb):
                    see(a, vertex_mask(b_t))
        else:
            for _ in range(samples):
                perm = rng.permutation(n)
                see(vertex_mask(int(v) for v in perm[:sa]), vertex_mask(int(v) for v in perm[sa : sa + sb]))
        rep = worst.report("random_edge_counts", mode, alpha=alpha, beta=beta, c=c)
        return rep
    raise ValueError(f"unknown form {form!r}")


# -- expansion -------------------------------------------------------------------------------


def expansion_slack(g: Graph, x: int, c: float) -> float:
    return external_neighbourhood(g, x).bit_count() - c * x.bit_count()


def _e2_violation(g: Graph, x: int, s: int) -> int | None:
    """A set Y of size s with no edge to X, if one exists."""
    rest = ((1 << g.n) - 1) & ~x & ~external_neighbourhood(g, x)
    if rest.bit_count() >= s:
        return vertex_mask(_verts(rest)[:s])
    return None


def is_c_expander(g: Graph, c: float, mode: str = "auto", *, samples: int = 2000, seed: int = 0) -> CheckReport:
    """Small sets expand by a factor c and large disjoint sets are joined by an edge."""
    if c <= 0:
        raise ValueError("c must be positive")
    n = g.n
    mode = _resolve_mode(mode, n, EXHAUSTIVE_SUBSET_LIMIT)
    threshold = n / (2 * c)
    small_max = math.ceil(threshold) - 1  # |X| < n/(2c)
    large = math.ceil(threshold)  # |X|, |Y| >= n/(2c)
    worst = _Worst()
    e2 = {"violated": False}

    def see_small(x: int) -> None:
        worst.see(expansion_slack(g, x, c), lambda: {"part": "E1", "X": _verts(x)})

    def see_large(x: int) -> None:
        y = _e2_violation(g, x, large)
        if y is not None:
            e2["violated"] = True
            worst.see(-1.0, lambda: {"part": "E2", "X": _verts(x), "Y": _verts(y)})
        else:
            worst.see(0.0, None)

    if mode == "exhaustive":
        for x in _all_subsets(n, 1, small_max):
            see_small(x)
        if 2 * large <= n and large >= 1:
            for combo in itertools.combinations(range(n), large):
                see_large(vertex_mask(combo))
    else:
        rng = make_rng(seed)
        cands = list(_adversarial_sets(g, max(small_max, 1)))
        for x in cands:
            if 1 <= x.bit_count() <= small_max:
                see_small(x)
        for _ in range(samples):
            if small_max >= 1:
                see_small(_random_subset(rng, list(range(n)), int(rng.integers(1, small_max + 1))))
            if 2 * large <= n and large >= 1:
                see_large(_random_subset(rng, list(range(n)), large))
        if 2 * large <= n and large >= 1:
            for x in cands:
                if x.bit_count() >= large:
                    see_large(vertex_mask(_verts(x)[:large]))
    return worst.report("c_expander", mode, c=c)


def _adversarial_sets(g: Graph, max_size: int) -> Iterator[int]:
    """Low-degree vertices with their neighbourhoods, and BFS balls around every vertex."""
    degs = g.degrees()
    order = sorted(range(g.n), key=lambda v: (degs[v], v))
    for v in order[: max(1, min(g.n, 10))]:
        yield 1 << v
        ball = (1 << v) | g.adj_mask[v]
        yield ball
    for v in range(g.n):
        ball = 1 << v
        grown = ball
        while True:
            nxt = grown | external_neighbourhood(g, grown)
            if nxt == grown:
                break
            grown = nxt
            if grown.bit_count() > 2 * max_size:
                break
            yield grown
        # truncated ball in BFS order
        seq = [v]
        seen = {v}
        for u in seq:
            for w in g.neighbours_sorted[u]:
                if w not in seen and len(seq) < max_size:
                    seen.add(w)
                    seq.append(w)
        yield vertex_mask(seq)


# -- robust diameter --------------------------------------------------------------------------


def _eccentricity_violation(g: Graph, r_adj: list[int], alive: int, source: int, bound: float) -> tuple[float, int | None]:
    """(slack, far vertex) for BFS from source inside ``alive`` using R-edges."""
    seen = frontier = 1 << source
    level = 0
    while frontier:
        nxt = 0
        for u in iter_bits(frontier):
            nxt |= r_adj[u]
        nxt &= alive & ~seen
        if not nxt:
            break
        level += 1
        seen |= nxt
        frontier = nxt
    missing = alive & ~seen
    if missing:
        return -math.inf, (missing & -missing).bit_length() - 1
    return bound - level, _verts(frontier)[0] if frontier and level else None


def r_adjacency(g: Graph, r_mask: int) -> list[int]:
    adj = [0] * g.n
    for i in iter_bits(r_mask):
        u, v = g.edges[i]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def robust_diameter(
    g: Graph,
    r_mask: int,
    s_bound: int,
    length_bound: float,
    mode: str = "auto",
    *,
    max_deg_into_s: float | None = None,
    samples: int = 100,
    seed: int = 0,
    half_degree: bool = True,
    half_eps: float = 0.1,
    half_b_frac: float = 0.59,
    half_deg_frac: float = 0.51,
) -> CheckReport:
    """Every pair outside S is joined by an R-path of length at most ``length_bound``
    avoiding S, for sets S of size ``s_bound`` (optionally with a cap on how many
    neighbours any vertex has in S).

    For regular graphs the half-degree property is sampled alongside and
    reported under ``details["half_degree"]``.
    """
    n = g.n
    r_adj = r_adjacency(g, r_mask)
    full = (1 << n) - 1
    worst = _Worst()
    rng = make_rng(seed)
    mode = _resolve_mode(mode, n, 12)

    def admissible(s: int) -> bool:
        if max_deg_into_s is None:
            return True
        return all((g.adj_mask[u] & s).bit_count() <= max_deg_into_s for u in range(n))

    def run(s: int, sources) -> None:
        alive = full & ~s
        for x in sources:
            slack, far = _eccentricity_violation(g, r_adj, alive, x, length_bound)
            worst.see(slack, lambda x=x, far=far: {"S": _verts(s), "x": x, "y": far})

    tried = 0
    if mode == "exhaustive":
        for s_t in itertools.combinations(range(n), min(s_bound, n)):
            s = vertex_mask(s_t)
            if admissible(s):
                tried += 1
                run(s, [v for v in range(n) if not (s >> v) & 1])
    else:
        attempts = 0
        while tried < samples and attempts < 50 * samples:
            attempts += 1
            s = _random_subset(rng, list(range(n)), min(s_bound, n))
            if not admissible(s):
                continue
            tried += 1
            alive = [v for v in range(n) if not (s >> v) & 1]
            k = min(len(alive), 4)
            if k:
                run(s, [alive[int(i)] for i in rng.choice(len(alive), size=k, replace=False)])
    rep = worst.report("robust_diameter", mode, s_bound=s_bound, length_bound=length_bound, sets_checked=tried)
    if half_degree and g.is_regular() and n >= 4:
        rep.details["half_degree"] = _half_degree(g, rng, samples, half_eps, half_b_frac, half_deg_frac).to_row()
    return rep


def _half_degree(g: Graph, rng, samples: int, eps: float, b_frac: float, deg_frac: float) -> CheckReport:
    """Some vertex of A has at least ``deg_frac * d`` neighbours in B (|A| = eps n, |B| = b_frac n)."""
    n, d = g.n, g.max_degree()
    sa = max(1, math.ceil(eps * n))
    sb = min(n - sa, round(b_frac * n))
    worst = _Worst()
    for _ in range(samples):
        perm = rng.permutation(n)
        a = [int(v) for v in perm[:sa]]
        b = vertex_mask(int(v) for v in perm[sa : sa + sb])
        best = max((g.adj_mask[u] & b).bit_count() for u in a)
        worst.see(best - deg_frac * d, lambda a=a, b=b: {"A": a, "B": _verts(b)})
    return worst.report("half_degree", "sampled", eps=eps)


# -- degree split -----------------------------------------------------------------------------


class SplitError(RuntimeError):
    def __init__(self, message: str, worst_vertex: int | None = None):
        super().__init__(message)
        self.worst_vertex = worst_vertex


@dataclass(frozen=True)
class Split:
    a: frozenset[int]
    b: frozenset[int]
    tries: int
    margins: tuple[float, ...]  # per vertex: min of the two condition slacks


def split_margins(g: Graph, y: int, a_mask: int, b_mask: int) -> list[float]:
    """Per-vertex slack of ``deg(v,A) >= a/(3m) deg(v,Y)`` and the B analogue (min of both)."""
    m = y.bit_count()
    a, b = a_mask.bit_count(), b_mask.bit_count()
    out = []
    for v in range(g.n):
        dy = (g.adj_mask[v] & y).bit_count()
        sa = (g.adj_mask[v] & a_mask).bit_count() - a / (3 * m) * dy
        sb = (g.adj_mask[v] & b_mask).bit_count() - b / (3 * m) * dy
        out.append(min(sa, sb))
    return out


def split_conditions_hold(g: Graph, y: int, a_mask: int, b_mask: int, a: int, b: int) -> bool:
    """Exact integer form of the three split conditions."""
    if a_mask & b_mask or (a_mask | b_mask) != y:
        return False
    if a_mask.bit_count() != a or b_mask.bit_count() != b:
        return False
    m = a + b
    for v in range(g.n):
        dy = (g.adj_mask[v] & y).bit_count()
        if 3 * m * (g.adj_mask[v] & a_mask).bit_count() < a * dy:
            return False
        if 3 * m * (g.adj_mask[v] & b_mask).bit_count() < b * dy:
            return False
    return True


def degree_split(g: Graph, y, a: int, b: int, seed: int = 0, max_tries: int = 1000) -> Split:
    """Uniformly random split ``Y = A ∪ B`` with |A| = a, |B| = b, resampled until
    every vertex of G sees at least an ``a/(3m)`` (resp. ``b/(3m)``) share of its
    Y-neighbours in A (resp. B)."""
    y_mask = y if isinstance(y, int) else vertex_mask(y)
    pool = _verts(y_mask)
    if a < 1 or b < 1 or a + b != len(pool):
        raise ValueError("need a, b >= 1 and a + b = |Y|")
    rng = make_rng(seed)
    worst_v, worst_slack = None, math.inf
    for t in range(1, max_tries + 1):
        perm = rng.permutation(len(pool))
        a_mask = vertex_mask(pool[int(i)] for i in perm[:a])
        b_mask = y_mask & ~a_mask
        if split_conditions_hold(g, y_mask, a_mask, b_mask, a, b):
            margins = split_margins(g, y_mask, a_mask, b_mask)
            return Split(frozenset(_verts(a_mask)), frozenset(_verts(b_mask)), t, tuple(margins))
        margins = split_margins(g, y_mask, a_mask, b_mask)
        v = min(range(g.n), key=margins.__getitem__)
        if margins[v] < worst_slack:
            worst_v, worst_slack = v, margins[v]
    raise SplitError(f"no valid split after {max_tries} tries (worst vertex {worst_v})", worst_v)


# -- property P_alpha ---------------------------------------------------------------------------


def _budgets(g: Graph, x_list: list[int], alpha: float) -> dict[int, int]:
    return {x: math.floor(alpha * g.adj_mask[x].bit_count() + 1e-9) for x in x_list}


def min_robust_neighbourhood(g: Graph, x: int, alpha: float) -> tuple[int, list[tuple[int, int]]]:
    """Exact ``min_F |N_{G-F}(X)|`` over edge sets F using at most
    ``floor(alpha deg(x))`` edges at each x in X; returns (size, an optimal F).

    Removing a neighbour w costs one unit of budget at every x in X adjacent
    to w, so this is a small packing problem solved by branch and bound.
    """
    xs = _verts(x)
    budget = _budgets(g, xs, alpha)
    nbrs = _verts(external_neighbourhood(g, x))
    cost = {w: [u for u in xs if (g.adj_mask[u] >> w) & 1] for w in nbrs}
    order = sorted(nbrs, key=lambda w: len(cost[w]))
    best: list[int] = []
    chosen: list[int] = []
    left = dict(budget)

    def search(i: int) -> None:
        nonlocal best
        if len(chosen) + (len(order) - i) <= len(best):
            return
        if i == len(order):
            best = list(chosen)
            return
        w = order[i]
        if all(left[u] > 0 for u in cost[w]):
            for u in cost[w]:
                left[u] -= 1
            chosen.append(w)
            search(i + 1)
            chosen.pop()
            for u in cost[w]:
                left[u] += 1
        search(i + 1)

    search(0)
    f = [(u, w) for w in best for u in cost[w]]
    return len(nbrs) - len(best), f


def greedy_robust_neighbourhood(g: Graph, x: int, alpha: float) -> tuple[int, list[tuple[int, int]]]:
    """Greedy adversary: cut off the cheapest neighbours first (upper bound on the minimum)."""
    xs = _verts(x)
    left = _budgets(g, xs, alpha)
    nbrs = _verts(external_neighbourhood(g, x))
    cost = {w: [u for u in xs if (g.adj_mask[u] >> w) & 1] for w in nbrs}
    killed = []
    for w in sorted(nbrs, key=lambda w: (len(cost[w]), w)):
        if all(left[u] > 0 for u in cost[w]):
            for u in cost[w]:
                left[u] -= 1
            killed.append(w)
    f = [(u, w) for w in killed for u in cost[w]]
    return len(nbrs) - len(killed), f


def check_property_P(
    g: Graph,
    alpha: float,
    n_prime: int,
    d_prime: float,
    mode: str = "auto",
    *,
    samples: int = 2000,
    seed: int = 0,
) -> CheckReport:
    """``|N_{G-F}(X)| >= 2 d' |X|`` for all |X| <= n' and all admissible F."""
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    n = g.n
    mode = _resolve_mode(mode, n, 10)
    worst = _Worst()

    def see(x: int, exact: bool) -> None:
        size, f = (min_robust_neighbourhood if exact else greedy_robust_neighbourhood)(g, x, alpha)
        worst.see(size - 2 * d_prime * x.bit_count(), lambda: {"X": _verts(x), "F": f})

    if mode == "exhaustive":
        for x in _all_subsets(n, 1, n_prime):
            see(x, True)
    else:
        rng = make_rng(seed)
        for x in _adversarial_sets(g, max(1, n_prime)):
            if 1 <= x.bit_count() <= n_prime:
                see(x, False)
        for _ in range(samples):
            k = int(rng.integers(1, min(n_prime, n) + 1))
            see(_random_subset(rng, list(range(n)), k), False)
    return worst.report("property_P", mode, alpha=alpha, n_prime=n_prime, d_prime=d_prime)


# -- path neighbour bounds ------------------------------------------------------------------


def path_vertex_cap(g: Graph) -> int:
    """Paths on at most ``log n / log d`` vertices."""
    d = g.max_degree()
    if g.n < 2 or d < 2:
        return 1
    return max(1, math.floor(math.log(g.n) / math.log(d) + 1e-12))


def _path_slack(g: Graph, path: list[int], off_bound: int, on_bound: int) -> tuple[float, dict]:
    pm = vertex_mask(path)
    worst = math.inf
    wit: dict = {}
    for u in range(g.n):
        dd = (g.adj_mask[u] & pm).bit_count()
        slack = (on_bound if (pm >> u) & 1 else off_bound) - dd
        if slack < worst:
            worst = slack
            wit = {"path": list(path), "u": u, "deg_into_path": dd, "on_path": bool((pm >> u) & 1)}
    return worst, wit


def _all_paths(g: Graph, max_vertices: int) -> Iterator[list[int]]:
    """Every simple path with 1..max_vertices vertices, once per direction."""
    for s in range(g.n):
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            yield path
            if len(path) < max_vertices:
                for w in g.neighbours_sorted[v]:
                    if w not in path:
                        stack.append((w, path + [w]))


def path_neighbour_bound(
    g: Graph,
    mode: str = "auto",
    *,
    off_bound: int = 3,
    on_bound: int = 8,
    max_vertices: int | None = None,
    samples: int = 1000,
    seed: int = 0,
) -> CheckReport:
    """Short paths see few neighbours: ``deg(u, V(P)) <= 3`` off the path and ``<= 8`` on it."""
    cap = path_vertex_cap(g) if max_vertices is None else max_vertices
    mode = _resolve_mode(mode, g.n, EXHAUSTIVE_SUBSET_LIMIT)
    worst = _Worst()
    if mode == "exhaustive":
        for path in _all_paths(g, cap):
            slack, wit = _path_slack(g, path, off_bound, on_bound)
            worst.see(slack, wit)
    else:
        rng = make_rng(seed)
        for _ in range(samples):
            path = [int(rng.integers(g.n))]
            while len(path) < cap:
                opts = [w for w in g.neighbours_sorted[path[-1]] if w not in path]
                if not opts:
                    break
                path.append(opts[int(rng.integers(len(opts)))])
            slack, wit = _path_slack(g, path, off_bound, on_bound)
            worst.see(slack, wit)
    return worst.report("path_neighbours", mode, cap=cap)

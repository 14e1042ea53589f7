"""Cycle space, cut space, spans of k-cycles and the witness subgraph.

Everything here is an F2 subspace of the edge space of a graph, stored as a
row-reduced :class:`~hamspan.gf2.BitMatrix` over edge indices.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from hamspan import gf2
from hamspan.gf2 import BitMatrix, EchelonBasis, iter_bits
from hamspan.graph import Cycle, EdgeSet, Graph, components, cut_mask, induced_delete
from hamspan.hamilton import (
    HamiltonBudget,
    enumerate_hamilton_cycles,
    enumerate_k_cycles,
    random_hamilton_cycle,
)


class Kind(str, enum.Enum):
    CYCLE_SPACE = "cycle_space"
    CYCLE_K = "cycle_k"
    CUT_SPACE = "cut_space"
    ORTHOGONAL_COMPLEMENT = "orthogonal_complement"


class SpanResult(str, enum.Enum):
    YES = "yes"
    NO = "no"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class SubspaceBasis:
    graph: Graph
    kind: Kind
    basis: BitMatrix
    k: int | None = None
    # cycle_k only: enumeration did not finish and rank stayed below dim C(G)
    truncated: bool = False
    cycles_seen: int = 0
    saturated: bool = False

    @property
    def dimension(self) -> int:
        return self.basis.nrows

    def contains(self, mask: int) -> bool:
        return gf2.span_contains(self.basis, gf2.BitVector(self.graph.m, mask))

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "m": self.graph.m,
            "dimension": self.dimension,
            "truncated": self.truncated,
            "rows": [list(iter_bits(r)) for r in self.basis.rows],
        }


def _reduced(g: Graph, rows: Iterable[int]) -> BitMatrix:
    return gf2.row_reduce(BitMatrix(g.m, tuple(rows)))[0]


def is_even_subgraph(g: Graph, mask: int) -> bool:
    """Every vertex meets an even number of the edges in ``mask``."""
    return all((s & mask).bit_count() % 2 == 0 for s in g.star_mask)


def cycle_space_dimension(g: Graph) -> int:
    return g.m - g.n + len(components(g))


def fundamental_cycles(g: Graph) -> list[int]:
    """One cycle per non-tree edge of a BFS spanning forest."""
    parent = [-1] * g.n
    parent_edge = [-1] * g.n
    depth = [-1] * g.n
    tree = 0
    for root in range(g.n):
        if depth[root] != -1:
            continue
        depth[root] = 0
        queue = [root]
        for u in queue:
            for w in g.neighbours_sorted[u]:
                if depth[w] == -1:
                    depth[w] = depth[u] + 1
                    parent[w] = u
                    parent_edge[w] = g.index_of(u, w)
                    tree |= 1 << parent_edge[w]
                    queue.append(w)
    out = []
    for i, (u, v) in enumerate(g.edges):
        if (tree >> i) & 1:
            continue
        mask = 1 << i
        a, b = u, v
        while a != b:
            if depth[a] >= depth[b]:
                mask ^= 1 << parent_edge[a]
                a = parent[a]
            else:
                mask ^= 1 << parent_edge[b]
                b = parent[b]
        out.append(mask)
    return out


def cycle_space_basis(g: Graph) -> SubspaceBasis:
    return SubspaceBasis(g, Kind.CYCLE_SPACE, _reduced(g, fundamental_cycles(g)))


def cut_space_basis(g: Graph) -> SubspaceBasis:
    rows = []
    for comp in components(g):
        rows.extend(g.star_mask[v] for v in comp[1:])
    return SubspaceBasis(g, Kind.CUT_SPACE, _reduced(g, rows))


# -- spans of k-cycles ------------------------------------------------------------


@dataclass
class SpanConfig:
    budget: HamiltonBudget = field(default_factory=HamiltonBudget)
    # randomised Hamilton cycles tried before exhaustive enumeration
    random_probes: int = 256
    probe_nodes: int = 20_000
    # consecutive probes without a rank increase before giving up on probing
    probe_stall: int = 12
    seed: int = 0


def _probe_cycles(g: Graph, config: SpanConfig, basis: EchelonBasis, target: int) -> int:
    """Insert randomly found Hamilton cycles; stop after several useless probes."""
    if config.random_probes <= 0 or g.n < 3:
        return 0
    rng = np.random.default_rng([config.seed, g.n, g.m])
    found = 0
    misses = 0
    stall = 0
    for _ in range(config.random_probes):
        cyc = random_hamilton_cycle(g, rng, config.probe_nodes)
        if cyc is None:
            misses += 1
            if misses >= 3:
                break
            continue
        found += 1
        if basis.insert(g.cycle_mask(cyc)):
            stall = 0
        else:
            stall += 1
            if stall >= config.probe_stall:
                break
        if basis.rank >= target:
            break
    return found


def cycle_k_space(g: Graph, k: int, config: SpanConfig | None = None) -> SubspaceBasis:
    """Span of the length-k cycles, built incrementally.

    Enumeration stops as soon as the rank reaches ``dim C(G)``.  If the budget
    runs out first the result is flagged ``truncated`` and its dimension is only
    a lower bound.
    """
    config = config or SpanConfig()
    if not 3 <= k <= max(g.n, 3):
        raise ValueError(f"k must satisfy 3 <= k <= n, got k={k}, n={g.n}")
    target = cycle_space_dimension(g)
    basis = EchelonBasis(g.m)
    seen = 0
    complete = True
    if target > 0 and k <= g.n:
        if k == g.n:
            seen += _probe_cycles(g, config, basis, target)
            if basis.rank < target:
                stream = enumerate_hamilton_cycles(g, config.budget)
                for cyc in stream:
                    seen += 1
                    basis.insert(g.cycle_mask(cyc))
                    if basis.rank >= target:
                        break
                complete = stream.complete or basis.rank >= target
        elif k == g.n - 1:
            # (n-1)-cycles of G are exactly the Hamilton cycles of the G - v
            nodes_left = config.budget.max_nodes_expanded
            for v in range(g.n):
                sub = induced_delete(g, [v])
                if sub.graph.n < 3:
                    continue
                sub_cfg = SpanConfig(
                    HamiltonBudget(max(nodes_left, 1), config.budget.max_cycles, config.budget.time_limit),
                    config.random_probes,
                    config.probe_nodes,
                    config.probe_stall,
                    config.seed + v,
                )
                sub_target_basis = EchelonBasis(sub.graph.m)
                seen += _probe_cycles(sub.graph, sub_cfg, sub_target_basis, cycle_space_dimension(sub.graph))
                for r in sub_target_basis.rows():
                    basis.insert(sub.lift_edges(r))
                if basis.rank >= target:
                    break
                if sub_target_basis.rank >= cycle_space_dimension(sub.graph):
                    continue
                stream = enumerate_hamilton_cycles(sub.graph, sub_cfg.budget)
                for cyc in stream:
                    seen += 1
                    basis.insert(sub.lift_edges(sub.graph.cycle_mask(cyc)))
                    if basis.rank >= target:
                        break
                nodes_left -= stream.stats.nodes
                if basis.rank >= target:
                    break
                if not stream.complete:
                    complete = False
                    break
            complete = complete or basis.rank >= target
        else:
            stream = enumerate_k_cycles(g, k, config.budget)
            for cyc in stream:
                seen += 1
                basis.insert(g.cycle_mask(cyc))
                if basis.rank >= target:
                    break
            complete = stream.complete or basis.rank >= target
    saturated = basis.rank >= target
    return SubspaceBasis(
        g,
        Kind.CYCLE_K,
        basis.to_matrix(),
        k=k,
        truncated=not complete,
        cycles_seen=seen,
        saturated=saturated,
    )


def spans(g: Graph, k: int, config: SpanConfig | None = None) -> SpanResult:
    return span_result(cycle_k_space(g, k, config))


def span_result(ck: SubspaceBasis) -> SpanResult:
    if ck.saturated:
        return SpanResult.YES
    if ck.truncated:
        return SpanResult.TRUNCATED
    return SpanResult.NO


# -- witness subgraph ----------------------------------------------------------------


@dataclass(frozen=True)
class WitnessR:
    edges: EdgeSet
    # certificate: orthogonal to every row of the C_n basis, and outside the cut space
    orthogonal_to_hamilton_span: bool
    outside_cut_space: bool
    normalized: bool = False
    degenerate: bool = False  # R = E(G); condition (C1) fails
    advisory: bool = False  # the C_n basis was truncated

    def to_json(self) -> dict:
        return {
            "edges": self.edges.indices(),
            "m": self.edges.graph.m,
            "orthogonal_to_hamilton_span": self.orthogonal_to_hamilton_span,
            "outside_cut_space": self.outside_cut_space,
            "normalized": self.normalized,
            "degenerate": self.degenerate,
            "advisory": self.advisory,
        }


def orthogonal_complement(space: SubspaceBasis) -> SubspaceBasis:
    return SubspaceBasis(
        space.graph,
        Kind.ORTHOGONAL_COMPLEMENT,
        gf2.row_reduce(gf2.null_space(space.basis))[0],
    )


def _orthogonal(mask: int, rows: Iterable[int]) -> bool:
    return all((mask & r).bit_count() % 2 == 0 for r in rows)


def find_witness(
    g: Graph,
    hamilton_span: SubspaceBasis | None = None,
    *,
    depth: int = 3,
    config: SpanConfig | None = None,
) -> WitnessR | None:
    """An edge set meeting every Hamilton cycle evenly but not a cut, or None.

    Scans the null-space basis of the Hamilton-cycle span, then XOR
    combinations of up to ``depth`` basis vectors, preferring candidates other
    than E(G).  None means C_n(G) = C(G) (advisory if enumeration was truncated).
    """
    if hamilton_span is None:
        hamilton_span = cycle_k_space(g, g.n, config) if g.n >= 3 else None
    if hamilton_span is None:
        hrows: tuple[int, ...] = ()
        truncated = False
    else:
        hrows = hamilton_span.basis.rows
        truncated = hamilton_span.truncated and not hamilton_span.saturated
    if hamilton_span is not None and hamilton_span.saturated:
        return None
    null = gf2.null_space(BitMatrix(g.m, hrows)).rows
    cut = EchelonBasis(g.m)
    for r in cut_space_basis(g).basis.rows:
        cut.insert(r)
    everything = g.all_edges_mask()
    fallback = None
    for size in range(1, max(depth, 1) + 1):
        for combo in itertools.combinations(null, size):
            mask = 0
            for x in combo:
                mask ^= x
            if not mask or cut.contains(mask):
                continue
            if mask == everything:
                fallback = fallback or mask
                continue
            return _make_witness(g, mask, hrows, cut, truncated)
    if fallback is not None:
        return _make_witness(g, fallback, hrows, cut, truncated)
    return None


def _make_witness(g: Graph, mask: int, hrows, cut: EchelonBasis, truncated: bool, normalized=False) -> WitnessR:
    return WitnessR(
        EdgeSet(g, mask),
        orthogonal_to_hamilton_span=_orthogonal(mask, hrows),
        outside_cut_space=not cut.contains(mask),
        normalized=normalized,
        degenerate=mask == g.all_edges_mask(),
        advisory=truncated,
    )


def half_degree_violations(g: Graph, mask: int) -> list[int]:
    """Vertices v with ``|R ∩ ∂(v)| < deg(v)/2``."""
    return [v for v in range(g.n) if 2 * (g.star_mask[v] & mask).bit_count() < g.adj_mask[v].bit_count()]


def normalize_witness(g: Graph, r: WitnessR) -> WitnessR:
    """Flip vertex stars until every vertex keeps at least half its edges in R.

    Each flip strictly increases |R|, so the loop terminates; the result stays
    in the same coset of the cut space.
    """
    mask = r.edges.bits
    while True:
        bad = half_degree_violations(g, mask)
        if not bad:
            break
        mask ^= g.star_mask[bad[0]]
    return WitnessR(
        EdgeSet(g, mask),
        orthogonal_to_hamilton_span=r.orthogonal_to_hamilton_span,
        outside_cut_space=r.outside_cut_space,
        normalized=True,
        degenerate=mask == g.all_edges_mask(),
        advisory=r.advisory,
    )


EXHAUSTIVE_PARTITION_LIMIT = 18


def partition_violation(g: Graph, mask: int) -> tuple[int, str] | None:
    """First partition ``V = A ∪ B`` breaking the partition condition, or None.

    Returns ``(mask of A, reason)``; vertex 0 is always placed in B.

    Checks ``e_R(A,B) >= e_G(A,B)/2`` and ``R != G[A,B]`` over all 2^(n-1)
    partitions; only for n up to EXHAUSTIVE_PARTITION_LIMIT.
    """
    n = g.n
    if n > EXHAUSTIVE_PARTITION_LIMIT:
        raise ValueError(f"exhaustive partition check limited to n <= {EXHAUSTIVE_PARTITION_LIMIT}")
    # Gray-code walk over subsets A of {1..n-1}; the cut mask updates by one star per step.
    cut = 0
    prev = 0
    for i in range(1 << max(n - 1, 0)):
        gray = i ^ (i >> 1)
        diff = gray ^ prev
        if diff:
            v = diff.bit_length()  # bit j of gray <-> vertex j+1
            cut ^= g.star_mask[v]
        prev = gray
        if 2 * (cut & mask).bit_count() < cut.bit_count():
            return gray << 1, "half"
        if mask == cut:
            return gray << 1, "equal"
    return None


def normalize_witness_exhaustive(g: Graph, r: WitnessR) -> WitnessR:
    """Flip whole cuts until the partition half-condition holds for every partition."""
    mask = normalize_witness(g, r).edges.bits
    while True:
        bad = partition_violation(g, mask)
        if bad is None or bad[1] == "equal":
            break
        mask ^= cut_mask(g, bad[0])
    return WitnessR(
        EdgeSet(g, mask),
        r.orthogonal_to_hamilton_span,
        r.outside_cut_space,
        normalized=True,
        degenerate=mask == g.all_edges_mask(),
        advisory=r.advisory,
    )


# -- chord decomposition ------------------------------------------------------------


def chord_decompose(g: Graph, h: Cycle, chord: tuple[int, int]) -> tuple[Cycle, Cycle]:
    """Split cycle h along a chord into two shorter cycles whose XOR is h."""
    a, b = chord
    if not g.has_edge(a, b):
        raise ValueError(f"{chord} is not an edge of the graph")
    vs = list(h.vertices)
    if a not in vs or b not in vs:
        raise ValueError(f"{chord} does not have both endpoints on the cycle")
    i, j = sorted((vs.index(a), vs.index(b)))
    L = len(vs)
    if j - i in (1, L - 1):
        raise ValueError(f"{chord} is an edge of the cycle, not a chord")
    c1 = Cycle.of(g, vs[i : j + 1])
    c2 = Cycle.of(g, vs[j:] + vs[: i + 1])
    return c1, c2


def find_chord(g: Graph, h: Cycle) -> tuple[int, int] | None:
    on = set(h.vertices)
    for idx in iter_bits(g.all_edges_mask() & ~h.edges):
        u, v = g.edges[idx]
        if u in on and v in on:
            return (u, v)
    return None


def dumps_json(obj: SubspaceBasis | WitnessR) -> str:
    return json.dumps(obj.to_json(), sort_keys=True)

"""Random graph models: random regular graphs, G(n, p), dense seeds and perturbed unions.

Randomness comes from numpy's counter-based Philox generator keyed directly
by a 64-bit seed.  Independent streams (trial ``i``, retry ``j``) use
``sub_seed(seed, i)``, a BLAKE2b hash of the pair, so parallel and serial runs
see identical streams.
"""

from __future__ import annotations

import hashlib
import math
import struct
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from hamspan.graph import Graph

SEED_MASK = (1 << 64) - 1


class SamplingError(RuntimeError):
    pass


def sub_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th independent sub-stream of ``seed``."""
    data = struct.pack("<QQ", seed & SEED_MASK, index & SEED_MASK)
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & SEED_MASK))


# -- random regular graphs -------------------------------------------------------------


@dataclass(frozen=True)
class Pairing:
    """A raw configuration-model outcome: a perfect matching of the n*d half-edges."""

    n: int
    d: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def loops(self) -> int:
        return sum(1 for u, v in self.pairs if u == v)

    @property
    def multi_edges(self) -> int:
        """Number of surplus parallel copies (a double edge counts 1)."""
        counts = Counter((min(u, v), max(u, v)) for u, v in self.pairs if u != v)
        return sum(c - 1 for c in counts.values())

    @property
    def is_simple(self) -> bool:
        return self.loops == 0 and self.multi_edges == 0

    def to_graph(self) -> Graph:
        if not self.is_simple:
            raise SamplingError("pairing has loops or multi-edges")
        return Graph(self.n, self.pairs)


def sample_multiregular(n: int, d: int, seed: int) -> Pairing:
    if n * d % 2:
        raise ValueError("n * d must be even")
    if n < 0 or d < 0:
        raise ValueError("n and d must be non-negative")
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    rng.shuffle(stubs)
    pts = stubs.reshape(-1, 2)
    return Pairing(n, d, tuple((int(a), int(b)) for a, b in pts))


def _check_regular_params(n: int, d: int) -> None:
    if n * d % 2:
        raise ValueError("n * d must be even")
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")


REJECTION_BATCH = 256


def _rejection_batch(n: int, d: int, seed: int, batch: int = REJECTION_BATCH) -> tuple[list[tuple[int, int]] | None, int]:
    """Draw ``batch`` independent pairings; return the first simple one and its position.

    Taking the first simple pairing of an i.i.d. sequence is still exactly
    uniform over simple graphs.
    """
    rng = make_rng(seed)
    stubs = rng.permuted(np.tile(np.repeat(np.arange(n), d), (batch, 1)), axis=1)
    pts = stubs.reshape(batch, -1, 2)
    lo = pts.min(axis=2)
    hi = pts.max(axis=2)
    bad = np.any(lo == hi, axis=1)
    keys = np.sort(lo * n + hi, axis=1)
    bad |= np.any(keys[:, 1:] == keys[:, :-1], axis=1)
    good = np.flatnonzero(~bad)
    if good.size == 0:
        return None, batch
    i = int(good[0])
    return [(int(a), int(b)) for a, b in zip(lo[i], hi[i])], i + 1


def _pairing_step_once(n: int, d: int, seed: int) -> list[tuple[int, int]] | None:
    """Pair half-edges one at a time, only ever choosing suitable pairs.

    Stalls (returns None) when the remaining points admit no suitable pair.
    """
    rng = make_rng(seed)
    edges: set[tuple[int, int]] = set()
    order: list[tuple[int, int]] = []
    stubs = list(np.repeat(np.arange(n), d))
    while stubs:
        k = len(stubs)
        placed = False
        for _ in range(8 * k):
            i, j = rng.integers(k, size=2)
            if i == j:
                continue
            a, b = int(stubs[i]), int(stubs[j])
            e = (a, b) if a < b else (b, a)
            if a == b or e in edges:
                continue
            edges.add(e)
            order.append(e)
            for idx in sorted((int(i), int(j)), reverse=True):
                stubs[idx] = stubs[-1]
                stubs.pop()
            placed = True
            break
        if not placed:
            remaining = set(int(s) for s in stubs)
            if not any(
                (min(a, b), max(a, b)) not in edges for a in remaining for b in remaining if a != b
            ):
                return None
    return order


def expected_acceptance(d: int) -> float:
    """Asymptotic probability that a configuration-model pairing is simple."""
    return math.exp(-(d * d - 1) / 4)


@dataclass(frozen=True)
class RegularSample:
    graph: Graph
    attempts: int
    method: str
    complemented: bool = False


def sample_regular_stats(
    n: int,
    d: int,
    seed: int,
    *,
    method: str = "auto",
    max_attempts: int = 20_000,
) -> RegularSample:
    """Simple d-regular graph on n vertices plus the number of pairings drawn.

    ``rejection`` draws whole pairings and discards any with a loop or a
    multi-edge, which is exactly uniform; pairings are drawn in batches of
    REJECTION_BATCH per sub-seed and ``max_attempts`` counts sub-seeds.
    ``pairing`` builds the pairing one suitable pair at a time (asymptotically
    uniform, practical for larger d).  ``auto`` uses rejection while the
    expected acceptance rate is at least 1e-4 and falls back to ``pairing``
    otherwise.

    For ``d > (n - 1) / 2`` the sampler draws the (n-1-d)-regular complement
    instead; complementation is a bijection, so uniformity carries over.
    """
    _check_regular_params(n, d)
    if 2 * d > n - 1:
        s = sample_regular_stats(n, n - 1 - d, seed, method=method, max_attempts=max_attempts)
        return RegularSample(_complement(s.graph), s.attempts, s.method, True)
    if method == "auto":
        method = "rejection" if expected_acceptance(d) >= 1e-4 or d <= 2 else "pairing"
    if method not in ("rejection", "pairing"):
        raise ValueError(f"unknown method {method!r}")
    attempts = 0
    for j in range(max_attempts):
        if method == "rejection":
            edges, used = _rejection_batch(n, d, sub_seed(seed, j))
        else:
            edges, used = _pairing_step_once(n, d, sub_seed(seed, j)), 1
        attempts += used
        if edges is not None:
            return RegularSample(Graph(n, edges), attempts, method)
    raise SamplingError(f"no simple {d}-regular graph on {n} vertices after {attempts} attempts ({method})")


def _complement(g: Graph) -> Graph:
    return Graph(g.n, [(i, j) for i in range(g.n) for j in range(i + 1, g.n) if (i, j) not in g.edge_index])


def sample_regular(n: int, d: int, seed: int, **kwargs) -> Graph:
    return sample_regular_stats(n, d, seed, **kwargs).graph


# -- binomial random graphs --------------------------------------------------------------


def _gnp_pairs(n: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if n < 2 or p == 0:
        return []
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return [(int(a), int(b)) for a, b in zip(iu[keep], ju[keep])]


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    return Graph(n, _gnp_pairs(n, p, make_rng(seed)))


def perturb(h: Graph, p: float, seed: int) -> Graph:
    """``H ∪ G(n, p)``: H keeps its edge indices, new random edges are appended."""
    extra = [e for e in _gnp_pairs(h.n, p, make_rng(seed)) if e not in h.edge_index]
    return Graph(h.n, list(h.edges) + extra)


# -- dense seeds -----------------------------------------------------------------------------


def dense_seed(kind: str, n: int, delta: float, seed: int = 0, *, variant: str = "disjoint") -> Graph:
    """An n-vertex graph with minimum degree at least ``delta * n``.

    ``two_cliques``: two cliques covering V, disjoint (``variant="disjoint"``)
    or sharing one cut vertex (``"overlapping"``); both are non-Hamiltonian.
    ``unbalanced_bipartite``: K_{s, n-s} with ``s = ceil(delta n)``.
    ``random_min_degree``: G(n, q) redrawn until the minimum degree is reached.
    """
    need = math.ceil(delta * n - 1e-9)
    if need < 1:
        raise ValueError("delta * n must be at least 1")
    if kind == "two_cliques":
        if variant == "disjoint":
            a = (n + 1) // 2
            blocks = [range(a), range(a, n)]
        elif variant == "overlapping":
            a = (n + 1) // 2
            blocks = [range(a), range(a - 1, n)]
        else:
            raise ValueError(f"unknown variant {variant!r}")
        edges = {(i, j) for blk in blocks for i in blk for j in blk if i < j}
        g = Graph(n, sorted(edges))
    elif kind == "unbalanced_bipartite":
        s = need
        if s > n - s:
            raise ValueError("smaller side ceil(delta n) exceeds half of n")
        g = Graph(n, [(i, j) for i in range(s) for j in range(s, n)])
    elif kind == "random_min_degree":
        if need > n - 1:
            raise ValueError("minimum degree exceeds n - 1")
        # expected degree a few standard deviations above the requirement
        q = min(1.0, (need + 3 * math.sqrt(need) + 1) / max(n - 1, 1))
        attempt = 0
        while True:
            g = sample_gnp(n, q, sub_seed(seed, attempt))
            if g.min_degree() >= need:
                break
            attempt += 1
            if attempt % 20 == 0:
                q = min(1.0, q * 1.1)
    else:
        raise ValueError(f"unknown dense seed kind {kind!r}")
    if g.min_degree() < need:
        raise ValueError(f"{kind} with n={n} cannot reach minimum degree {need}")
    return g


# -- model specifications ------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    n: int
    d: int | None = None
    p: float | None = None
    seed_graph: dict[str, Any] | None = None
    method: str = "auto"

    def __post_init__(self) -> None:
        if self.kind in ("regular", "multiregular"):
            if self.d is None:
                raise ValueError(f"{self.kind} model needs d")
            if self.n * self.d % 2:
                raise ValueError("n * d must be even")
            if self.kind == "regular" and not 0 <= self.d < self.n:
                raise ValueError("need 0 <= d < n")
        elif self.kind in ("gnp", "perturbed"):
            if self.p is None or not 0 <= self.p <= 1:
                raise ValueError("p must lie in [0, 1]")
            if self.kind == "perturbed" and not self.seed_graph:
                raise ValueError("perturbed model needs seed_graph")
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelSpec:
        data = dict(data)
        data.pop("seed", None)
        if data.get("kind") == "perturbed" and "seed_graph" not in data and "h" in data:
            data["seed_graph"] = data.pop("h")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None and not (k == "method" and v == "auto")}

    def sample(self, seed: int) -> Graph:
        if self.kind == "regular":
            return sample_regular(self.n, self.d, seed, method=self.method)
        if self.kind == "multiregular":
            return sample_multiregular(self.n, self.d, seed).to_graph()
        if self.kind == "gnp":
            return sample_gnp(self.n, self.p, seed)
        sg = dict(self.seed_graph)
        h = dense_seed(sg["kind"], self.n, sg["delta"], sub_seed(seed, 1), variant=sg.get("variant", "disjoint"))
        return perturb(h, self.p, sub_seed(seed, 2))

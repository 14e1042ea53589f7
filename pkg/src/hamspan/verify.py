"""Standalone checker for parity-switcher certificates.

Works on the raw JSON fields only and deliberately imports nothing from the
rest of the package, so a bug in the builder cannot hide itself here.
"""

from __future__ import annotations

import json

FIELDS = ("n", "edges", "r", "cycle", "connectors", "even_path", "odd_path", "outer_path", "hamilton_cycle")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _walk_edges(seq, closed):
    pairs = list(zip(seq, seq[1:]))
    if closed and len(seq) > 1:
        pairs.append((seq[-1], seq[0]))
    return [frozenset(p) for p in pairs]


def verify_certificate(cert: dict) -> list[str]:
    """Problems found in ``cert``; an empty list means the certificate is valid."""
    problems: list[str] = []
    for f in FIELDS:
        if f not in cert:
            problems.append(f"missing field {f}")
    if problems:
        return problems
    n = cert["n"]
    if not _is_int(n) or n < 4:
        return ["n must be an integer >= 4"]

    index = {}
    for i, e in enumerate(cert["edges"]):
        if not isinstance(e, (list, tuple)) or len(e) != 2 or not all(_is_int(v) and 0 <= v < n for v in e):
            return [f"edge {i} is malformed"]
        if e[0] == e[1]:
            return [f"edge {i} is a loop"]
        key = frozenset(e)
        if key in index:
            return [f"edge {i} duplicates edge {index[key]}"]
        index[key] = i
    r_idx = cert["r"]
    if not all(_is_int(i) and 0 <= i < len(index) for i in r_idx) or len(set(r_idx)) != len(r_idx):
        return ["r must list distinct edge indices"]
    r = {frozenset(cert["edges"][i]) for i in r_idx}

    def walk(name, seq, closed):
        if not isinstance(seq, list) or not all(_is_int(v) and 0 <= v < n for v in seq):
            problems.append(f"{name} is not a vertex list")
            return None
        if len(set(seq)) != len(seq):
            problems.append(f"{name} repeats a vertex")
            return None
        es = _walk_edges(seq, closed)
        for e in es:
            if e not in index:
                problems.append(f"{name} uses a non-edge {sorted(e)}")
                return None
        return es

    cycle = cert["cycle"]
    c_edges = walk("cycle", cycle, True)
    if c_edges is None:
        return problems
    L = len(cycle)
    if L < 4 or L % 2:
        return problems + ["cycle length must be even and at least 4"]
    if sum(e in r for e in c_edges) % 2 != 1:
        problems.append("cycle has an even number of R-edges")
    k = L // 2

    conns = cert["connectors"]
    if not isinstance(conns, list) or len(conns) != k - 1:
        return problems + [f"expected {k - 1} connectors"]
    w_vertices = set(cycle)
    w_edges = set(c_edges)
    c_set = set(c_edges)
    for j, p in enumerate(conns):
        i = j + 2
        es = walk(f"connector {i}", p, False)
        if es is None:
            continue
        if len(p) < 2 or p[0] != cycle[i - 1] or p[-1] != cycle[2 * k - i + 1]:
            problems.append(f"connector {i} has wrong endpoints")
            continue
        if any(e in c_set for e in es):
            problems.append(f"connector {i} uses a cycle edge")
        inner = set(p[1:-1])
        if inner & w_vertices:
            problems.append(f"connector {i} meets the cycle or an earlier connector")
        w_vertices |= inner
        w_edges |= set(es)

    v1, vk1 = cycle[0], cycle[k]
    parities = {}
    for name, want in (("even_path", 0), ("odd_path", 1)):
        p = cert[name]
        es = walk(name, p, False)
        if es is None:
            continue
        if set(p) != w_vertices or len(p) != len(w_vertices):
            problems.append(f"{name} does not cover W exactly once")
        if not p or p[0] != v1 or p[-1] != vk1:
            problems.append(f"{name} must run from v_1 to v_(k+1)")
        if any(e not in w_edges for e in es):
            problems.append(f"{name} leaves W")
        parity = sum(e in r for e in es) % 2
        parities[name] = parity
        if parity != want:
            problems.append(f"{name} has the wrong R-parity")

    outer = cert["outer_path"]
    o_edges = walk("outer_path", outer, False)
    if o_edges is not None:
        rest = (set(range(n)) - w_vertices) | {v1, vk1}
        if set(outer) != rest:
            problems.append("outer_path must cover exactly the vertices outside W plus v_1, v_(k+1)")
        if not outer or {outer[0], outer[-1]} != {v1, vk1}:
            problems.append("outer_path must join v_1 and v_(k+1)")

    ham = cert["hamilton_cycle"]
    h_edges = walk("hamilton_cycle", ham, True)
    if h_edges is not None:
        if len(ham) != n:
            problems.append("hamilton_cycle does not visit every vertex")
        if sum(e in r for e in h_edges) % 2 != 1:
            problems.append("hamilton_cycle has an even number of R-edges")
        if o_edges is not None:
            expected = []
            for name in ("even_path", "odd_path"):
                es = _walk_edges(cert[name], False)
                expected.append(set(es) | set(o_edges))
            if set(h_edges) not in expected:
                problems.append("hamilton_cycle is not the outer path closed by a W path")
    for name, want in (("even_parity", 0), ("odd_parity", 1)):
        if name in cert and cert[name] != want:
            problems.append(f"{name} field should be {want}")
    return problems


def is_valid(cert: dict) -> bool:
    return not verify_certificate(cert)


def verify_file(path) -> list[str]:
    with open(path) as fh:
        return verify_certificate(json.load(fh))

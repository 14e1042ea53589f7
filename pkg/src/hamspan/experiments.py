"""Trial runner: sample a model, run analyses, aggregate, emit CSV/JSON.

Trial ``i`` draws everything from ``sub_seed(master_seed, i)``, so results do
not depend on the number of workers.  Timing columns (prefix ``t_``) are the
only non-deterministic output and sit at the end of each row.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any

from scipy.stats import binomtest

from hamspan import checkers
from hamspan.cyclespace import (
    SpanConfig,
    SpanResult,
    chord_decompose,
    cycle_k_space,
    cycle_space_dimension,
    find_chord,
    find_witness,
    half_degree_violations,
    span_result,
)
from hamspan.graph import Cycle, Graph, induced_delete
from hamspan.hamilton import HamiltonBudget, enumerate_hamilton_cycles
from hamspan.models import ModelSpec, make_rng, sub_seed
from hamspan.switcher import PipelineConfig, PreconditionError, check_r_preconditions, odd_parity_hamilton

SCHEMA = "hamspan-trials/1"
ANALYSES = (
    "spans",
    "witness",
    "pipeline",
    "even_n",
    "edge_distribution",
    "c_expander",
    "robust_diameter",
    "property_P",
    "path_neighbours",
)
CHECKS = ANALYSES[4:]


class ConfigError(ValueError):
    pass


def _analysis(item) -> dict[str, Any]:
    if isinstance(item, str):
        item = {"id": item}
    if not isinstance(item, dict) or item.get("id") not in ANALYSES:
        raise ConfigError(f"unknown analysis {item!r}")
    return dict(item)


@dataclass
class TrialConfig:
    model: ModelSpec
    analyses: list[dict[str, Any]] = field(default_factory=lambda: [{"id": "spans"}])
    trials: int = 1
    master_seed: int = 0
    budget: HamiltonBudget = field(default_factory=HamiltonBudget)
    random_probes: int = 256
    witness_depth: int = 3
    timing: bool = True
    output: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        self.analyses = [_analysis(a) for a in self.analyses]
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrialConfig:
        data = dict(data)
        model = dict(data.pop("model"))
        seed = data.pop("master_seed", model.get("seed", 0))
        budget = data.pop("budget", {})
        out = data.pop("output", None)
        fmt = data.pop("format", "csv")
        if isinstance(out, dict):
            fmt = out.get("format", fmt)
            out = out.get("path")
        try:
            return cls(
                ModelSpec.from_dict(model),
                master_seed=int(seed),
                budget=HamiltonBudget(**budget),
                output=out,
                format=fmt,
                **data,
            )
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> TrialConfig:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "analyses": self.analyses,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "budget": {
                "max_nodes_expanded": self.budget.max_nodes_expanded,
                "max_cycles": self.budget.max_cycles,
                "time_limit": self.budget.time_limit,
            },
            "random_probes": self.random_probes,
            "witness_depth": self.witness_depth,
            "timing": self.timing,
            "output": self.output,
            "format": self.format,
        }

    def ids(self) -> list[str]:
        return [a["id"] for a in self.analyses]


def columns(config: TrialConfig) -> list[str]:
    cols = ["trial", "seed", "n", "m", "min_degree", "max_degree", "status", "error"]
    ids = config.ids()
    timing = ["t_sample"]
    if "spans" in ids or "witness" in ids:
        cols += ["spans_k", "spans", "dim_cycle", "dim_ck", "cycles_seen", "witness", "witness_size", "witness_advisory"]
        timing += ["t_spans", "t_witness"]
    if "pipeline" in ids:
        cols += ["r_source", "r_size", "pipeline", "pipeline_stage"]
        timing += ["t_pipeline"]
    if "even_n" in ids:
        cols += ["even_all_v", "even_v_fraction", "even_spans_n1", "chord_cycles", "chord_xor_ok", "chord_in_cn1", "chord_complete"]
        timing += ["t_even_n"]
    for a in ids:
        if a in CHECKS:
            cols += [f"{a}_verdict", f"{a}_margin"]
            timing += [f"t_{a}"]
    return cols + (timing if config.timing else [])


# -- one trial --------------------------------------------------------------------------


def _span_config(config: TrialConfig, seed: int) -> SpanConfig:
    return SpanConfig(config.budget, random_probes=config.random_probes, seed=seed)


def _random_half_r(g: Graph, seed: int, max_tries: int = 100) -> int | None:
    """Random edge subset pushed to the half-degree condition, rejected while it is a cut."""
    rng = make_rng(seed)
    for _ in range(max_tries):
        keep = rng.random(g.m) < 0.5
        mask = sum(1 << i for i in range(g.m) if keep[i])
        while True:
            bad = half_degree_violations(g, mask)
            if not bad:
                break
            mask ^= g.star_mask[bad[0]]
        try:
            check_r_preconditions(g, mask)
        except PreconditionError:
            continue
        return mask
    return None


def _check(g: Graph, a: dict[str, Any], seed: int) -> checkers.CheckReport:
    kind = a["id"]
    params = {k: v for k, v in a.items() if k != "id"}
    params.setdefault("seed", seed)
    if kind == "edge_distribution":
        return checkers.check_edge_distribution(g, **params)
    if kind == "c_expander":
        return checkers.is_c_expander(g, params.pop("c", 2.0), **params)
    if kind == "property_P":
        return checkers.check_property_P(g, params.pop("alpha"), params.pop("n_prime"), params.pop("d_prime"), **params)
    if kind == "path_neighbours":
        return checkers.path_neighbour_bound(g, **params)
    if kind == "robust_diameter":
        r = _random_half_r(g, sub_seed(seed, 7))
        if r is None:
            r = g.all_edges_mask()
        return checkers.robust_diameter(g, r, params.pop("s_bound", 1), params.pop("length_bound", g.n), **params)
    raise ConfigError(kind)


def run_trial(config: TrialConfig, index: int) -> dict[str, Any]:
    seed = sub_seed(config.master_seed, index)
    row: dict[str, Any] = {c: "" for c in columns(config)}
    row.update(trial=index, seed=seed, status="ok")
    t0 = time.perf_counter()
    try:
        g = config.model.sample(sub_seed(seed, 0))
    except Exception as exc:  # noqa: BLE001 - recorded per row
        row.update(status="error", error=f"sample: {exc}")
        return row
    if config.timing:
        row["t_sample"] = time.perf_counter() - t0
    row.update(n=g.n, m=g.m, min_degree=g.min_degree(), max_degree=g.max_degree())
    try:
        _run_analyses(config, g, seed, row)
    except Exception as exc:  # noqa: BLE001 - recorded per row
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return row


def _timed(config: TrialConfig, row: dict[str, Any], key: str, fn):
    t0 = time.perf_counter()
    out = fn()
    if config.timing:
        row[key] = time.perf_counter() - t0
    return out


def _run_analyses(config: TrialConfig, g: Graph, seed: int, row: dict[str, Any]) -> None:
    ids = config.ids()
    by_id = {a["id"]: a for a in config.analyses}
    if "spans" in ids or "witness" in ids:
        k = by_id.get("spans", {}).get("k", g.n)
        span_cfg = _span_config(config, sub_seed(seed, 3))
        ck = _timed(config, row, "t_spans", lambda: cycle_k_space(g, k, span_cfg))
        res = span_result(ck)
        row.update(spans_k=k, spans=res.value, dim_cycle=cycle_space_dimension(g), dim_ck=ck.dimension, cycles_seen=ck.cycles_seen)
        # witness search cross-checks every non-spanning Hamilton result
        if k == g.n and ("witness" in ids or res is not SpanResult.YES):
            w = _timed(config, row, "t_witness", lambda: find_witness(g, ck, depth=config.witness_depth))
            row["witness"] = "none" if w is None else "found"
            row["witness_size"] = "" if w is None else len(w.edges)
            row["witness_advisory"] = "" if w is None else w.advisory
            if res is SpanResult.YES and w is not None:
                row.update(status="duality_violation", error="spans = yes but a witness was found")
            if res is SpanResult.NO and w is None:
                row.update(status="duality_violation", error="spans = no but no witness was found")
        else:
            row["witness"] = "skipped"
    if "pipeline" in ids:
        a = by_id["pipeline"]
        source = a.get("r_source", "random_half")
        if source == "witness":
            w = find_witness(g, cycle_k_space(g, g.n, _span_config(config, sub_seed(seed, 3))))
            r = None if w is None else w.edges.bits
        elif source == "random_half":
            r = _random_half_r(g, sub_seed(seed, 4))
        else:
            raise ConfigError(f"unknown r_source {source!r}")
        row["r_source"] = source
        if r is None:
            row.update(pipeline="skipped", pipeline_stage="no_r")
        else:
            cfg = PipelineConfig(seed=sub_seed(seed, 5) & 0xFFFFFFFF)
            res = _timed(config, row, "t_pipeline", lambda: odd_parity_hamilton(g, r, cfg))
            row.update(r_size=r.bit_count(), pipeline="yes" if res.ok else "no", pipeline_stage=res.stage)
    if "even_n" in ids:
        cap = by_id["even_n"].get("max_cycles")
        rep = _timed(config, row, "t_even_n", lambda: even_n_reduction(g, _span_config(config, sub_seed(seed, 6)), cap))
        row.update(
            even_all_v=rep.all_vertices.value,
            even_v_fraction=rep.vertex_fraction,
            even_spans_n1=rep.spans_n_minus_1.value,
            chord_cycles=rep.chord_cycles,
            chord_xor_ok=rep.chord_xor_ok,
            chord_in_cn1=rep.chord_in_cn1,
            chord_complete=rep.chord_complete,
        )
    for a in config.analyses:
        if a["id"] in CHECKS:
            rep = _timed(config, row, f"t_{a['id']}", lambda: _check(g, a, sub_seed(seed, 8)))
            row[f"{a['id']}_verdict"] = rep.verdict
            row[f"{a['id']}_margin"] = rep.margin


# -- even n -----------------------------------------------------------------------------


@dataclass
class EvenNReport:
    per_vertex: list[SpanResult]
    all_vertices: SpanResult
    spans_n_minus_1: SpanResult
    chord_cycles: int
    chord_xor_ok: int
    chord_in_cn1: int
    chord_complete: bool

    @property
    def vertex_fraction(self) -> float:
        if not self.per_vertex:
            return 0.0
        return sum(r is SpanResult.YES for r in self.per_vertex) / len(self.per_vertex)

    def to_json(self) -> dict[str, Any]:
        return {
            "per_vertex": [r.value for r in self.per_vertex],
            "all_vertices": self.all_vertices.value,
            "spans_n_minus_1": self.spans_n_minus_1.value,
            "vertex_fraction": self.vertex_fraction,
            "chord_cycles": self.chord_cycles,
            "chord_xor_ok": self.chord_xor_ok,
            "chord_in_cn1": self.chord_in_cn1,
            "chord_complete": self.chord_complete,
        }


def _combine(results: list[SpanResult]) -> SpanResult:
    if any(r is SpanResult.NO for r in results):
        return SpanResult.NO
    if any(r is SpanResult.TRUNCATED for r in results):
        return SpanResult.TRUNCATED
    return SpanResult.YES


def even_n_reduction(g: Graph, config: SpanConfig | None = None, max_cycles: int | None = None) -> EvenNReport:
    """Vertex-deletion and chord checks behind the C_(n-1) spanning result for even n.

    For each v, does C_(n-1)(G - v) = C(G - v)?  Then every enumerated Hamilton
    cycle with a chord is split into two shorter cycles, checked to XOR back to
    it and to lie in the span C_(n-1)(G).  ``max_cycles`` caps that
    enumeration (default: the budget's own cap).
    """
    if g.n % 2:
        raise ValueError("even_n_reduction needs an even number of vertices")
    config = config or SpanConfig()
    per_vertex = []
    for v in range(g.n):
        sub = induced_delete(g, [v]).graph
        if sub.n < 3:
            per_vertex.append(SpanResult.NO)
            continue
        cfg = SpanConfig(config.budget, config.random_probes, config.probe_nodes, config.probe_stall, config.seed + v)
        per_vertex.append(span_result(cycle_k_space(sub, sub.n, cfg)))
    cn1 = cycle_k_space(g, g.n - 1, config) if g.n >= 4 else None
    spans_n1 = span_result(cn1) if cn1 is not None else SpanResult.NO
    cap = config.budget.max_cycles if max_cycles is None else max_cycles
    budget = HamiltonBudget(config.budget.max_nodes_expanded, cap, config.budget.time_limit)
    stream = enumerate_hamilton_cycles(g, budget) if g.n >= 3 else []
    checked = xor_ok = inside = 0
    for vs in stream:
        h = Cycle.of(g, vs)
        chord = find_chord(g, h)
        if chord is None:
            continue
        c1, c2 = chord_decompose(g, h, chord)
        checked += 1
        xor_ok += (c1.edges ^ c2.edges) == h.edges
        inside += cn1 is not None and cn1.contains(c1.edges) and cn1.contains(c2.edges)
    complete = bool(getattr(stream, "complete", True))
    return EvenNReport(per_vertex, _combine(per_vertex), spans_n1, checked, xor_ok, inside, complete)


# -- running and reporting -------------------------------------------------------------


def _run_one(args: tuple[dict[str, Any], int]) -> dict[str, Any]:
    data, index = args
    return run_trial(TrialConfig.from_dict(data), index)


@dataclass
class TrialReport:
    config: dict[str, Any]
    columns: list[str]
    rows: list[dict[str, Any]]

    @property
    def aggregate(self) -> dict[str, dict[str, Any]]:
        return aggregate(self.rows, self.columns)


YES_NO = ("spans", "witness", "pipeline", "even_all_v", "even_spans_n1")


def wilson_interval(yes: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    if total == 0:
        return (0.0, 1.0)
    ci = binomtest(yes, total).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def aggregate(rows: list[dict[str, Any]], cols: list[str]) -> dict[str, dict[str, Any]]:
    """Fraction of trials with a positive outcome, per outcome column.

    The positive value is ``yes`` (``found`` for the witness column, ``holds``
    for checker verdicts); the denominator is the number of trials.
    """
    out: dict[str, dict[str, Any]] = {}
    total = len(rows)
    for c in cols:
        if c in YES_NO:
            positive = "found" if c == "witness" else "yes"
        elif c.endswith("_verdict"):
            positive = "holds"
        else:
            continue
        yes = sum(1 for r in rows if str(r.get(c, "")) == positive)
        lo, hi = wilson_interval(yes, total)
        out[c] = {
            "positive": positive,
            "count": yes,
            "total": total,
            "fraction": yes / total if total else 0.0,
            "ci_low": lo,
            "ci_high": hi,
        }
    out["status"] = {"positive": "ok", "count": sum(1 for r in rows if r.get("status") == "ok"), "total": total}
    return out


def run_trials(config: TrialConfig, workers: int = 1) -> TrialReport:
    """Run every trial; rows come back in trial order whatever the worker count."""
    cols = columns(config)
    if workers <= 1:
        rows = [run_trial(config, i) for i in range(config.trials)]
    else:
        data = config.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, [(data, i) for i in range(config.trials)], chunksize=max(1, config.trials // (4 * workers))))
    return TrialReport(config.to_dict(), cols, rows)


def _cell(v: Any) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(round(v, 12))
    return str(v)


def _aggregate_row(report: TrialReport) -> dict[str, str]:
    agg = report.aggregate
    row = {c: "" for c in report.columns}
    row["trial"] = "aggregate"
    for c, a in agg.items():
        if c == "status":
            row["status"] = f"{a['count']}/{a['total']}"
        elif c in row:
            row[c] = f"{a['fraction']:.6f} ({a['count']}/{a['total']}) [{a['ci_low']:.4f},{a['ci_high']:.4f}]"
    return row


def emit_csv(report: TrialReport) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for r in report.rows:
        w.writerow([_cell(r.get(c, "")) for c in report.columns])
    if report.rows:
        agg = _aggregate_row(report)
        w.writerow([agg[c] for c in report.columns])
    return buf.getvalue()


def emit_json(report: TrialReport) -> str:
    return json.dumps(
        {
            "schema": SCHEMA,
            "config": report.config,
            "columns": report.columns,
            "rows": report.rows,
            "aggregate": report.aggregate,
        },
        indent=1,
        sort_keys=True,
    )


def report_emit(report: TrialReport, fmt: str = "csv", path=None) -> str:
    text = emit_csv(report) if fmt == "csv" else emit_json(report) if fmt == "json" else None
    if text is None:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        FsPath(path).write_text(text)
    return text


def strip_timing(csv_text: str) -> str:
    """Drop the ``t_*`` columns (everything else is deterministic)."""
    lines = csv_text.splitlines(keepends=True)
    head = [ln for ln in lines if ln.startswith("#")]
    body = list(csv.reader(io.StringIO("".join(ln for ln in lines if not ln.startswith("#")))))
    if not body:
        return "".join(head)
    keep = [i for i, c in enumerate(body[0]) if not c.startswith("t_")]
    buf = io.StringIO()
    buf.write("".join(head))
    w = csv.writer(buf, lineterminator="\n")
    for r in body:
        w.writerow([r[i] for i in keep])
    return buf.getvalue()


def load_report(path) -> TrialReport:
    """Read a report written by :func:`report_emit` (JSON or CSV)."""
    text = FsPath(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        return TrialReport(data["config"], data["columns"], data["rows"])
    lines = text.splitlines()
    if not lines or lines[0] != f"# schema: {SCHEMA}":
        raise ValueError("missing schema header")
    reader = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    cols = list(csv.reader(io.StringIO(lines[1])))[0] if len(lines) > 1 else []
    rows = [r for r in reader if r.get("trial") != "aggregate"]
    return TrialReport({}, cols, rows)

"""Command line interface.

Exit codes: 0 success, 1 negative result or violation, 2 usage or input
error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from hamspan import experiments, graph
from hamspan.cyclespace import (
    SpanConfig,
    SpanResult,
    cycle_k_space,
    cycle_space_dimension,
    find_witness,
    normalize_witness,
    span_result,
)
from hamspan.hamilton import HamiltonBudget
from hamspan.models import ModelSpec
from hamspan.switcher import PipelineConfig, certificate, odd_parity_hamilton
from hamspan.verify import verify_file

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _budget(args) -> HamiltonBudget:
    return HamiltonBudget(max_nodes_expanded=args.max_nodes, time_limit=args.time_limit)


def _load_graph(path: str) -> graph.Graph:
    try:
        return graph.load(path)
    except (OSError, graph.GraphFormatError) as exc:
        raise UsageError(str(exc)) from None


def _load_r(path: str, g: graph.Graph) -> int:
    """Edge indices as JSON (a list or {"r": [...]}) or whitespace separated text."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        data = json.loads(text)
        idx = data["r"] if isinstance(data, dict) else data
    except (json.JSONDecodeError, KeyError, TypeError):
        try:
            idx = [int(t) for t in text.split()]
        except ValueError:
            raise UsageError(f"{path}: expected edge indices") from None
    mask = 0
    for i in idx:
        if not isinstance(i, int) or not 0 <= i < g.m:
            raise UsageError(f"{path}: edge index {i!r} out of range")
        mask |= 1 << i
    return mask


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_sample(args) -> int:
    spec = {"kind": args.kind, "n": args.n}
    if args.d is not None:
        spec["d"] = args.d
    if args.p is not None:
        spec["p"] = args.p
    if args.seed_graph:
        kind, _, delta = args.seed_graph.partition(":")
        spec["seed_graph"] = {"kind": kind, "delta": float(delta or 0.3)}
    try:
        g = ModelSpec.from_dict(spec).sample(args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = graph.dumps(g)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_check_span(args) -> int:
    g = _load_graph(args.graph)
    k = args.k if args.k is not None else g.n
    try:
        ck = cycle_k_space(g, k, SpanConfig(_budget(args), seed=args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = span_result(ck)
    _print_json({"k": k, "spans": res.value, "dim_cycle": cycle_space_dimension(g), "dim_ck": ck.dimension, "cycles_seen": ck.cycles_seen})
    return {SpanResult.YES: OK, SpanResult.NO: NEGATIVE, SpanResult.TRUNCATED: BUDGET}[res]


def cmd_witness(args) -> int:
    g = _load_graph(args.graph)
    ck = cycle_k_space(g, g.n, SpanConfig(_budget(args), seed=args.seed)) if g.n >= 3 else None
    w = find_witness(g, ck, depth=args.depth)
    if w is None:
        _print_json({"witness": None, "truncated": bool(ck and ck.truncated and not ck.saturated)})
        return BUDGET if ck is not None and span_result(ck) is SpanResult.TRUNCATED else OK
    if args.normalize:
        w = normalize_witness(g, w)
    out = w.to_json()
    if args.output:
        Path(args.output).write_text(json.dumps(out, sort_keys=True))
    _print_json({"witness": out})
    return BUDGET if w.advisory else NEGATIVE


def cmd_pipeline(args) -> int:
    g = _load_graph(args.graph)
    r = _load_r(args.r_file, g)
    cfg = PipelineConfig(path_budget=_budget(args), seed=args.seed)
    res = odd_parity_hamilton(g, r, cfg)
    if res.ok:
        cert = certificate(g, r, res)
        if args.certificate:
            Path(args.certificate).write_text(json.dumps(cert))
        _print_json({"ok": True, "cycle": list(res.cycle.vertices), "stats": res.stats})
        return OK
    _print_json({"ok": False, "stage": res.stage, "reason": res.reason, "stats": res.stats})
    return BUDGET if res.stats.get("budget_exceeded") else NEGATIVE


def cmd_trial(args) -> int:
    try:
        config = experiments.TrialConfig.load(args.config)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    if args.no_timing:
        config.timing = False
    fmt = args.format or config.format
    out = args.output or config.output
    report = experiments.run_trials(config, workers=args.workers)
    text = experiments.report_emit(report, fmt, out)
    if out is None:
        sys.stdout.write(text)
    bad = [r for r in report.rows if r["status"] != "ok"]
    if any(r["status"] == "duality_violation" for r in bad):
        return NEGATIVE
    return OK


def cmd_even_n(args) -> int:
    g = _load_graph(args.graph)
    try:
        rep = experiments.even_n_reduction(g, SpanConfig(_budget(args), seed=args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _print_json(rep.to_json())
    if rep.spans_n_minus_1 is SpanResult.TRUNCATED or not rep.chord_complete:
        return BUDGET
    return OK if rep.spans_n_minus_1 is SpanResult.YES else NEGATIVE


def cmd_verify(args) -> int:
    try:
        problems = verify_file(args.certificate)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(str(exc)) from None
    _print_json({"valid": not problems, "problems": problems})
    return OK if not problems else NEGATIVE


def cmd_report(args) -> int:
    try:
        report = experiments.load_report(args.input)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if args.format:
        text = experiments.report_emit(report, args.format, args.output)
        if not args.output:
            sys.stdout.write(text)
        return OK
    for col, a in report.aggregate.items():
        if col == "status":
            print(f"{'status ok':24s} {a['count']}/{a['total']}")
        else:
            print(f"{col:24s} {a['fraction']:.4f}  ({a['count']}/{a['total']})  95% CI [{a['ci_low']:.4f}, {a['ci_high']:.4f}]")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamspan", description="Hamilton cycles and the cycle space over GF(2).")
    sub = p.add_subparsers(dest="command", required=True)

    def budgeted(sp):
        sp.add_argument("--max-nodes", type=int, default=5_000_000, help="search node budget")
        sp.add_argument("--time-limit", type=float, default=None, help="seconds (not reproducible)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("sample", help="sample a random graph")
    sp.add_argument("--kind", required=True, choices=["regular", "multiregular", "gnp", "perturbed"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed-graph", help="dense seed for perturbed graphs, KIND:DELTA")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("check-span", help="does C_k(G) equal C(G)?")
    sp.add_argument("graph")
    sp.add_argument("--k", type=int)
    budgeted(sp)
    sp.set_defaults(func=cmd_check_span)

    sp = sub.add_parser("witness", help="search for a witness edge set R")
    sp.add_argument("graph")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--normalize", action="store_true")
    sp.add_argument("-o", "--output")
    budgeted(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("pipeline", help="Hamilton cycle with odd R-parity via a parity switcher")
    sp.add_argument("graph")
    sp.add_argument("--r-file", required=True)
    sp.add_argument("--certificate", help="write the certificate JSON here")
    budgeted(sp)
    sp.set_defaults(func=cmd_pipeline, max_nodes=200_000)

    sp = sub.add_parser("trial", help="run a trial batch from a JSON config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--format", choices=["csv", "json"])
    sp.add_argument("-o", "--output")
    sp.add_argument("--no-timing", action="store_true", help="omit the t_* columns")
    sp.set_defaults(func=cmd_trial)

    sp = sub.add_parser("even-n", help="vertex-deletion and chord checks for even n")
    sp.add_argument("graph")
    budgeted(sp)
    sp.set_defaults(func=cmd_even_n)

    sp = sub.add_parser("verify", help="check a switcher certificate")
    sp.add_argument("--certificate", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("report", help="summarise or convert a trial report")
    sp.add_argument("input")
    sp.add_argument("--format", choices=["csv", "json"])
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

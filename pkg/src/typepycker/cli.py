"""``typepycker`` command line.

Exit status: 0 on success, 1 when the SimpliPy program is at fault (parse,
resolution or static type errors, failed runs), 2 for tool errors such as
bad flags or unreadable files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import bench
from .analysis import analyze
from .errors import TooManySites, TypePyckerError
from .flowgraph import EdgeRules
from .parser import parse, parse_prelude
from .printer import print_program
from .runtime import DEFAULT_BUDGET, elaborate, evaluate
from .selector import closest_sources
from .transform import VariantKind, make_variant

PRELUDE_ENV = "TYPEPYCKER_PRELUDE"


@dataclass
class PipelineConfig:
    inputs: list
    prelude: Optional[str] = None
    kind: VariantKind = VariantKind.GIVEN
    fast_slow: bool = False
    fmt: str = "text"
    budget: int = DEFAULT_BUDGET
    if_condition_edges: bool = False
    operand_edges: bool = True

    @property
    def rules(self) -> EdgeRules:
        return EdgeRules(if_condition=self.if_condition_edges, operands=self.operand_edges)


class ToolError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _compact(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ToolError(f"cannot read {path}: {e.strerror or e}") from None


def _load(cfg: PipelineConfig, path: str):
    prelude = parse_prelude(_read(cfg.prelude), file=cfg.prelude) if cfg.prelude else None
    return parse(_read(path), prelude, file=Path(path).name)


# -- subcommands -------------------------------------------------------------

def cmd_parse(cfg, args):
    _emit(print_program(_load(cfg, args.file)), args.out)


def cmd_callees(cfg, args):
    a = analyze(_load(cfg, args.file), cfg.rules)
    calls = []
    for nid, targets in a.callees.items():
        span = a.graph.spans[a.graph.by_origin[nid]]
        calls.append((span, sorted(t.name for t in targets)))
    calls.sort(key=lambda c: (c[0].line, c[0].column))
    if args.text:
        _emit("".join(f"{s}\t{', '.join(t) or '-'}\n" for s, t in calls), args.out)
    else:
        _emit(_dumps({"calls": [{"span": s.to_json(), "targets": t} for s, t in calls]}), args.out)


def cmd_infer(cfg, args):
    a = analyze(_load(cfg, args.file), cfg.rules)
    rows = []
    for site in a.resolved._sites():
        given, inferred = a.table[site]
        rows.append((site.span, a.label(site), given, inferred))
    rows.sort(key=lambda r: (r[0].line, r[0].column, r[1]))
    if args.json:
        _emit(_dumps({"sites": [{"site": l, "span": s.to_json(), "given": str(g), "inferred": str(i)}
                                for s, l, g, i in rows]}), args.out)
    else:
        _emit("".join(f"{s}\t{l}\t{g}\t{i}\n" for s, l, g, i in rows), args.out)


def cmd_graph(cfg, args):
    g = analyze(_load(cfg, args.file), cfg.rules).graph
    if args.dot:
        _emit(g.to_dot(), args.out)
    elif args.json:
        _emit(_dumps(g.to_json()), args.out)
    else:
        lines = [f"{v.id}\t{v.label}\n" for v in g.vertices]
        lines += [f"{u} -> {w}\n" for u, w in g.edges]
        _emit("".join(lines), args.out)


def cmd_select(cfg, args):
    a = analyze(_load(cfg, args.file), cfg.rules)
    if args.explain:
        g = a.graph
        match = [i for i in range(g.n) if g.is_site[i] and a.label(g.origins[i]) == args.explain]
        if not match:
            raise ToolError(f"no annotation site named {args.explain!r}")
        v = match[0]
        sources = sorted(closest_sources(g, v))
        if args.json:
            _emit(_compact({"site": args.explain, "closest_sources": [
                {"vertex": g.names[w], "kind": g.kinds[w], "given": str(g.given[w])} for w in sources]}),
                args.out)
        else:
            lines = [f"{args.explain}: given {g.given[v]}, inferred {g.inferred[v]}\n"]
            lines += [f"  {g.kinds[w]} {g.names[w]}\tgiven {g.given[w]}\n" for w in sources]
            if not sources:
                lines.append("  (no closest source)\n")
            _emit("".join(lines), args.out)
        return
    chosen = [{"site": a.label(s), "type": str(t)} for s, t in a.chosen.items()]
    if args.json:
        _emit(_compact({"selected": chosen}), args.out)
    else:
        _emit("".join(f"{c['site']}: {c['type']}\n" for c in chosen), args.out)


def cmd_variant(cfg, args):
    p = _load(cfg, args.file)
    _emit(print_program(make_variant(p, cfg.kind, cfg.fast_slow)), args.out)


def cmd_run(cfg, args):
    p = _load(cfg, args.file)
    q = make_variant(p, cfg.kind, cfg.fast_slow) if cfg.kind is not VariantKind.GIVEN or cfg.fast_slow else p
    outcome, report = evaluate(elaborate(q), cfg.budget)
    if args.report:
        Path(args.report).write_text(_dumps(report.to_json()), encoding="utf-8")
    if args.json:
        _emit(_dumps(report.to_json()), args.out)
    else:
        d = report.dynamic
        _emit(f"{outcome}\nstatic casts: {len(report.static_sites)}\n"
              f"dynamic casts: {report.total} (projection {d['projection']}, injection {d['injection']}, "
              f"proxy {report.proxy})\n", args.out)
    return 0 if outcome.ok else 1


def cmd_bench(cfg, args):
    if not Path(args.dir).is_dir():
        raise ToolError(f"{args.dir} is not a directory")
    results = bench.bench_run(args.dir, cfg.fast_slow, cfg.budget, args.jobs)
    if args.json:
        Path(args.json).write_text(bench.results_json(results), encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(bench.results_csv(results), encoding="utf-8")
    lines = []
    for r in results:
        if r.error:
            lines.append(f"{r.program}\terror\t{r.error}\n")
            continue
        totals = "\t".join(f"{k}={v.total}" for k, v in r.variants.items())
        lines.append(f"{r.program}\t{r.classification}\t{totals}\n")
    s = bench.summary(results)
    lines.append(f"win {s['win']}  tie {s['tie']}  loss {s['loss']}  error {s['error']}\n")
    _emit("".join(lines), args.out)


def cmd_oracle(cfg, args):
    res = bench.subset_oracle(args.file, args.max_sites, cfg.budget)
    if args.json:
        Path(args.json).write_text(_dumps(res.to_json()), encoding="utf-8")
    lines = [f"sites: {', '.join(res.sites) or '(none)'}\n"]
    for r in res.rows:
        lines.append(f"{r.mask:0{max(1, len(res.sites))}b}\t{r.total}\t{r.outcome}\n")
    lines.append(f"best: {res.best}\n")
    lines.append(f"chosen: mask {res.chosen_mask} total {res.total_of(res.chosen_mask)} "
                 f"rank {res.rank(res.chosen_mask)}\n")
    lines.append(f"infer: mask {res.infer_mask} total {res.total_of(res.infer_mask)} "
                 f"rank {res.rank(res.infer_mask)}\n")
    _emit("".join(lines), args.out)


def cmd_pipeline(cfg, args):
    p = _load(cfg, args.file)
    a = analyze(p, cfg.rules)
    lines = ["selected: " + (", ".join(f"{a.label(s)}: {t}" for s, t in a.chosen.items()) or "(none)") + "\n"]
    totals = {}
    for kind in bench.VARIANTS:
        r = bench.run_variant(p, kind, cfg.fast_slow, a, cfg.budget)
        totals[kind.value] = r.total
        lines.append(f"{kind.value:7}{r.outcome}\tstatic {r.static_sites}\tdynamic {r.total}\n")
    lines.append(f"chosen vs infer: {bench.classify(totals['chosen'], totals['infer'])}\n")
    _emit("".join(lines), args.out)


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prelude", default=os.environ.get(PRELUDE_ENV),
                        help=f"file of extern declarations (default: ${PRELUDE_ENV})")
    common.add_argument("--out", help="write output here instead of standard output")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="evaluation step budget")
    common.add_argument("--if-condition-edges", action="store_true",
                        help="also add an edge from an if condition to the if expression")
    common.add_argument("--no-operand-edges", action="store_true",
                        help="leave out the operand edges of +")

    ap = argparse.ArgumentParser(prog="typepycker", description="Select type annotations that pay off.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, file_arg=True):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if file_arg:
            sp.add_argument("file")
        sp.set_defaults(fn=fn)
        return sp

    add("parse", cmd_parse, "parse a program and print it back")
    sp = add("callees", cmd_callees, "show the possible callees of every call as JSON")
    sp.add_argument("--text", action="store_true", help="one tab-separated line per call instead")
    sp = add("infer", cmd_infer, "show given and inferred types of every annotation site")
    sp.add_argument("--json", action="store_true")
    sp = add("graph", cmd_graph, "print the data-flow graph")
    sp.add_argument("--dot", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp = add("select", cmd_select, "print the annotations chosen for appending")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--explain", metavar="SITE", help='show closest sources of SITE, e.g. "param y"')
    for name, fn, text in (("variant", cmd_variant, "write a program variant"),
                           ("run", cmd_run, "evaluate a program and count casts")):
        sp = add(name, fn, text)
        sp.add_argument("--kind", choices=[k.value for k in VariantKind], default="given")
        sp.add_argument("--fast-slow", action="store_true")
        if name == "run":
            sp.add_argument("--report", help="write the cast report as JSON")
            sp.add_argument("--json", action="store_true", help="print the cast report as JSON")
    sp = add("bench", cmd_bench, "run Given, Infer and Chosen over a corpus directory", file_arg=False)
    sp.add_argument("dir")
    sp.add_argument("--fast-slow", action="store_true")
    sp.add_argument("--json", help="write results as JSON")
    sp.add_argument("--csv", help="write results as CSV")
    sp.add_argument("--jobs", type=int, default=1)
    sp = add("oracle", cmd_oracle, "evaluate every subset of the inferred annotations")
    sp.add_argument("--max-sites", type=int, default=14)
    sp.add_argument("--json", help="write the table as JSON")
    sp = add("pipeline", cmd_pipeline, "infer, select, build variants and compare them")
    sp.add_argument("--fast-slow", action="store_true")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "--pipeline":
        argv[0] = "pipeline"
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = PipelineConfig(
        inputs=[getattr(args, "file", None) or getattr(args, "dir", None)],
        prelude=args.prelude,
        kind=VariantKind(getattr(args, "kind", "given")),
        fast_slow=getattr(args, "fast_slow", False),
        fmt="json" if getattr(args, "json", False) else "dot" if getattr(args, "dot", False) else "text",
        budget=args.budget,
        if_condition_edges=args.if_condition_edges,
        operand_edges=not args.no_operand_edges,
    )
    try:
        rc = args.fn(cfg, args)
    except ToolError as e:
        print(f"typepycker: {e}", file=sys.stderr)
        return 2
    except TooManySites as e:
        print(f"typepycker: {e.message}", file=sys.stderr)
        return 2
    except TypePyckerError as e:
        print(f"typepycker: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"typepycker: {e}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())

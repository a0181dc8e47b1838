"""Variant matrix over a corpus, and the exhaustive subset oracle.

Performance is measured in dynamic cast events, which are deterministic, so
win/tie/loss is an exact comparison of totals.
"""
from __future__ import annotations

import csv
import gc
import io
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analysis import Analysis, analyze
from .errors import TooManySites, TypePyckerError
from .flowgraph import SITE_KINDS, V_EXPR, V_LIT, FlowGraph, synthetic_graph
from .parser import parse
from .runtime import DEFAULT_BUDGET, elaborate, evaluate
from .runtime.interp import CastReport, Outcome
from .selector import selected_vertices
from .syntax import Program
from .transform import VariantKind, annotate, make_variant

VARIANTS = (VariantKind.GIVEN, VariantKind.INFER, VariantKind.CHOSEN)
CSV_COLUMNS = ("program", "variant", "static_sites", "dyn_total", "dyn_projection",
               "dyn_injection", "dyn_proxy", "outcome", "class")


@dataclass
class VariantResult:
    variant: str
    static_sites: int
    dynamic: dict
    outcome: Outcome

    @property
    def total(self) -> int:
        return sum(self.dynamic.values())

    @classmethod
    def from_report(cls, variant: str, report: CastReport) -> "VariantResult":
        return cls(variant, len(report.static_sites), dict(report.dynamic), report.outcome)

    def to_json(self) -> dict:
        return {"static_sites": self.static_sites,
                "dynamic": {"total": self.total, **self.dynamic},
                "outcome": self.outcome.to_json()}


@dataclass
class BenchResult:
    program: str
    variants: dict = field(default_factory=dict)  # variant name -> VariantResult
    classification: Optional[str] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {"program": self.program, "class": self.classification,
               "variants": {k: v.to_json() for k, v in self.variants.items()}}
        if self.error:
            out["error"] = self.error
        return out

    def rows(self) -> list[dict]:
        rows = []
        for name, v in self.variants.items():
            d = v.dynamic
            rows.append({
                "program": self.program, "variant": name, "static_sites": v.static_sites,
                "dyn_total": v.total, "dyn_projection": d["projection"],
                "dyn_injection": d["injection"],
                "dyn_proxy": d["proxy_read"] + d["proxy_write"] + d["proxy_call"],
                "outcome": v.outcome.kind, "class": self.classification or "",
            })
        if not rows:
            rows.append({c: "" for c in CSV_COLUMNS} | {"program": self.program, "outcome": "error"})
        return rows


def classify(chosen_total: int, infer_total: int) -> str:
    if chosen_total < infer_total:
        return "win"
    if chosen_total > infer_total:
        return "loss"
    return "tie"


def load(path) -> Program:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), file=path.name)


def run_variant(p: Program, kind, fast: bool = False, analysis: Analysis | None = None,
                budget: int = DEFAULT_BUDGET) -> VariantResult:
    q = make_variant(p, kind, fast, analysis)
    _, report = evaluate(elaborate(q), budget)
    return VariantResult.from_report(VariantKind(kind).value, report)


def bench_program(path, fast: bool = False, budget: int = DEFAULT_BUDGET) -> BenchResult:
    name = Path(path).stem
    result = BenchResult(name)
    try:
        p = load(path)
        a = analyze(p)
        for kind in VARIANTS:
            result.variants[kind.value] = run_variant(p, kind, fast, a, budget)
    except (TypePyckerError, OSError) as e:
        result.error = f"{type(e).__name__}: {e}"
        return result
    result.classification = classify(result.variants["chosen"].total, result.variants["infer"].total)
    return result


def _bench_args(args):
    return bench_program(*args)


def bench_run(corpus_dir, fast: bool = False, budget: int = DEFAULT_BUDGET,
              jobs: int = 1) -> list[BenchResult]:
    """Evaluate Given, Infer and Chosen for every ``*.spy`` file, sorted by program name."""
    paths = sorted(Path(corpus_dir).glob("*.spy"))
    work = [(p, fast, budget) for p in paths]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_args, work))
    else:
        results = [_bench_args(w) for w in work]
    return sorted(results, key=lambda r: r.program)


def summary(results: list[BenchResult]) -> dict:
    out = {"win": 0, "tie": 0, "loss": 0, "error": 0}
    for r in results:
        out[r.classification or "error"] += 1
    return out


def results_json(results: list[BenchResult]) -> str:
    doc = {"programs": [r.to_json() for r in results], "summary": summary(results)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def results_csv(results: list[BenchResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerows(r.rows())
    return buf.getvalue()


# -- subset oracle -----------------------------------------------------------

@dataclass
class SubsetRow:
    mask: int
    total: int
    outcome: str


@dataclass
class SubsetOracleResult:
    program: str
    sites: list[str]                 # bit i of a mask is sites[i]
    rows: list[SubsetRow]
    chosen_mask: int
    infer_mask: int

    def total_of(self, mask: int) -> int:
        return self.rows[mask].total

    @property
    def best(self) -> list[int]:
        ok = [r for r in self.rows if r.outcome == "value"]
        if not ok:
            return []
        low = min(r.total for r in ok)
        return [r.mask for r in ok if r.total == low]

    def rank(self, mask: int) -> int:
        """1 + number of successful subsets with strictly fewer events."""
        t = self.total_of(mask)
        return 1 + sum(1 for r in self.rows if r.outcome == "value" and r.total < t)

    def to_json(self) -> dict:
        return {
            "program": self.program,
            "sites": self.sites,
            "subsets": [{"mask": r.mask, "dyn_total": r.total, "outcome": r.outcome} for r in self.rows],
            "best": self.best,
            "chosen": {"mask": self.chosen_mask, "dyn_total": self.total_of(self.chosen_mask),
                       "rank": self.rank(self.chosen_mask)},
            "infer": {"mask": self.infer_mask, "dyn_total": self.total_of(self.infer_mask),
                      "rank": self.rank(self.infer_mask)},
        }


def subset_oracle(path, max_sites: int = 14, budget: int = DEFAULT_BUDGET) -> SubsetOracleResult:
    """Evaluate every subset of the inferred annotations."""
    p = load(path)
    a = analyze(p)
    inferred = a.inferred_sites
    sites = list(inferred)
    if len(sites) > max_sites:
        raise TooManySites(f"{len(sites)} inferred annotation sites exceed the limit of {max_sites}")
    rows = []
    for mask in range(1 << len(sites)):
        subset = {s: inferred[s] for i, s in enumerate(sites) if mask >> i & 1}
        _, report = evaluate(elaborate(annotate(p, subset, a.resolved)), budget)
        rows.append(SubsetRow(mask, report.total, report.outcome.kind))
    chosen_mask = sum(1 << i for i, s in enumerate(sites) if s in a.chosen)
    return SubsetOracleResult(Path(path).stem, [a.label(s) for s in sites], rows,
                              chosen_mask, (1 << len(sites)) - 1)


# -- selection timing --------------------------------------------------------

def scaling_graph(n: int, seed: int = 0, dirty: float = 0.3) -> FlowGraph:
    """Synthetic graph of ``n`` vertices: a chain, a binary tree and a ring with chords.

    Each vertex is a site or an expression at random; a ``dirty`` fraction of
    vertices has a given type containing ``*``.
    """
    rng = random.Random(seed)
    third = n // 3
    edges = [(i, i + 1) for i in range(third - 1)]
    edges += [(third + (i - 1) // 2, third + i) for i in range(1, third)]
    ring = list(range(2 * third, n))
    edges += list(zip(ring, ring[1:] + ring[:1])) if len(ring) > 1 else []
    edges += [(ring[i], ring[(i * 7 + 3) % len(ring)]) for i in range(0, len(ring), 10)]
    kinds = rng.choices(sorted(SITE_KINDS) + [V_EXPR, V_LIT], k=n)
    unknown = [rng.random() < dirty or k != V_LIT for k in kinds]
    unknown = [u and rng.random() < 0.9 for u in unknown]
    return synthetic_graph(kinds, unknown, edges)


def time_select(g: FlowGraph, repeats: int = 5) -> float:
    """Best wall time of ``repeats`` selection passes over ``g``, in seconds.

    One untimed pass warms up first, and the collector is paused so that a
    collection triggered by earlier allocations is not billed to selection.
    """
    selected_vertices(g)
    gc.collect()
    enabled = gc.isenabled()
    gc.disable()
    try:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            selected_vertices(g)
            best = min(best, time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    return best

"""One-call front end: resolve, points-to, infer, graph, select."""
from __future__ import annotations

from dataclasses import dataclass

from .flowgraph import EdgeRules, FlowGraph, build_graph
from .infer import TypeTable, infer_types
from .resolve import FUNCTION, PARAM, VAR, CalleeMap, Resolved, ReturnOf, points_to, resolve_names
from .selector import AnnotationSet, select
from .syntax import Program


@dataclass
class Analysis:
    program: Program
    resolved: Resolved
    callees: CalleeMap
    table: TypeTable
    graph: FlowGraph
    chosen: AnnotationSet

    @property
    def inferred_sites(self) -> AnnotationSet:
        """Every site whose inferred type is strictly more concrete than its given type."""
        out: AnnotationSet = {}
        for b in self.resolved.bindings:
            if b.kind in (VAR, PARAM) and self.table.inferred[b] != self.table.given[b]:
                out[b] = self.table.inferred[b]
            elif b.kind == FUNCTION:
                site = ReturnOf(b)
                if self.table.inferred[site] != self.table.given[site]:
                    out[site] = self.table.inferred[site]
        return dict(sorted(out.items(), key=lambda kv: _site_key(kv[0])))

    def label(self, site) -> str:
        return self.resolved.label(site)


def _site_key(site):
    span = site.span
    return (span.file, span.line, span.column, str(site))


def analyze(program: Program, rules: EdgeRules = EdgeRules()) -> Analysis:
    res = resolve_names(program)
    cm = points_to(res)
    table = infer_types(res, cm)
    graph = build_graph(res, cm, table, rules)
    return Analysis(program, res, cm, table, graph, select(graph))

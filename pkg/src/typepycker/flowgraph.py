"""Directed data-flow graph over variables, parameters, function names,
per-function return vertices, literals and expressions.

Edges point from producer to consumer. Every vertex carries the type the
program gives it (``given``) and the type inference found (``inferred``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ArityMismatch
from .infer import TypeTable, given_of_expr
from .printer import print_expr
from .resolve import EXTERN, FUNCTION, PARAM, VAR, CalleeMap, Resolved, ReturnOf
from .syntax import (
    Add, ArrayLit, Assign, BoolLit, Call, If, Index, IndexAssign, IntLit, Return,
    Span, Var, walk,
)
from .types import UNKNOWN, Type, contains_unknown

V_VAR, V_PARAM, V_FUNC, V_RET, V_LIT, V_EXPR = (
    "var", "param", "function-name", "return-of", "literal", "expr")
SITE_KINDS = frozenset({V_VAR, V_PARAM, V_RET})
_KIND_ORDER = {k: i for i, k in enumerate((V_FUNC, V_PARAM, V_VAR, V_RET, V_EXPR, V_LIT))}


@dataclass(frozen=True)
class EdgeRules:
    """Optional edge rules; the defaults are the standard construction."""

    if_condition: bool = False  # cond -> if-expression
    operands: bool = True       # a -> (a + b), b -> (a + b)


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str
    origin: object
    given: Type
    inferred: Type
    span: Optional[Span]
    name: str

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.name}:{self.given}/{self.inferred}"


class FlowGraph:
    """Immutable graph in column form, with CSR successor and predecessor indices."""

    def __init__(self, kinds: Sequence[str], given: Sequence[Type], inferred: Sequence[Type],
                 edges: Iterable[tuple[int, int]], *, origins=None, spans=None, names=None,
                 unknown: Optional[Sequence[bool]] = None, diagnostics=()):
        n = len(kinds)
        self.n = n
        self.kinds = list(kinds)
        self.given = list(given)
        self.inferred = list(inferred)
        self.origins = list(origins) if origins is not None else [None] * n
        self.spans = list(spans) if spans is not None else [None] * n
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        self.diagnostics = list(diagnostics)
        if unknown is None:
            cache: dict = {}
            unknown = []
            for t in self.given:
                flag = cache.get(id(t))
                if flag is None:
                    flag = cache[id(t)] = contains_unknown(t)
                unknown.append(flag)
        self.unknown = list(unknown)
        self.is_site = [k in SITE_KINDS for k in self.kinds]
        edge_set = {(u, v) for u, v in edges if u != v}
        for u, v in edge_set:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
        self.edges = sorted(edge_set)
        self.succ_ptr, self.succ_idx = _csr(n, self.edges, 0)
        self.pred_ptr, self.pred_idx = _csr(n, self.edges, 1)
        self.by_origin = {o: i for i, o in enumerate(self.origins) if o is not None}

    def __len__(self) -> int:
        return self.n

    def vertex(self, i: int) -> Vertex:
        return Vertex(i, self.kinds[i], self.origins[i], self.given[i], self.inferred[i],
                      self.spans[i], self.names[i])

    @property
    def vertices(self) -> list[Vertex]:
        return [self.vertex(i) for i in range(self.n)]

    def successors(self, i: int) -> list[int]:
        return self.succ_idx[self.succ_ptr[i]:self.succ_ptr[i + 1]]

    def predecessors(self, i: int) -> list[int]:
        return self.pred_idx[self.pred_ptr[i]:self.pred_ptr[i + 1]]

    def find(self, kind: str, name: str) -> int:
        """Id of the unique vertex with this kind and name (test and CLI helper)."""
        hits = [i for i in range(self.n) if self.kinds[i] == kind and self.names[i] == name]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} vertices match {kind}:{name}")
        return hits[0]

    def to_json(self) -> dict:
        nodes = []
        for v in self.vertices:
            nodes.append({
                "id": v.id, "kind": v.kind, "name": v.name,
                "given": str(v.given), "inferred": str(v.inferred),
                "span": v.span.to_json() if v.span else None,
            })
        return {"nodes": nodes, "edges": [list(e) for e in self.edges]}

    def to_dot(self) -> str:
        lines = ["digraph flow {"]
        for v in self.vertices:
            label = v.label.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  n{v.id} [label="{label}"];')
        for u, w in self.edges:
            lines.append(f"  n{u} -> n{w};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _csr(n: int, edges: list[tuple[int, int]], key: int) -> tuple[list[int], list[int]]:
    counts = [0] * (n + 1)
    for e in edges:
        counts[e[key] + 1] += 1
    for i in range(n):
        counts[i + 1] += counts[i]
    idx = [0] * len(edges)
    fill = counts[:-1].copy()
    other = 1 - key
    for e in edges:
        k = e[key]
        idx[fill[k]] = e[other]
        fill[k] += 1
    return counts, idx


def build_graph(res: Resolved, callees: CalleeMap, table: TypeTable,
                rules: EdgeRules = EdgeRules()) -> FlowGraph:
    proto: list[tuple] = []  # (sort key, kind, origin, given, inferred, span, name)
    binding_kind = {VAR: V_VAR, PARAM: V_PARAM, FUNCTION: V_FUNC, EXTERN: V_FUNC}
    for b in res.bindings:
        inferred = table.inferred.get(b, res.declared[b])
        proto.append((b.kind, b, res.declared[b], inferred, b.span, b.name, binding_kind[b.kind]))
    for b, d in res.defs.items():
        site = ReturnOf(b)
        proto.append(("ret", site, d.ret, table.inferred.get(site, d.ret), d.span,
                      f"return {b.name}", V_RET))
    exprs = []
    for s in res.program.stmts:
        for n in walk(s):
            if isinstance(n, (IntLit, BoolLit)):
                exprs.append((n, V_LIT))
            elif isinstance(n, (Add, Call, If, ArrayLit, Index)):
                exprs.append((n, V_EXPR))
    for e, kind in exprs:
        given = given_of_expr(e, res)
        proto.append(("expr", e.nid, given, table.inferred.get(e.nid, given), e.span,
                      print_expr(e), kind))

    def order(item):
        span = item[4]
        sk = (span.file, span.line, span.column) if span else ("", 0, 0)
        return (sk, _KIND_ORDER[item[6]], item[5])

    proto.sort(key=order)
    index = {item[1]: i for i, item in enumerate(proto)}

    def vid(e) -> int:
        if isinstance(e, Var):
            return index[res.refs[e.nid]]
        return index[e.nid]

    edges: list[tuple[int, int]] = []
    diagnostics: list[ArityMismatch] = []
    for s in res.program.stmts:
        for n in walk(s):
            if isinstance(n, Assign):
                edges.append((vid(n.value), index[res.assign_binding[n.nid]]))
            elif isinstance(n, Return):
                fn = res.def_binding[res.owner[n.nid].nid]
                edges.append((vid(n.expr), index[ReturnOf(fn)]))
            elif isinstance(n, IndexAssign):
                edges.append((vid(n.value), vid(n.target)))
            elif isinstance(n, Add) and rules.operands:
                edges.append((vid(n.lhs), vid(n)))
                edges.append((vid(n.rhs), vid(n)))
            elif isinstance(n, If):
                edges.append((vid(n.then), vid(n)))
                edges.append((vid(n.orelse), vid(n)))
                if rules.if_condition:
                    edges.append((vid(n.cond), vid(n)))
            elif isinstance(n, ArrayLit):
                edges.extend((vid(x), vid(n)) for x in n.elems)
            elif isinstance(n, Index):
                edges.append((vid(n.target), vid(n)))
            elif isinstance(n, Call):
                for t in sorted(callees.get(n.nid, ()), key=lambda b: index[b]):
                    if t.kind != FUNCTION:
                        continue
                    params = res.params[res.defs[t].nid]
                    if len(params) != len(n.args):
                        diagnostics.append(ArityMismatch(
                            f"call passes {len(n.args)} argument(s) to {t.name} "
                            f"which takes {len(params)}", n.span))
                    for a, pb in zip(n.args, params):
                        edges.append((vid(a), index[pb]))
                    edges.append((index[ReturnOf(t)], vid(n)))

    return FlowGraph(
        kinds=[p[6] for p in proto],
        given=[p[2] for p in proto],
        inferred=[p[3] for p in proto],
        edges=edges,
        origins=[p[1] for p in proto],
        spans=[p[4] for p in proto],
        names=[p[5] for p in proto],
        diagnostics=diagnostics,
    )


def synthetic_graph(kinds: Sequence[str], unknown: Sequence[bool],
                    edges: Iterable[tuple[int, int]]) -> FlowGraph:
    """Graph without a program behind it, for property tests and timing runs."""
    from .types import INT
    given = [UNKNOWN if u else INT for u in unknown]
    return FlowGraph(kinds, given, list(given), edges, unknown=unknown)

"""Static name resolution and a context-insensitive, flow-insensitive points-to analysis.

Scoping follows Python: every ``def`` body is one scope, a name assigned
anywhere in a body is local to that body, parameters shadow outer names,
and externs are visible everywhere.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .errors import ResolveError, UnboundIdentifier
from .syntax import (
    ArrayLit, Assign, Call, Def, Expr, If, Index, IndexAssign, Node,
    Program, Return, Span, Var, children, walk,
)
from .types import UNKNOWN, TFunction, Type

VAR, PARAM, FUNCTION, EXTERN = "var", "param", "function", "extern"


@dataclass(frozen=True)
class BindingId:
    kind: str
    name: str
    scope: Optional[int]  # nid of the owning Def, None for top level and externs
    span: Span = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.kind} {self.name}"


@dataclass(frozen=True)
class ReturnOf:
    """Annotation site for a function's return type."""

    fn: BindingId

    @property
    def span(self) -> Span:
        return self.fn.span

    def __str__(self) -> str:
        return f"return {self.fn.name}"


Site = BindingId | ReturnOf


@dataclass
class Resolved:
    program: Program
    refs: dict[int, BindingId] = field(default_factory=dict)            # Var nid -> binding
    assign_binding: dict[int, BindingId] = field(default_factory=dict)  # Assign nid -> binding
    def_binding: dict[int, BindingId] = field(default_factory=dict)     # Def nid -> function binding
    defs: dict[BindingId, Def] = field(default_factory=dict)
    params: dict[int, tuple[BindingId, ...]] = field(default_factory=dict)  # Def nid -> params
    declared: dict[BindingId, Type] = field(default_factory=dict)
    bindings: list[BindingId] = field(default_factory=list)
    owner: dict[int, Optional[Def]] = field(default_factory=dict)       # node nid -> enclosing Def
    assigns: dict[BindingId, list[Assign]] = field(default_factory=lambda: defaultdict(list))

    def fn_type(self, fn: BindingId) -> TFunction:
        t = self.declared[fn]
        assert isinstance(t, TFunction)
        return t

    def site_type(self, site: Site) -> Type:
        if isinstance(site, ReturnOf):
            return self.defs[site.fn].ret
        return self.declared[site]

    def has_site(self, site: Site) -> bool:
        if isinstance(site, ReturnOf):
            return site.fn in self.defs
        return site in self.declared and site.kind in (VAR, PARAM)

    def label(self, site: Site) -> str:
        """Readable site name, qualified by position only when the short name is ambiguous."""
        base = str(site)
        same = [b for b in self._sites() if str(b) == base]
        if len(same) > 1:
            return f"{base}@{site.span.line}:{site.span.column}"
        return base

    def _sites(self):
        for b in self.bindings:
            if b.kind in (VAR, PARAM):
                yield b
            elif b.kind == FUNCTION:
                yield ReturnOf(b)


def _locals_of(body) -> tuple[list, list]:
    """Assign and Def statements directly in ``body`` (not inside nested defs)."""
    assigns, defs = [], []
    for s in body:
        if isinstance(s, Assign):
            assigns.append(s)
        elif isinstance(s, Def):
            defs.append(s)
    return assigns, defs


def resolve_names(p: Program) -> Resolved:
    r = Resolved(p)
    externs = {}
    for name, t in p.prelude.items():
        b = BindingId(EXTERN, name, None, p.prelude_spans.get(name, Span("<prelude>", 1, 1, 0)))
        externs[name] = b
        r.declared[b] = t
        r.bindings.append(b)

    def declare_scope(body, scope_def: Optional[Def]) -> dict[str, BindingId]:
        scope = scope_def.nid if scope_def is not None else None
        env: dict[str, BindingId] = {}
        if scope_def is not None:
            pbs = []
            for prm in scope_def.params:
                b = BindingId(PARAM, prm.name, scope, prm.span)
                env[prm.name] = b
                r.declared[b] = prm.annot
                r.bindings.append(b)
                pbs.append(b)
            r.params[scope_def.nid] = tuple(pbs)
        assigns, defs = _locals_of(body)
        for d in defs:
            if d.name in env:
                raise ResolveError(f"function {d.name!r} clashes with a parameter", d.span)
            b = BindingId(FUNCTION, d.name, scope, d.span)
            env[d.name] = b
            r.def_binding[d.nid] = b
            r.defs[b] = d
            r.bindings.append(b)
        for a in assigns:
            b = env.get(a.name)
            if b is None:
                b = BindingId(VAR, a.name, scope, a.span)
                env[a.name] = b
                r.bindings.append(b)
            elif b.kind == FUNCTION:
                raise ResolveError(f"cannot assign to function name {a.name!r}", a.span)
            r.assign_binding[a.nid] = b
            r.assigns[b].append(a)
        # a binding's declared type is its one non-* annotation, if any
        for name, b in env.items():
            if b.kind == FUNCTION:
                continue
            annots = [a.annot for a in r.assigns.get(b, ())]
            if b.kind == PARAM:
                annots.insert(0, r.declared[b])
            concrete = {t for t in annots if t != UNKNOWN}
            if len(concrete) > 1:
                raise ResolveError(
                    f"conflicting annotations for {name!r}: " + ", ".join(sorted(map(str, concrete))),
                    b.span)
            r.declared[b] = concrete.pop() if concrete else UNKNOWN
        return env

    def visit(node: Node, envs: list, enclosing: Optional[Def]):
        r.owner[node.nid] = enclosing
        if isinstance(node, Var):
            for env in reversed(envs):
                if node.name in env:
                    r.refs[node.nid] = env[node.name]
                    break
            else:
                if node.name in externs:
                    r.refs[node.nid] = externs[node.name]
                else:
                    raise UnboundIdentifier(f"unbound identifier {node.name!r}", node.span)
            return
        if isinstance(node, Def):
            for prm in node.params:
                r.owner[prm.nid] = enclosing
            inner = declare_scope(node.body, node)
            for s in node.body:
                visit(s, envs + [inner], node)
            return
        for c in children(node):
            visit(c, envs, enclosing)

    top = declare_scope(p.stmts, None)
    for s in p.stmts:
        visit(s, [top], None)
    # function types need every parameter's declared type settled first
    for b, d in r.defs.items():
        r.declared[b] = TFunction(tuple(r.declared[pb] for pb in r.params[d.nid]), d.ret)
    return r


# -- points-to ---------------------------------------------------------------

CalleeMap = dict  # Call nid -> frozenset[BindingId]


class _PointsTo:
    """Inclusion constraints for function targets; array element cells are unified."""

    def __init__(self):
        self.parent: dict = {}
        self.elem: dict = {}
        self.funcs: dict = defaultdict(set)
        self.succ: dict = defaultdict(set)
        self.work: list = []
        self._cells = 0

    def find(self, x):
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while x != root:
            nxt = self.parent[x]
            self.parent[x] = root
            x = nxt
        return root

    def cell(self, x):
        rx = self.find(x)
        c = self.elem.get(rx)
        if c is None:
            self._cells += 1
            c = ("cell", self._cells)
            self.elem[rx] = c
        return c

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        self.parent[rb] = ra
        self.funcs[ra] |= self.funcs.pop(rb, set())
        self.succ[ra] |= self.succ.pop(rb, set())
        self.work.append(ra)
        ea, eb = self.elem.get(ra), self.elem.pop(rb, None)
        if ea is None:
            if eb is not None:
                self.elem[ra] = eb
        elif eb is not None:
            self.union(ea, eb)

    def flow(self, src, dst):
        """A value moves from ``src`` to ``dst``."""
        self.succ[self.find(src)].add(dst)
        self.work.append(self.find(src))
        self.union(self.cell(src), self.cell(dst))

    def seed(self, node, target):
        self.funcs[self.find(node)].add(target)
        self.work.append(self.find(node))

    def propagate(self):
        while self.work:
            r = self.find(self.work.pop())
            fs = self.funcs.get(r)
            if not fs:
                continue
            for s in list(self.succ.get(r, ())):
                rs = self.find(s)
                if rs == r:
                    continue
                dst = self.funcs[rs]
                if not fs <= dst:
                    dst |= fs
                    self.work.append(rs)

    def targets(self, node) -> frozenset:
        return frozenset(self.funcs.get(self.find(node), ()))


def points_to(res: Resolved) -> CalleeMap:
    pt = _PointsTo()

    def node(e: Expr):
        if isinstance(e, Var):
            return ("b", res.refs[e.nid])
        return ("e", e.nid)

    calls: list[Call] = []
    for b in res.bindings:
        if b.kind in (FUNCTION, EXTERN):
            pt.seed(("b", b), b)

    for s in res.program.stmts:
        for n in walk(s):
            if isinstance(n, Assign):
                pt.flow(node(n.value), ("b", res.assign_binding[n.nid]))
            elif isinstance(n, Return):
                d = res.owner[n.nid]
                pt.flow(node(n.expr), ("r", res.def_binding[d.nid]))
            elif isinstance(n, IndexAssign):
                pt.flow(node(n.value), pt.cell(node(n.target)))
            elif isinstance(n, If):
                pt.flow(node(n.then), node(n))
                pt.flow(node(n.orelse), node(n))
            elif isinstance(n, ArrayLit):
                for x in n.elems:
                    pt.flow(node(x), pt.cell(node(n)))
            elif isinstance(n, Index):
                pt.flow(pt.cell(node(n.target)), node(n))
            elif isinstance(n, Call):
                calls.append(n)

    wired: set = set()
    while True:
        pt.propagate()
        new = False
        for c in calls:
            for t in pt.targets(node(c.callee)):
                if t.kind != FUNCTION or (c.nid, t) in wired:
                    continue
                wired.add((c.nid, t))
                new = True
                for a, pb in zip(c.args, res.params[res.defs[t].nid]):
                    pt.flow(node(a), ("b", pb))
                pt.flow(("r", t), node(c))
        if not new:
            break
    return {c.nid: pt.targets(node(c.callee)) for c in calls}

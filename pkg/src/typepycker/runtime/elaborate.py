"""Cast insertion: make every boundary between differently typed code explicit.

Static types come from declared annotations only. Wherever a value of static
type S meets an expected type T with S != T, the value is wrapped in a
:class:`~typepycker.syntax.Cast` node; inconsistent S and T are a
:class:`StaticTypeError`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import StaticTypeError
from ..resolve import Resolved, resolve_names
from ..syntax import (
    Add, ArrayLit, Assign, BoolLit, Call, Cast, Def, ExprStmt, If, Index,
    IndexAssign, IntLit, Program, Return, Span, Var, rebuild,
)
from ..types import (
    BOOL, INT, UNKNOWN, TArray, TFunction, TUnknown, Type, consistent,
    contains_unknown, join,
)

INJECTION, PROJECTION, LATERAL = "injection", "projection", "lateral"


def direction(source: Type, target: Type) -> str:
    if isinstance(target, TUnknown) or not contains_unknown(source):
        return INJECTION
    if not contains_unknown(target):
        return PROJECTION
    return LATERAL


@dataclass(frozen=True)
class CastSite:
    span: Span
    source: Type
    target: Type

    @property
    def direction(self) -> str:
        return direction(self.source, self.target)

    def __str__(self) -> str:
        return f"{{{self.target} <= {self.source}}} at {self.span}"

    def to_json(self) -> dict:
        return {"span": self.span.to_json(), "source": str(self.source), "target": str(self.target)}


@dataclass
class CastProgram:
    program: Program
    resolved: Resolved
    static_sites: list[CastSite] = field(default_factory=list)
    types: dict[int, Type] = field(default_factory=dict)  # expression nid -> static type
    dynamic_calls: set[int] = field(default_factory=set)   # calls whose callee is typed *


class _Elaborator:
    def __init__(self, res: Resolved):
        self.res = res
        self.sites: list[CastSite] = []
        self.types: dict[int, Type] = {}
        self.dynamic_calls: set[int] = set()

    def cast(self, e, source: Type, target: Type):
        if source == target:
            return e
        if not consistent(source, target):
            raise StaticTypeError(f"expected {target}, found {source}", e.span, source, target)
        self.sites.append(CastSite(e.span, source, target))
        return Cast(e, source, target, span=e.span)

    def array_target(self, node):
        """Elaborate an indexed expression; returns (expr, element type)."""
        t, tt = self.expr(node)
        if isinstance(tt, TArray):
            return t, tt.elem
        if isinstance(tt, TUnknown):
            return self.cast(t, UNKNOWN, TArray(UNKNOWN)), UNKNOWN
        raise StaticTypeError(f"cannot index a value of type {tt}", node.span, tt, TArray(UNKNOWN))

    def expr(self, e):
        new, t = self._expr(e)
        self.types[e.nid] = t
        return new, t

    def _expr(self, e):
        if isinstance(e, IntLit):
            return e, INT
        if isinstance(e, BoolLit):
            return e, BOOL
        if isinstance(e, Var):
            return e, self.res.declared[self.res.refs[e.nid]]
        if isinstance(e, Add):
            lhs, lt = self.expr(e.lhs)
            rhs, rt = self.expr(e.rhs)
            return _same(e, lhs=self.cast(lhs, lt, INT), rhs=self.cast(rhs, rt, INT)), INT
        if isinstance(e, If):
            c, ct = self.expr(e.cond)
            a, at = self.expr(e.then)
            b, bt = self.expr(e.orelse)
            return _same(e, cond=self.cast(c, ct, BOOL), then=a, orelse=b), join(at, bt)
        if isinstance(e, ArrayLit):
            elems = []
            for x in e.elems:
                nx, xt = self.expr(x)
                elems.append(self.cast(nx, xt, UNKNOWN))
            return _same(e, elems=tuple(elems)), TArray(UNKNOWN)
        if isinstance(e, Index):
            target, elem = self.array_target(e.target)
            i, it = self.expr(e.index)
            return _same(e, target=target, index=self.cast(i, it, INT)), elem
        if isinstance(e, Call):
            callee, ft = self.expr(e.callee)
            if isinstance(ft, TUnknown):
                # checked against the callee's own signature when it runs
                self.dynamic_calls.add(e.nid)
                ft = TFunction((UNKNOWN,) * len(e.args), UNKNOWN)
            if not isinstance(ft, TFunction):
                raise StaticTypeError(f"cannot call a value of type {ft}", e.callee.span, ft, None)
            if len(ft.params) != len(e.args):
                raise StaticTypeError(
                    f"function of type {ft} called with {len(e.args)} argument(s)", e.span, ft, None)
            args = []
            for a, pt in zip(e.args, ft.params):
                na, at = self.expr(a)
                args.append(self.cast(na, at, pt))
            return _same(e, callee=callee, args=tuple(args)), ft.ret
        raise TypeError(f"unexpected expression {e!r}")

    def stmt(self, s, fn: Def | None):
        if isinstance(s, ExprStmt):
            return _same(s, expr=self.expr(s.expr)[0])
        if isinstance(s, Assign):
            v, vt = self.expr(s.value)
            declared = self.res.declared[self.res.assign_binding[s.nid]]
            return _same(s, value=self.cast(v, vt, declared))
        if isinstance(s, IndexAssign):
            target, elem = self.array_target(s.target)
            i, it = self.expr(s.index)
            v, vt = self.expr(s.value)
            return _same(s, target=target, index=self.cast(i, it, INT), value=self.cast(v, vt, elem))
        if isinstance(s, Return):
            v, vt = self.expr(s.expr)
            return _same(s, expr=self.cast(v, vt, fn.ret))
        if isinstance(s, Def):
            return _same(s, body=tuple(self.stmt(b, s) for b in s.body))
        raise TypeError(f"unexpected statement {s!r}")


def _same(node, **changes):
    """Replace fields, keeping span and nid so side tables still apply."""
    if all(getattr(node, k) is v for k, v in changes.items()):
        return node
    from dataclasses import replace
    return replace(node, **changes)


def elaborate(program: Program | Resolved) -> CastProgram:
    res = program if isinstance(program, Resolved) else resolve_names(program)
    el = _Elaborator(res)
    stmts = tuple(el.stmt(s, None) for s in res.program.stmts)
    p = Program(stmts, dict(res.program.prelude), dict(res.program.prelude_spans))
    return CastProgram(p, res, el.sites, el.types, el.dynamic_calls)


def erase(cp: CastProgram) -> CastProgram:
    """The same program with every cast removed."""
    def strip(n):
        return n.expr if isinstance(n, Cast) else None
    stmts = tuple(rebuild(s, strip) for s in cp.program.stmts)
    p = Program(stmts, dict(cp.program.prelude), dict(cp.program.prelude_spans))
    return CastProgram(p, cp.resolved, [], dict(cp.types), set(cp.dynamic_calls))

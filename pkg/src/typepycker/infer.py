"""Conservative unification-based type inference.

Every ``*`` position of a binding, return type or expression becomes a type
variable; concrete annotations stay rigid, and ``*`` positions that come
from extern signatures absorb anything. Constraints are grouped per syntactic
construct. When a group cannot be satisfied it is dropped, and every variable
it mentions is pinned to ``*`` together with every variable that was equated
with one of those or occurs in what they were bound to. Inference therefore never rejects a program and never
contradicts a given annotation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .resolve import EXTERN, FUNCTION, BindingId, CalleeMap, Resolved, ReturnOf
from .syntax import (
    Add, ArrayLit, Assign, BoolLit, Call, If, Index, IndexAssign, IntLit, Return,
    Var, walk,
)
from .types import BOOL, INT, UNKNOWN, TArray, TFunction, TUnknown, Type


@dataclass(frozen=True)
class TVar(Type):
    id: int

    def __str__(self) -> str:
        return f"'t{self.id}"


@dataclass
class TypeTable:
    """Given and inferred types keyed by BindingId, ReturnOf or expression nid."""

    given: dict = field(default_factory=dict)
    inferred: dict = field(default_factory=dict)

    def __getitem__(self, key) -> tuple[Type, Type]:
        return self.given[key], self.inferred[key]


class _Solver:
    def __init__(self, poisoned: set):
        self.subst: dict[TVar, Type] = {}
        self.poisoned = poisoned
        self.parent: dict[TVar, TVar] = {}  # variables ever equated, bound or not

    def walk(self, t: Type) -> Type:
        while isinstance(t, TVar) and t in self.subst:
            t = self.subst[t]
        return t

    def chain(self, t: Type) -> list:
        out = []
        while isinstance(t, TVar):
            out.append(t)
            t = self.subst.get(t)
        return out

    def find(self, v: TVar) -> TVar:
        root = v
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while v != root:
            v, self.parent[v] = self.parent[v], root
        return root

    def link(self, a: Type, b: Type):
        vs = self.chain(a) + self.chain(b)
        for v in vs[1:]:
            ra, rb = self.find(vs[0]), self.find(v)
            if ra != rb:
                self.parent[rb] = ra

    def related(self, vs: set) -> set:
        """Close ``vs`` under "was equated with" and "occurs in the binding of"."""
        out = set(vs)
        while True:
            roots = {self.find(v) for v in out}
            grown = {v for v in list(self.parent) if self.find(v) in roots} | out
            for v in list(grown):
                _tvars(self.subst.get(v), grown)
            if grown == out:
                return out
            out = grown

    def occurs(self, v: TVar, t: Type) -> bool:
        t = self.walk(t)
        if t == v:
            return True
        if isinstance(t, TArray):
            return self.occurs(v, t.elem)
        if isinstance(t, TFunction):
            return any(self.occurs(v, p) for p in t.params) or self.occurs(v, t.ret)
        return False

    def unify(self, a: Type, b: Type) -> bool:
        self.link(a, b)
        a, b = self.walk(a), self.walk(b)
        if a == b or isinstance(a, TUnknown) or isinstance(b, TUnknown):
            return True
        if a in self.poisoned or b in self.poisoned:
            return True
        if isinstance(a, TVar) or isinstance(b, TVar):
            v, t = (a, b) if isinstance(a, TVar) else (b, a)
            if self.occurs(v, t):
                return False
            self.subst[v] = t
            return True
        if isinstance(a, TArray) and isinstance(b, TArray):
            return self.unify(a.elem, b.elem)
        if isinstance(a, TFunction) and isinstance(b, TFunction):
            return (len(a.params) == len(b.params)
                    and all(self.unify(x, y) for x, y in zip(a.params, b.params))
                    and self.unify(a.ret, b.ret))
        return False

    def resolve(self, t: Type) -> Type:
        t = self.walk(t)
        if isinstance(t, TVar):
            return UNKNOWN
        if isinstance(t, TArray):
            return TArray(self.resolve(t.elem))
        if isinstance(t, TFunction):
            return TFunction(tuple(self.resolve(p) for p in t.params), self.resolve(t.ret))
        return t


def _tvars(t: Type, out: set) -> set:
    if isinstance(t, TVar):
        out.add(t)
    elif isinstance(t, TArray):
        _tvars(t.elem, out)
    elif isinstance(t, TFunction):
        for p in t.params:
            _tvars(p, out)
        _tvars(t.ret, out)
    return out


def solve(groups: list[list[tuple[Type, Type]]]) -> _Solver:
    """Unify all groups; a failing group is dropped and the variables it touches,
    together with everything already equated with them, are pinned to ``*``."""
    poisoned: set = set()
    dropped: set = set()
    while True:
        solver = _Solver(poisoned)
        failed = None
        for gi, group in enumerate(groups):
            if gi in dropped:
                continue
            # after the first failure, keep going only to record which variables
            # the remaining equations connect
            if not all(solver.unify(a, b) for a, b in group) and failed is None:
                failed = gi
        if failed is None:
            return solver
        dropped.add(failed)
        touched: set = set()
        for a, b in groups[failed]:
            _tvars(a, touched)
            _tvars(b, touched)
        poisoned |= solver.related(touched)


def infer_types(res: Resolved, callees: CalleeMap) -> TypeTable:
    counter = itertools.count()

    def fresh() -> TVar:
        return TVar(next(counter))

    def shape(t: Type) -> Type:
        if isinstance(t, TUnknown):
            return fresh()
        if isinstance(t, TArray):
            return TArray(shape(t.elem))
        if isinstance(t, TFunction):
            return TFunction(tuple(shape(p) for p in t.params), shape(t.ret))
        return t

    slots: dict = {}
    ret_slot: dict[BindingId, Type] = {}
    for b in res.bindings:
        if b.kind == EXTERN:
            slots[b] = res.declared[b]
        elif b.kind != FUNCTION:
            slots[b] = shape(res.declared[b])
    for b, d in res.defs.items():
        ret_slot[b] = shape(d.ret)
        slots[b] = TFunction(tuple(slots[pb] for pb in res.params[d.nid]), ret_slot[b])

    def slot(e) -> Type:
        if isinstance(e, Var):
            return slots[res.refs[e.nid]]
        if e.nid not in slots:
            if isinstance(e, IntLit):
                slots[e.nid] = INT
            elif isinstance(e, BoolLit):
                slots[e.nid] = BOOL
            elif isinstance(e, ArrayLit):
                slots[e.nid] = TArray(fresh())
            else:
                slots[e.nid] = fresh()
        return slots[e.nid]

    groups: list[list[tuple[Type, Type]]] = []
    exprs = []
    for s in res.program.stmts:
        for n in walk(s):
            if isinstance(n, Assign):
                groups.append([(slot(n.value), slots[res.assign_binding[n.nid]])])
            elif isinstance(n, Return):
                fn = res.def_binding[res.owner[n.nid].nid]
                groups.append([(slot(n.expr), ret_slot[fn])])
            elif isinstance(n, IndexAssign):
                t = fresh()
                groups.append([(slot(n.target), TArray(t)), (slot(n.value), t)])
                groups.append([(slot(n.index), INT)])
            elif isinstance(n, (IntLit, BoolLit, Var)):
                exprs.append(n)
                slot(n)
            elif isinstance(n, Add):
                exprs.append(n)
                groups.append([(slot(n.lhs), INT), (slot(n.rhs), INT), (slot(n), INT)])
            elif isinstance(n, If):
                exprs.append(n)
                groups.append([(slot(n.cond), BOOL)])
                groups.append([(slot(n), slot(n.then)), (slot(n), slot(n.orelse))])
            elif isinstance(n, ArrayLit):
                exprs.append(n)
                lit = slot(n)
                groups.append([(slot(x), lit.elem) for x in n.elems])
            elif isinstance(n, Index):
                exprs.append(n)
                t = fresh()
                groups.append([(slot(n.target), TArray(t)), (slot(n), t)])
                groups.append([(slot(n.index), INT)])
            elif isinstance(n, Call):
                exprs.append(n)
                # whatever is called must be a function of this arity, otherwise
                # a concrete annotation on the callee would reject the call statically
                shape_of_call = TFunction(tuple(fresh() for _ in n.args), fresh())
                groups.append([(slot(n.callee), shape_of_call)])
                for target in sorted(callees.get(n.nid, ()), key=_target_key):
                    sig = slots[target]
                    if isinstance(sig, TFunction) and len(sig.params) == len(n.args):
                        # one group per argument and one for the result, so a bad
                        # argument does not cut the result loose from the signature
                        groups.extend([(slot(a), p)] for a, p in zip(n.args, sig.params))
                        groups.append([(slot(n), sig.ret)])

    solver = solve([g for g in groups if g])
    table = TypeTable()
    for b in res.bindings:
        table.given[b] = res.declared[b]
        table.inferred[b] = solver.resolve(slots[b])
    for b, d in res.defs.items():
        table.given[ReturnOf(b)] = d.ret
        table.inferred[ReturnOf(b)] = solver.resolve(ret_slot[b])
    for e in exprs:
        table.given[e.nid] = given_of_expr(e, res)
        table.inferred[e.nid] = solver.resolve(slot(e))
    return table


def given_of_expr(e, res: Resolved) -> Type:
    if isinstance(e, IntLit):
        return INT
    if isinstance(e, BoolLit):
        return BOOL
    if isinstance(e, ArrayLit):
        return TArray(UNKNOWN)
    if isinstance(e, Var):
        return res.declared[res.refs[e.nid]]
    return UNKNOWN


def _target_key(b: BindingId):
    return (b.span.line if b.span else 0, b.span.column if b.span else 0, b.kind, b.name)

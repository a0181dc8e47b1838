"""Tree-walking interpreter for cast-elaborated programs.

Casts follow guarded semantics: a cast to an array or function type wraps
the value in a proxy, and every later access or call through the proxy is
checked against the type the cast promised. Every executed check is tallied
in a :class:`CastReport`.
"""
from __future__ import annotations

import sys
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from ..resolve import EXTERN, BindingId
from ..syntax import (
    Add, ArrayLit, Assign, BoolLit, Call, Cast, Def, ExprStmt, If, Index,
    IndexAssign, IntLit, Return, Span, Var,
)
from ..types import BOOL, INT, UNKNOWN, TArray, TFunction, TUnknown, Type
from .builtins import BUILTINS, ExternFault
from .elaborate import INJECTION, PROJECTION, CastProgram, CastSite, direction
from .values import (
    ArrayV, ClosureV, ExternV, ProxyArrayV, ProxyFunV, is_array, is_function,
    plain, rtype, tag, unwrap,
)

DEFAULT_BUDGET = 10 ** 7
INT_MIN, INT_MAX = -(2 ** 63), 2 ** 63 - 1
EVENT_KINDS = ("projection", "injection", "proxy_read", "proxy_write", "proxy_call")

VALUE, CAST_FAILURE, RUNTIME_ERROR, BUDGET_EXHAUSTED = (
    "value", "cast-failure", "runtime-error", "budget-exhausted")


@dataclass(frozen=True)
class Outcome:
    kind: str
    value: object = None       # plain() form of the final value
    span: Optional[Span] = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.kind == VALUE

    def key(self):
        """What two runs must share to count as behaving the same."""
        if self.kind == VALUE:
            return (VALUE, _freeze(self.value))
        if self.kind == BUDGET_EXHAUSTED:
            return (BUDGET_EXHAUSTED,)
        return (self.kind, self.span)

    def __str__(self) -> str:
        if self.kind == VALUE:
            return f"value {_show_plain(self.value)}"
        where = f" at {self.span}" if self.span else ""
        return f"{self.kind}{where}: {self.message}" if self.message else f"{self.kind}{where}"

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == VALUE:
            out["value"] = _jsonable(self.value)
        if self.span is not None:
            out["span"] = self.span.to_json()
        if self.message:
            out["message"] = self.message
        return out


def _freeze(v):
    return tuple(_freeze(x) for x in v) if isinstance(v, list) else v


def _jsonable(v):
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, tuple):
        return f"<{v[0]} {v[1]}>"
    return v


def _show_plain(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(map(_show_plain, v)) + "]"
    if isinstance(v, tuple):
        return f"<{v[0]} {v[1]}>"
    return str(v)


@dataclass
class CastReport:
    static_sites: list[CastSite]
    dynamic: dict[str, int] = field(default_factory=lambda: dict.fromkeys(EVENT_KINDS, 0))
    failures: list[dict] = field(default_factory=list)
    outcome: Optional[Outcome] = None

    @property
    def total(self) -> int:
        return sum(self.dynamic.values())

    @property
    def proxy(self) -> int:
        return self.dynamic["proxy_read"] + self.dynamic["proxy_write"] + self.dynamic["proxy_call"]

    def to_json(self) -> dict:
        return {
            "static_sites": [s.to_json() for s in self.static_sites],
            "dynamic": {"total": self.total, **self.dynamic},
            "outcome": self.outcome.to_json() if self.outcome else None,
            "failures": self.failures,
        }


class _CastFailure(Exception):
    def __init__(self, site: Span, expected: Type, actual: str):
        self.site, self.expected, self.actual = site, expected, actual
        super().__init__(f"expected {expected}, got {actual}")


class _RuntimeFault(Exception):
    def __init__(self, span, message):
        self.span = span
        super().__init__(message)


class _OutOfBudget(Exception):
    pass


class _Frame:
    __slots__ = ("owner", "vals", "parent")

    def __init__(self, owner, parent):
        self.owner = owner
        self.vals = {}
        self.parent = parent


_NORET = object()
_MISSING = object()


class Interpreter:
    def __init__(self, cp: CastProgram, step_budget: int = DEFAULT_BUDGET, call_log=None):
        self.cp = cp
        self.res = cp.resolved
        self.budget = step_budget
        self.steps = 0
        self.events = Counter()
        self.call_log = call_log
        self.dynamic = cp.dynamic_calls
        self.span = None  # span of the extern call in progress
        self.externs = {}
        for name, t in cp.program.prelude.items():
            b = BindingId(EXTERN, name, None)
            impl = BUILTINS.get(name)
            if isinstance(t, TFunction):
                arity = len(t.params)
            else:
                arity = impl.arity if impl else 0
                t = TFunction((UNKNOWN,) * arity, UNKNOWN)
            self.externs[name] = ExternV(name, b, t, arity, impl)

    # -- driver --------------------------------------------------------------

    def run(self) -> tuple[Outcome, CastReport]:
        report = CastReport(list(self.cp.static_sites))
        try:
            final = None
            top = _Frame(None, None)
            for s in self.cp.program.stmts:
                if isinstance(s, ExprStmt):
                    final = self.eval(s.expr, top)
                else:
                    self.exec(s, top)
            outcome = Outcome(VALUE, plain(final))
        except _CastFailure as e:
            report.failures.append({"span": e.site.to_json(), "expected": str(e.expected),
                                    "actual": e.actual})
            outcome = Outcome(CAST_FAILURE, span=e.site, message=str(e))
        except _RuntimeFault as e:
            outcome = Outcome(RUNTIME_ERROR, span=e.span, message=str(e))
        except _OutOfBudget:
            outcome = Outcome(BUDGET_EXHAUSTED, message=f"step budget {self.budget} exhausted")
        except RecursionError:
            outcome = Outcome(RUNTIME_ERROR, message="recursion too deep")
        for k in EVENT_KINDS:
            report.dynamic[k] = self.events[k]
        report.outcome = outcome
        return outcome, report

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise _OutOfBudget()

    # -- casts ---------------------------------------------------------------

    def coerce(self, v, t: Type, site: Span):
        if isinstance(t, TUnknown):
            return v
        if t == INT:
            if type(v) is not int:
                raise _CastFailure(site, t, tag(v))
            return v
        if t == BOOL:
            if type(v) is not bool:
                raise _CastFailure(site, t, tag(v))
            return v
        if isinstance(t, TArray):
            if not is_array(v):
                raise _CastFailure(site, t, tag(v))
            return v if rtype(v) == t else ProxyArrayV(v, t.elem, site)
        if isinstance(t, TFunction):
            if not is_function(v):
                raise _CastFailure(site, t, tag(v))
            rt = rtype(v)
            if len(rt.params) != len(t.params):
                raise _CastFailure(site, t, f"Function of arity {len(rt.params)}")
            return v if rt == t else ProxyFunV(v, rt, t, site)
        raise TypeError(f"cannot cast to {t}")

    # -- arrays --------------------------------------------------------------

    def length(self, a) -> int:
        a = unwrap(a)
        if not isinstance(a, ArrayV):
            raise ExternFault(f"expected an array, got {tag(a)}")
        return len(a.cells)

    def read(self, a, i, span=None):
        layers = []
        while isinstance(a, ProxyArrayV):
            layers.append(a)
            a = a.inner
        if not isinstance(a, ArrayV):
            raise _RuntimeFault(span or self.span, f"cannot index a value of kind {tag(a)}")
        if type(i) is not int:
            raise _RuntimeFault(span or self.span, f"array index must be an Int, got {tag(i)}")
        if not 0 <= i < len(a.cells):
            raise _RuntimeFault(span or self.span, f"index {i} out of bounds for length {len(a.cells)}")
        v = a.cells[i]
        for p in reversed(layers):
            self.events["proxy_read"] += 1
            v = self.coerce(v, p.elem, p.site)
        return v

    def write(self, a, i, v, span):
        while isinstance(a, ProxyArrayV):
            self.events["proxy_write"] += 1
            v = self.coerce(v, a.elem, a.site)
            a = a.inner
        if not isinstance(a, ArrayV):
            raise _RuntimeFault(span, f"cannot index a value of kind {tag(a)}")
        if type(i) is not int:
            raise _RuntimeFault(span, f"array index must be an Int, got {tag(i)}")
        if not 0 <= i < len(a.cells):
            raise _RuntimeFault(span, f"index {i} out of bounds for length {len(a.cells)}")
        a.cells[i] = v

    # -- calls ---------------------------------------------------------------

    def apply(self, f, args: list, span: Span):
        while isinstance(f, ProxyFunV):
            src, tgt = f.source, f.target
            if len(args) != len(tgt.params):
                raise _RuntimeFault(span, f"function expects {len(tgt.params)} argument(s)")
            for k, (sp, tp) in enumerate(zip(src.params, tgt.params)):
                if sp != tp:
                    self.events["proxy_call"] += 1
                    args[k] = self.coerce(args[k], sp, f.site)
            if src.ret != tgt.ret:
                result = self.apply(f.inner, args, span)
                self.events["proxy_call"] += 1
                return self.coerce(result, tgt.ret, f.site)
            f = f.inner
        if isinstance(f, ClosureV):
            d = f.defn
            if len(args) != len(d.params):
                raise _RuntimeFault(span, f"{d.name} expects {len(d.params)} argument(s), got {len(args)}")
            frame = _Frame(d.nid, f.frame)
            for pb, a in zip(self.res.params[d.nid], args):
                frame.vals[pb] = a
            out = self.exec_block(d.body, frame)
            return None if out is _NORET else out
        if isinstance(f, ExternV):
            return self.call_extern(f, args, span)
        raise _RuntimeFault(span, f"cannot call a value of kind {tag(f)}")

    def apply_dynamic(self, f, args: list, span: Span):
        """Call through an untyped callee: arguments are checked against the
        callee's own parameter types on entry and the result leaves as ``*``."""
        if not is_function(f):
            raise _RuntimeFault(span, f"cannot call a value of kind {tag(f)}")
        ft = rtype(f)
        if len(ft.params) != len(args):
            raise _RuntimeFault(span, f"function expects {len(ft.params)} argument(s), got {len(args)}")
        for k, pt in enumerate(ft.params):
            if not isinstance(pt, TUnknown):
                self.events[PROJECTION] += 1
                args[k] = self.coerce(args[k], pt, span)
        out = self.apply(f, args, span)
        if not isinstance(ft.ret, TUnknown):
            self.events[INJECTION] += 1
        return out

    def call_extern(self, f: ExternV, args, span):
        if f.impl is None:
            raise _RuntimeFault(span, f"extern {f.name} has no implementation")
        if len(args) != f.impl.arity:
            raise _RuntimeFault(span, f"{f.name} expects {f.impl.arity} argument(s), got {len(args)}")
        saved, self.span = self.span, span
        try:
            out = f.impl.impl(self, *args)
        except ExternFault as e:
            raise _RuntimeFault(span, f"{f.name}: {e}") from None
        finally:
            self.span = saved
        if type(out) is int and not INT_MIN <= out <= INT_MAX:
            raise _RuntimeFault(span, "integer overflow")
        if not _conforms(out, f.type.ret):
            raise _RuntimeFault(span, f"{f.name} returned {tag(out)}, declared {f.type.ret}")
        return out

    # -- statements ----------------------------------------------------------

    def exec_block(self, stmts, frame):
        for s in stmts:
            out = self.exec(s, frame)
            if out is not _NORET:
                return out
        return _NORET

    def exec(self, s, frame):
        self.tick()
        if isinstance(s, ExprStmt):
            self.eval(s.expr, frame)
        elif isinstance(s, Assign):
            frame.vals[self.res.assign_binding[s.nid]] = self.eval(s.value, frame)
        elif isinstance(s, Return):
            return self.eval(s.expr, frame)
        elif isinstance(s, IndexAssign):
            a = self.eval(s.target, frame)
            i = self.eval(s.index, frame)
            v = self.eval(s.value, frame)
            self.write(a, i, v, s.span)
        elif isinstance(s, Def):
            b = self.res.def_binding[s.nid]
            frame.vals[b] = ClosureV(s, frame, b, self.res.declared[b])
        else:
            raise TypeError(f"unexpected statement {s!r}")
        return _NORET

    # -- expressions ---------------------------------------------------------

    def lookup(self, e: Var, frame):
        b = self.res.refs[e.nid]
        if b.kind == EXTERN:
            return self.externs[b.name]
        f = frame
        while f is not None and f.owner != b.scope:
            f = f.parent
        v = _MISSING if f is None else f.vals.get(b, _MISSING)
        if v is _MISSING:
            raise _RuntimeFault(e.span, f"{e.name} is not bound yet")
        return v

    def eval(self, e, frame):
        self.tick()
        if isinstance(e, Var):
            return self.lookup(e, frame)
        if isinstance(e, IntLit) or isinstance(e, BoolLit):
            return e.value
        if isinstance(e, Cast):
            v = self.eval(e.expr, frame)
            kind = direction(e.source, e.target)
            self.events[INJECTION if kind == INJECTION else PROJECTION] += 1
            return self.coerce(v, e.target, e.span)
        if isinstance(e, Call):
            f = self.eval(e.callee, frame)
            args = [self.eval(a, frame) for a in e.args]
            if self.call_log is not None:
                target = unwrap(f)
                if isinstance(target, (ClosureV, ExternV)):
                    self.call_log.setdefault(e.nid, set()).add(target.binding)
            if e.nid in self.dynamic:
                return self.apply_dynamic(f, args, e.span)
            return self.apply(f, args, e.span)
        if isinstance(e, Add):
            a = self.eval(e.lhs, frame)
            b = self.eval(e.rhs, frame)
            if type(a) is not int or type(b) is not int:
                raise _RuntimeFault(e.span, f"cannot add {tag(a)} and {tag(b)}")
            out = a + b
            if not INT_MIN <= out <= INT_MAX:
                raise _RuntimeFault(e.span, "integer overflow")
            return out
        if isinstance(e, If):
            c = self.eval(e.cond, frame)
            if type(c) is not bool:
                raise _RuntimeFault(e.cond.span, f"condition must be a Bool, got {tag(c)}")
            return self.eval(e.then if c else e.orelse, frame)
        if isinstance(e, Index):
            a = self.eval(e.target, frame)
            i = self.eval(e.index, frame)
            return self.read(a, i, e.span)
        if isinstance(e, ArrayLit):
            return ArrayV([self.eval(x, frame) for x in e.elems])
        raise TypeError(f"unexpected expression {e!r}")


def _conforms(v, t: Type) -> bool:
    if isinstance(t, TUnknown):
        return True
    if t == INT:
        return type(v) is int
    if t == BOOL:
        return type(v) is bool
    if isinstance(t, TArray):
        return is_array(v)
    if isinstance(t, TFunction):
        return is_function(v)
    return False


_STACK_BYTES = 2 * 1024 * 1024 * 1024 - 4096
_RECURSION_LIMIT = 1_000_000
_lock = threading.Lock()
_active = [0, 0]  # running evaluations, recursion limit to restore when none remain


def _with_deep_stack(fn):
    """Run ``fn`` on a thread with a large stack so deep SimpliPy recursion fits.

    The interpreter-wide recursion limit is raised while any evaluation runs
    and put back afterwards.
    """
    box = {}

    def target():
        try:
            box["out"] = fn()
        except BaseException as e:  # re-raised on the caller's thread
            box["err"] = e

    with _lock:
        if _active[0] == 0:
            _active[1] = sys.getrecursionlimit()
            sys.setrecursionlimit(max(_active[1], _RECURSION_LIMIT))
        _active[0] += 1
        old = threading.stack_size(_STACK_BYTES)
        try:
            t = threading.Thread(target=target, name="typepycker-eval")
            t.start()
        finally:
            threading.stack_size(old)
    try:
        t.join()
    finally:
        with _lock:
            _active[0] -= 1
            if _active[0] == 0:
                sys.setrecursionlimit(_active[1])
    if "err" in box:
        raise box["err"]
    return box["out"]


def evaluate(cp: CastProgram, step_budget: int = DEFAULT_BUDGET,
             call_log: Optional[dict] = None) -> tuple[Outcome, CastReport]:
    """Run a cast-elaborated program; ``call_log`` (if given) collects call nid -> callee bindings."""
    interp = Interpreter(cp, step_budget, call_log)
    return _with_deep_stack(interp.run)

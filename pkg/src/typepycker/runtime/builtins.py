"""Host implementations of extern functions.

An extern declared in a program's prelude is bound to the implementation of
the same name here; a declared extern with no implementation is a runtime
error when called. Implementations receive the interpreter (for checked
array access) and the call's span.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .values import ArrayV


class ExternFault(Exception):
    """Raised by an implementation for bad arguments; becomes a runtime error."""


def _int(v, what="argument"):
    if type(v) is not int:
        raise ExternFault(f"{what} must be an Int")
    return v


def _items(rt, a) -> list:
    return [rt.read(a, i) for i in range(rt.length(a))]


def _succ(rt, n):
    return _int(n) + 1


def _pred(rt, n):
    return _int(n) - 1


def _sub(rt, a, b):
    return _int(a) - _int(b)


def _half(rt, n):
    return _int(n) // 2


def _lt(rt, a, b):
    return _int(a) < _int(b)


def _le(rt, a, b):
    return _int(a) <= _int(b)


def _eq(rt, a, b):
    if type(a) is not type(b) or type(a) not in (int, bool):
        raise ExternFault("eq compares two Ints or two Bools")
    return a == b


def _not(rt, b):
    if type(b) is not bool:
        raise ExternFault("argument must be a Bool")
    return not b


def _len(rt, a):
    return rt.length(a)


def _slice(rt, a, lo, hi):
    lo, hi = _int(lo), _int(hi)
    n = rt.length(a)
    lo, hi = max(0, min(lo, n)), max(0, min(hi, n))
    return ArrayV([rt.read(a, i) for i in range(lo, hi)])


def _concat(rt, a, b):
    return ArrayV(_items(rt, a) + _items(rt, b))


def _push(rt, a, v):
    return ArrayV(_items(rt, a) + [v])


def _scramble(rt, n):
    # small deterministic pseudo-random map onto 0..100
    return (_int(n) * 7919 + 13) % 101


@dataclass(frozen=True)
class Builtin:
    arity: int
    impl: Callable


BUILTINS: dict[str, Builtin] = {
    "succ": Builtin(1, _succ),
    "pred": Builtin(1, _pred),
    "sub": Builtin(2, _sub),
    "half": Builtin(1, _half),
    "lt": Builtin(2, _lt),
    "le": Builtin(2, _le),
    "eq": Builtin(2, _eq),
    "not": Builtin(1, _not),
    "len": Builtin(1, _len),
    "slice": Builtin(3, _slice),
    "concat": Builtin(2, _concat),
    "push": Builtin(2, _push),
    "scramble": Builtin(1, _scramble),
}

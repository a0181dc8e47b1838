"""Runtime values.

Ints and bools are plain Python ``int``/``bool`` (test bools with
``type(v) is bool`` since ``bool`` subclasses ``int``). A function that falls
off the end of its body returns ``None``.
"""
from __future__ import annotations

from ..types import UNKNOWN, TArray, TFunction, Type


class ArrayV:
    __slots__ = ("cells",)

    def __init__(self, cells):
        self.cells = list(cells)

    def __repr__(self):
        return f"ArrayV({self.cells!r})"


class ClosureV:
    __slots__ = ("defn", "frame", "binding", "type")

    def __init__(self, defn, frame, binding, type_: TFunction):
        self.defn = defn
        self.frame = frame
        self.binding = binding
        self.type = type_

    def __repr__(self):
        return f"<function {self.defn.name}>"


class ExternV:
    __slots__ = ("name", "binding", "type", "arity", "impl")

    def __init__(self, name, binding, type_: TFunction, arity, impl):
        self.name = name
        self.binding = binding
        self.type = type_
        self.arity = arity
        self.impl = impl

    def __repr__(self):
        return f"<extern {self.name}>"


class ProxyArrayV:
    """Array seen at element type ``elem``; each access through it is checked."""

    __slots__ = ("inner", "elem", "site")

    def __init__(self, inner, elem: Type, site):
        self.inner = inner
        self.elem = elem
        self.site = site


class ProxyFunV:
    """Function of type ``source`` used at type ``target``."""

    __slots__ = ("inner", "source", "target", "site")

    def __init__(self, inner, source: TFunction, target: TFunction, site):
        self.inner = inner
        self.source = source
        self.target = target
        self.site = site


def is_array(v) -> bool:
    return isinstance(v, (ArrayV, ProxyArrayV))


def is_function(v) -> bool:
    return isinstance(v, (ClosureV, ExternV, ProxyFunV))


def tag(v) -> str:
    if type(v) is bool:
        return "Bool"
    if type(v) is int:
        return "Int"
    if is_array(v):
        return "Array"
    if is_function(v):
        return "Function"
    if v is None:
        return "None"
    return type(v).__name__


def rtype(v) -> Type:
    """The type a value currently presents; raw arrays present ``Array(*)``."""
    if isinstance(v, ProxyArrayV):
        return TArray(v.elem)
    if isinstance(v, ArrayV):
        return TArray(UNKNOWN)
    if isinstance(v, ProxyFunV):
        return v.target
    if isinstance(v, (ClosureV, ExternV)):
        return v.type
    return UNKNOWN


def unwrap(v):
    while isinstance(v, (ProxyArrayV, ProxyFunV)):
        v = v.inner
    return v


def plain(v):
    """Proxy-free Python rendering of a value, for comparing outcomes."""
    v = unwrap(v)
    if isinstance(v, ArrayV):
        return [plain(c) for c in v.cells]
    if isinstance(v, ClosureV):
        return ("function", v.defn.name)
    if isinstance(v, ExternV):
        return ("extern", v.name)
    return v


def show(v) -> str:
    p = plain(v)
    if p is None:
        return "None"
    if isinstance(p, bool):
        return "true" if p else "false"
    if isinstance(p, tuple):
        return f"<{p[0]} {p[1]}>"
    if isinstance(p, list):
        return "[" + ", ".join(show(x) if not isinstance(x, bool) else ("true" if x else "false")
                               for x in p) + "]"
    return str(p)

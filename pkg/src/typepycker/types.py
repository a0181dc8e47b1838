"""Gradual types: ``*``, ``Bool``, ``Int``, ``Array(T)`` and ``Function([T, ...], T)``."""
from __future__ import annotations

from dataclasses import dataclass


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TUnknown(Type):
    def __str__(self) -> str:
        return "*"


@dataclass(frozen=True)
class TBool(Type):
    def __str__(self) -> str:
        return "Bool"


@dataclass(frozen=True)
class TInt(Type):
    def __str__(self) -> str:
        return "Int"


@dataclass(frozen=True)
class TArray(Type):
    elem: Type

    def __str__(self) -> str:
        return f"Array({self.elem})"


@dataclass(frozen=True)
class TFunction(Type):
    params: tuple[Type, ...]
    ret: Type

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    def __str__(self) -> str:
        return f"Function([{', '.join(map(str, self.params))}], {self.ret})"


UNKNOWN = TUnknown()
BOOL = TBool()
INT = TInt()


def contains_unknown(t: Type) -> bool:
    if isinstance(t, TUnknown):
        return True
    if isinstance(t, TArray):
        return contains_unknown(t.elem)
    if isinstance(t, TFunction):
        return any(map(contains_unknown, t.params)) or contains_unknown(t.ret)
    return False


def consistent(a: Type, b: Type) -> bool:
    """Gradual consistency: ``*`` is consistent with everything, constructors componentwise."""
    if isinstance(a, TUnknown) or isinstance(b, TUnknown):
        return True
    if isinstance(a, TArray) and isinstance(b, TArray):
        return consistent(a.elem, b.elem)
    if isinstance(a, TFunction) and isinstance(b, TFunction):
        return (
            len(a.params) == len(b.params)
            and all(consistent(x, y) for x, y in zip(a.params, b.params))
            and consistent(a.ret, b.ret)
        )
    return a == b


def is_subtype(a: Type, b: Type) -> bool:
    """Static dispatch subtyping: everything is below ``*``; arrays are invariant;
    functions are contravariant in parameters and covariant in the result."""
    if isinstance(b, TUnknown) or a == b:
        return True
    if isinstance(a, TFunction) and isinstance(b, TFunction):
        return (
            len(a.params) == len(b.params)
            and all(is_subtype(y, x) for x, y in zip(a.params, b.params))
            and is_subtype(a.ret, b.ret)
        )
    return False


def join(a: Type, b: Type) -> Type:
    return a if a == b else UNKNOWN


def more_precise(a: Type, b: Type) -> bool:
    """True when ``a`` is obtained from ``b`` by replacing zero or more ``*`` positions."""
    if isinstance(b, TUnknown):
        return True
    if isinstance(a, TArray) and isinstance(b, TArray):
        return more_precise(a.elem, b.elem)
    if isinstance(a, TFunction) and isinstance(b, TFunction):
        return (
            len(a.params) == len(b.params)
            and all(more_precise(x, y) for x, y in zip(a.params, b.params))
            and more_precise(a.ret, b.ret)
        )
    return a == b

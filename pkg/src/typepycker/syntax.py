"""Abstract syntax of SimpliPy.

Nodes are frozen dataclasses. Every node carries a :class:`Span` and a
process-unique ``nid`` that later phases use as a key in side tables
(static types, inferred types, graph vertices). Neither takes part in
equality, so two programs compare equal when their structure and
annotations agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields, replace
from typing import Iterator, Union

from .types import Type

_ids = itertools.count()


def fresh_id() -> int:
    return next(_ids)


@dataclass(frozen=True, order=True)
class Span:
    file: str = "<input>"
    line: int = 1
    column: int = 1
    length: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def to_json(self) -> dict:
        return {"file": self.file, "line": self.line, "column": self.column, "length": self.length}


NO_SPAN = Span("<generated>", 1, 1, 0)


@dataclass(frozen=True, kw_only=True)
class Node:
    span: Span = field(default=NO_SPAN, compare=False, repr=False)
    nid: int = field(default_factory=fresh_id, compare=False, repr=False)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Add(Node):
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Call(Node):
    callee: "Expr"
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class If(Node):
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


@dataclass(frozen=True)
class ArrayLit(Node):
    elems: tuple["Expr", ...]


@dataclass(frozen=True)
class Index(Node):
    target: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Cast(Node):
    """Explicit runtime cast ``{target <= source} expr``; produced by elaboration only."""

    expr: "Expr"
    source: Type
    target: Type


Expr = Union[IntLit, BoolLit, Var, Add, Call, If, ArrayLit, Index, Cast]


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class Param(Node):
    name: str
    annot: Type


@dataclass(frozen=True)
class ExprStmt(Node):
    expr: Expr


@dataclass(frozen=True)
class Return(Node):
    expr: Expr


@dataclass(frozen=True)
class Def(Node):
    name: str
    params: tuple[Param, ...]
    ret: Type
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class Assign(Node):
    name: str
    annot: Type
    value: Expr


@dataclass(frozen=True)
class IndexAssign(Node):
    target: Expr
    index: Expr
    value: Expr


Stmt = Union[ExprStmt, Return, Def, Assign, IndexAssign]


@dataclass
class Program:
    stmts: tuple
    prelude: dict = field(default_factory=dict)
    prelude_spans: dict = field(default_factory=dict, compare=False, repr=False)


# -- traversal ---------------------------------------------------------------

def children(node: Node) -> Iterator[Node]:
    for f in fields(node):
        if f.name in ("span", "nid"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, tuple):
            for item in value:
                if isinstance(item, Node):
                    yield item


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal of ``node`` and everything below it."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def walk_program(p: Program) -> Iterator[Node]:
    for s in p.stmts:
        yield from walk(s)


def rebuild(node: Node, fn) -> Node:
    """Bottom-up rewrite: children are rebuilt first, then ``fn`` sees the new node.

    ``fn`` returns a replacement or None to keep the node. Unchanged subtrees
    keep their identity, so side tables keyed by ``nid`` stay valid.
    """
    changes = {}
    for f in fields(node):
        if f.name in ("span", "nid"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            new = rebuild(value, fn)
            if new is not value:
                changes[f.name] = new
        elif isinstance(value, tuple) and any(isinstance(v, Node) for v in value):
            new_items = tuple(rebuild(v, fn) if isinstance(v, Node) else v for v in value)
            if any(a is not b for a, b in zip(new_items, value)):
                changes[f.name] = new_items
    if changes:
        node = replace(node, **changes)
    out = fn(node)
    return node if out is None else out


def rebuild_program(p: Program, fn) -> Program:
    return Program(tuple(rebuild(s, fn) for s in p.stmts), dict(p.prelude), dict(p.prelude_spans))


def clone(node: Node) -> Node:
    """Deep copy with fresh node ids (spans are kept)."""
    def fresh(n):
        return replace(n, nid=fresh_id())
    return rebuild(node, fresh)

"""Tokenizer and recursive-descent parser for the Python-styled SimpliPy surface syntax.

Statements end at a newline (or ``;``); ``def`` bodies are indentation
blocks; newlines inside brackets are ignored. An omitted annotation is the
same as writing ``: *``. ``extern name: T`` lines declare library functions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DuplicateDef, ParseError
from .syntax import (
    Add, ArrayLit, Assign, BoolLit, Call, Def, ExprStmt, If, Index, IndexAssign,
    IntLit, Param, Program, Return, Span, Var,
)
from .types import BOOL, INT, UNKNOWN, TArray, TFunction, Type

KEYWORDS = {"def", "return", "if", "then", "else", "true", "false", "extern"}

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t]+)|(?P<comment>\#[^\n]*)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>->|[()\[\],:=+;*])|(?P<nl>\n)|(?P<bad>.)"
)


@dataclass
class Token:
    kind: str  # name, kw, int, op, newline, indent, dedent, eof
    value: str
    line: int
    col: int
    start: int
    end: int


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    indents = [0]
    depth = 0
    line, line_start = 1, 0
    at_line_start = True
    pos = 0
    n = len(source)

    def err(msg, ln, col):
        raise ParseError(msg, Span(file, ln, col, 1))

    while pos < n:
        if at_line_start and depth == 0:
            # measure indentation of a logical line; skip blank and comment-only lines
            m = re.compile(r"[ \t]*").match(source, pos)
            ws = m.group(0)
            rest = pos + len(ws)
            if rest >= n or source[rest] in "\n#":
                nl = source.find("\n", rest)
                if nl < 0:
                    pos = n
                    break
                pos = nl + 1
                line += 1
                line_start = pos
                continue
            if "\t" in ws:
                err("tabs are not allowed in indentation", line, 1)
            width = len(ws)
            if width > indents[-1]:
                if width != indents[-1] + 4:
                    err("a block is indented by exactly 4 spaces", line, width + 1)
                indents.append(width)
                tokens.append(Token("indent", "", line, 1, pos, rest))
            else:
                while width < indents[-1]:
                    indents.pop()
                    tokens.append(Token("dedent", "", line, 1, pos, rest))
                if width != indents[-1]:
                    err("inconsistent dedent", line, width + 1)
            pos = rest
            at_line_start = False
            continue
        m = _TOKEN_RE.match(source, pos)
        kind = m.lastgroup
        text = m.group(0)
        col = pos - line_start + 1
        if kind == "nl":
            if depth == 0:
                tokens.append(Token("newline", "\n", line, col, pos, pos + 1))
                at_line_start = True
            line += 1
            line_start = pos + 1
        elif kind == "bad":
            err(f"unexpected character {text!r}", line, col)
        elif kind in ("ws", "comment"):
            pass
        elif kind == "name":
            tokens.append(Token("kw" if text in KEYWORDS else "name", text, line, col, pos, pos + len(text)))
        elif kind == "int":
            tokens.append(Token("int", text, line, col, pos, pos + len(text)))
        else:
            if text in "([":
                depth += 1
            elif text in ")]":
                depth = max(0, depth - 1)
            tokens.append(Token("op", text, line, col, pos, pos + len(text)))
        pos += len(text)
    if depth:
        err("unclosed bracket at end of input", line, pos - line_start + 1)
    if tokens and tokens[-1].kind not in ("newline", "dedent"):
        tokens.append(Token("newline", "\n", line, pos - line_start + 1, pos, pos))
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token("dedent", "", line, 1, pos, pos))
    tokens.append(Token("eof", "", line, pos - line_start + 1, pos, pos))
    return tokens


class Parser:
    def __init__(self, source: str, file: str = "<input>"):
        self.file = file
        self.toks = tokenize(source, file)
        self.i = 0
        self.prelude: dict[str, Type] = {}
        self.prelude_spans: dict[str, Span] = {}

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, kind, value=None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind, value=None) -> Token:
        if not self.at(kind, value):
            want = value or kind
            got = self.tok.value or self.tok.kind
            raise ParseError(f"expected {want!r}, found {got!r}", self.span_of(self.tok, self.tok))
        return self.advance()

    def span_of(self, first: Token, last: Token) -> Span:
        return Span(self.file, first.line, first.col, max(1, last.end - first.start))

    def span_from(self, first: Token) -> Span:
        return self.span_of(first, self.toks[self.i - 1])

    # -- program
    def parse_program(self) -> list:
        stmts = []
        while not self.at("eof"):
            if self.at("newline"):
                self.advance()
                continue
            if self.at("indent"):
                raise ParseError("unexpected indent", self.span_of(self.tok, self.tok))
            stmts.extend(self.parse_line(top=True))
        check_duplicate_defs(stmts)
        for s in stmts:
            if isinstance(s, Return):
                raise ParseError("'return' outside of a function", s.span)
        return stmts

    def parse_line(self, top: bool) -> list:
        if self.at("kw", "def"):
            return [self.parse_def()]
        stmts = []
        while True:
            s = self.parse_simple(top)
            if s is not None:
                stmts.append(s)
            if self.at("op", ";"):
                self.advance()
                if self.at("newline"):
                    break
                continue
            break
        self.expect("newline")
        return stmts

    def parse_block(self) -> list:
        if not self.at("newline"):
            body = []
            while True:
                s = self.parse_simple(top=False)
                if s is not None:
                    body.append(s)
                if not self.at("op", ";"):
                    break
                self.advance()
                if self.at("newline"):
                    break
            self.expect("newline")
            return body
        self.expect("newline")
        self.expect("indent")
        body = []
        while not self.at("dedent"):
            if self.at("newline"):
                self.advance()
                continue
            body.extend(self.parse_line(top=False))
        self.expect("dedent")
        return body

    def parse_def(self) -> Def:
        first = self.expect("kw", "def")
        name = self.expect("name").value
        self.expect("op", "(")
        params = []
        seen = set()
        while not self.at("op", ")"):
            pt = self.expect("name")
            annot = UNKNOWN
            if self.at("op", ":"):
                self.advance()
                annot = self.parse_type()
            if pt.value in seen:
                raise ParseError(f"duplicate parameter {pt.value!r}", self.span_of(pt, pt))
            seen.add(pt.value)
            params.append(Param(pt.value, annot, span=self.span_from(pt)))
            if not self.at("op", ","):
                break
            self.advance()
        self.expect("op", ")")
        ret = UNKNOWN
        if self.at("op", "->"):
            self.advance()
            ret = self.parse_type()
        self.expect("op", ":")
        header_span = self.span_from(first)
        body = self.parse_block()
        check_duplicate_defs(body)
        return Def(name, tuple(params), ret, tuple(body), span=header_span)

    def parse_simple(self, top: bool):
        first = self.tok
        if self.at("kw", "return"):
            self.advance()
            e = self.parse_expr()
            return Return(e, span=self.span_from(first))
        if self.at("kw", "extern"):
            if not top:
                raise ParseError("'extern' is only allowed at top level", self.span_of(first, first))
            self.advance()
            name = self.expect("name").value
            self.expect("op", ":")
            t = self.parse_type()
            if name in self.prelude and self.prelude[name] != t:
                raise ParseError(f"conflicting extern declarations for {name!r}", self.span_from(first))
            self.prelude[name] = t
            self.prelude_spans[name] = self.span_from(first)
            return None
        target = self.parse_expr()
        if self.at("op", ":"):
            if not isinstance(target, Var):
                raise ParseError("only a variable can carry an annotation", target.span)
            self.advance()
            annot = self.parse_type()
            self.expect("op", "=")
            value = self.parse_expr()
            return Assign(target.name, annot, value, span=self.span_from(first))
        if self.at("op", "="):
            self.advance()
            value = self.parse_expr()
            if isinstance(target, Var):
                return Assign(target.name, UNKNOWN, value, span=self.span_from(first))
            if isinstance(target, Index):
                return IndexAssign(target.target, target.index, value, span=self.span_from(first))
            raise ParseError("cannot assign to this expression", target.span)
        return ExprStmt(target, span=self.span_from(first))

    # -- expressions
    def parse_expr(self):
        first = self.tok
        if self.at("kw", "if"):
            self.advance()
            cond = self.parse_expr()
            self.expect("kw", "then")
            then = self.parse_expr()
            self.expect("kw", "else")
            orelse = self.parse_expr()
            return If(cond, then, orelse, span=self.span_from(first))
        e = self.parse_postfix()
        while self.at("op", "+"):
            self.advance()
            rhs = self.parse_postfix()
            e = Add(e, rhs, span=self.span_from(first))
        return e

    def parse_postfix(self):
        first = self.tok
        e = self.parse_atom()
        while True:
            if self.at("op", "("):
                self.advance()
                args = self.parse_list(")")
                e = Call(e, tuple(args), span=self.span_from(first))
            elif self.at("op", "["):
                self.advance()
                idx = self.parse_expr()
                self.expect("op", "]")
                e = Index(e, idx, span=self.span_from(first))
            else:
                return e

    def parse_list(self, close: str) -> list:
        items = []
        while not self.at("op", close):
            items.append(self.parse_expr())
            if not self.at("op", ","):
                break
            self.advance()
        self.expect("op", close)
        return items

    def parse_atom(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return IntLit(int(t.value), span=self.span_of(t, t))
        if t.kind == "kw" and t.value in ("true", "false"):
            self.advance()
            return BoolLit(t.value == "true", span=self.span_of(t, t))
        if t.kind == "name":
            self.advance()
            return Var(t.value, span=self.span_of(t, t))
        if self.at("op", "["):
            self.advance()
            elems = self.parse_list("]")
            return ArrayLit(tuple(elems), span=self.span_from(t))
        if self.at("op", "("):
            self.advance()
            e = self.parse_expr()
            self.expect("op", ")")
            return e
        raise ParseError(f"unexpected {t.value or t.kind!r}", self.span_of(t, t))

    # -- types
    def parse_type(self) -> Type:
        t = self.tok
        if self.at("op", "*"):
            self.advance()
            return UNKNOWN
        if t.kind == "name":
            if t.value == "Int":
                self.advance()
                return INT
            if t.value == "Bool":
                self.advance()
                return BOOL
            if t.value == "Array":
                self.advance()
                self.expect("op", "(")
                elem = self.parse_type()
                self.expect("op", ")")
                return TArray(elem)
            if t.value == "Function":
                self.advance()
                self.expect("op", "(")
                self.expect("op", "[")
                params = []
                while not self.at("op", "]"):
                    params.append(self.parse_type())
                    if not self.at("op", ","):
                        break
                    self.advance()
                self.expect("op", "]")
                self.expect("op", ",")
                ret = self.parse_type()
                self.expect("op", ")")
                return TFunction(tuple(params), ret)
        raise ParseError(f"expected a type, found {t.value or t.kind!r}", self.span_of(t, t))


def check_duplicate_defs(stmts) -> None:
    seen = {}
    for s in stmts:
        if isinstance(s, Def):
            if s.name in seen:
                raise DuplicateDef(f"function {s.name!r} is already defined at {seen[s.name]}", s.span)
            seen[s.name] = s.span


def parse_type(text: str) -> Type:
    p = Parser(text)
    t = p.parse_type()
    p.expect("newline")
    return t


def parse_prelude(text: str, file: str = "<prelude>") -> dict[str, Type]:
    """Read ``extern name: T`` lines (a prelude file)."""
    p = Parser(text, file)
    stmts = p.parse_program()
    if stmts:
        raise ParseError("a prelude may only contain extern declarations", stmts[0].span)
    return p.prelude


def parse(source: str, prelude: dict[str, Type] | None = None, file: str = "<input>") -> Program:
    p = Parser(source, file)
    stmts = p.parse_program()
    merged = dict(prelude or {})
    for name, t in p.prelude.items():
        if name in merged and merged[name] != t:
            raise ParseError(f"extern {name!r} conflicts with the prelude", p.prelude_spans[name])
        merged[name] = t
    spans = {name: Span("<prelude>", 1, 1, 0) for name in merged}
    spans.update(p.prelude_spans)
    return Program(tuple(stmts), merged, spans)

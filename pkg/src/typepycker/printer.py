"""Pretty-printer emitting SimpliPy source that re-parses to the same AST."""
from __future__ import annotations

from .syntax import (
    Add, ArrayLit, Assign, BoolLit, Call, Cast, Def, ExprStmt, If, Index,
    IndexAssign, IntLit, Program, Return, Var,
)

INDENT = "    "

# precedence levels: if-expression < addition < postfix < atom
_IF, _ADD, _POSTFIX = 0, 1, 2


def print_expr(e, prec: int = _IF) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        text = f"{print_expr(e.lhs, _ADD)} + {print_expr(e.rhs, _POSTFIX)}"
        return f"({text})" if prec > _ADD else text
    if isinstance(e, If):
        text = (f"if {print_expr(e.cond, _ADD)} then {print_expr(e.then, _ADD)} "
                f"else {print_expr(e.orelse, _IF)}")
        return f"({text})" if prec > _IF else text
    if isinstance(e, Call):
        args = ", ".join(print_expr(a) for a in e.args)
        return f"{print_expr(e.callee, _POSTFIX)}({args})"
    if isinstance(e, Index):
        return f"{print_expr(e.target, _POSTFIX)}[{print_expr(e.index)}]"
    if isinstance(e, ArrayLit):
        return "[" + ", ".join(print_expr(x) for x in e.elems) + "]"
    if isinstance(e, Cast):
        # cast programs are display-only; this form does not re-parse
        return f"{{{e.target} <= {e.source}}}{print_expr(e.expr, _POSTFIX)}"
    raise TypeError(f"not an expression: {e!r}")


def print_stmt(s, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, ExprStmt):
        return [pad + print_expr(s.expr)]
    if isinstance(s, Return):
        return [pad + "return " + print_expr(s.expr)]
    if isinstance(s, Assign):
        return [f"{pad}{s.name}: {s.annot} = {print_expr(s.value)}"]
    if isinstance(s, IndexAssign):
        return [f"{pad}{print_expr(s.target, _POSTFIX)}[{print_expr(s.index)}] = {print_expr(s.value)}"]
    if isinstance(s, Def):
        params = ", ".join(f"{p.name}: {p.annot}" for p in s.params)
        lines = [f"{pad}def {s.name}({params}) -> {s.ret}:"]
        if not s.body:
            raise ValueError(f"function {s.name!r} has an empty body")
        for b in s.body:
            lines.extend(print_stmt(b, depth + 1))
        return lines
    raise TypeError(f"not a statement: {s!r}")


def print_program(p: Program) -> str:
    lines = [f"extern {name}: {t}" for name, t in p.prelude.items()]
    if lines and p.stmts:
        lines.append("")
    prev_def = False
    for i, s in enumerate(p.stmts):
        is_def = isinstance(s, Def)
        if i and (is_def or prev_def):
            lines.append("")
        lines.extend(print_stmt(s))
        prev_def = is_def
    return "\n".join(lines) + "\n" if lines else ""

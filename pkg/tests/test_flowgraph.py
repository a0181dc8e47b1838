from hypothesis import given

from strategies import programs
from typepycker.analysis import analyze
from typepycker.flowgraph import EdgeRules, V_EXPR, V_FUNC, V_LIT, V_PARAM, V_RET, V_VAR
from typepycker.parser import parse
from typepycker.resolve import EXTERN, FUNCTION, PARAM, VAR, ReturnOf
from typepycker.syntax import (
    Add, ArrayLit, Assign, Call, Def, If, Index, IndexAssign, Return, Var, children,
)
from typepycker.types import INT, UNKNOWN, TArray


def _edge_names(g):
    return {(g.names[u], g.names[w]) for u, w in g.edges}


def test_listing1_edges(listing1):
    g = analyze(listing1).graph
    names = _edge_names(g)
    for e in [("succ(1)", "x"), ("true", "y"), ("x", "u"), ("y", "z"), ("succ(x)", "if z then succ(x) else succ(u)"),
              ("succ(u)", "if z then succ(x) else succ(u)"), ("if z then succ(x) else succ(u)", "return f")]:
        assert e in names
    for call in ["succ(1)", "succ(x)", "succ(u)"]:
        assert not g.predecessors(g.find(V_EXPR, call))
    # the condition does not flow into the result
    assert ("z", "if z then succ(x) else succ(u)") not in names


def test_empty_program():
    g = analyze(parse("")).graph
    assert g.n == 0 and g.edges == []


def test_single_literal_assignment():
    g = analyze(parse("x: * = 1\n")).graph
    lit, x = g.find(V_LIT, "1"), g.find(V_VAR, "x")
    assert g.edges == [(lit, x)]
    assert g.given[lit] == INT


def test_array_literal_given_ignores_elements():
    g = analyze(parse("a = [1, 2]\nb = []\n")).graph
    assert g.given[g.find(V_EXPR, "[1, 2]")] == TArray(UNKNOWN)
    assert g.given[g.find(V_EXPR, "[]")] == TArray(UNKNOWN)


def test_function_name_as_value_flows():
    g = analyze(parse("def f(a):\n    return a\ne = f\ne(1)\n")).graph
    assert (g.find(V_FUNC, "f"), g.find(V_VAR, "e")) in g.edges


def test_arity_mismatch_is_a_diagnostic():
    g = analyze(parse("def f(a):\n    return a\ne = f\ne(1, 2)\n")).graph
    assert len(g.diagnostics) == 1
    assert (g.find(V_LIT, "1"), g.find(V_PARAM, "a")) in g.edges


def test_edge_rule_toggles(listing1):
    p = parse("x = 1 + 2\ny = if true then 1 else 2\n")
    on = _edge_names(analyze(p, EdgeRules(if_condition=True, operands=False)).graph)
    assert ("true", "if true then 1 else 2") in on
    assert ("1", "1 + 2") not in on


def _origin(res, e):
    return res.refs[e.nid] if isinstance(e, Var) else e.nid


def expected_edges(a):
    """Re-derive data edges from the syntax tree with a recursive visitor."""
    res, cm = a.resolved, a.callees
    out = set()

    def visit(n, fn):
        if isinstance(n, Def):
            fn = res.def_binding[n.nid]
        elif isinstance(n, Assign):
            out.add((_origin(res, n.value), res.assign_binding[n.nid]))
        elif isinstance(n, Return):
            out.add((_origin(res, n.expr), ReturnOf(fn)))
        elif isinstance(n, IndexAssign):
            out.add((_origin(res, n.value), _origin(res, n.target)))
        elif isinstance(n, Add):
            out.update({(_origin(res, n.lhs), n.nid), (_origin(res, n.rhs), n.nid)})
        elif isinstance(n, If):
            out.update({(_origin(res, n.then), n.nid), (_origin(res, n.orelse), n.nid)})
        elif isinstance(n, ArrayLit):
            out.update((_origin(res, x), n.nid) for x in n.elems)
        elif isinstance(n, Index):
            out.add((_origin(res, n.target), n.nid))
        elif isinstance(n, Call):
            for t in cm[n.nid]:
                if t.kind == FUNCTION:
                    out.update((_origin(res, x), pb) for x, pb in zip(n.args, res.params[res.defs[t].nid]))
                    out.add((ReturnOf(t), n.nid))
        for c in children(n):
            visit(c, fn)

    for s in res.program.stmts:
        visit(s, None)
    return {(u, w) for u, w in out if u != w}


@given(programs())
def test_edges_rederived_from_syntax(p):
    a = analyze(p)
    g = a.graph
    assert {(g.origins[u], g.origins[w]) for u, w in g.edges} == expected_edges(a)


@given(programs())
def test_vertex_counts(p):
    a = analyze(p)
    g = a.graph
    res = a.resolved
    var_param = sum(1 for b in res.bindings if b.kind in (VAR, PARAM))
    assert sum(1 for k in g.kinds if k in (V_VAR, V_PARAM)) == var_param
    assert g.kinds.count(V_RET) == len(res.defs)
    assert g.kinds.count(V_FUNC) == sum(1 for b in res.bindings if b.kind in (FUNCTION, EXTERN))
    assert len(set(g.origins)) == g.n


@given(programs())
def test_graph_is_deterministic(p):
    assert analyze(p).graph.to_json() == analyze(p).graph.to_json()

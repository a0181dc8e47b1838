import itertools

from hypothesis import given

from strategies import programs
from typepycker.infer import infer_types
from typepycker.parser import parse
from typepycker.resolve import PARAM, VAR, BindingId, ReturnOf, points_to, resolve_names
from typepycker.syntax import BoolLit, IntLit, walk_program
from typepycker.types import BOOL, INT, UNKNOWN, TArray, TFunction, contains_unknown, more_precise


def _table(p):
    res = resolve_names(p)
    return res, infer_types(res, points_to(res))


def _binding(res, kind, name):
    (b,) = [b for b in res.bindings if b.kind == kind and b.name == name]
    return b


def test_listing1(listing1):
    res, t = _table(listing1)
    assert t.inferred[_binding(res, PARAM, "y")] == BOOL
    assert t.inferred[_binding(res, VAR, "z")] == BOOL
    # succ returns *, so nothing concrete reaches x, u or the result of f
    assert t.inferred[_binding(res, PARAM, "x")] == UNKNOWN
    assert t.inferred[_binding(res, VAR, "u")] == UNKNOWN
    assert t.inferred[ReturnOf(_binding(res, "function", "f"))] == UNKNOWN


def test_conflict_falls_back_to_unknown():
    res, t = _table(parse("x: * = 1\ny: * = x + true\n"))
    assert t.inferred[_binding(res, VAR, "x")] == UNKNOWN


def _all_types(depth):
    if depth == 0:
        return [INT, BOOL]
    inner = _all_types(depth - 1)
    out = list(inner)
    out += [TArray(x) for x in inner]
    out += [TFunction(ps, r) for n in range(2) for ps in itertools.product(inner, repeat=n) for r in inner]
    return list(dict.fromkeys(out))


def test_array_literal_against_enumeration():
    res, t = _table(parse("a: * = [1, 2]\n"))
    # constraints: a ~ Array(e), e ~ Int (first element), e ~ Int (second element)
    solutions = {a for a in _all_types(2) for e in _all_types(1)
                 if a == TArray(e) and e == INT}
    assert solutions == {TArray(INT)}
    assert t.inferred[_binding(res, VAR, "a")] == TArray(INT)


def test_concrete_given_is_kept():
    res, t = _table(parse("def f(n: Int) -> Int:\n    return n + 1\nf(1)\n"))
    fn = _binding(res, "function", "f")
    assert t.inferred[ReturnOf(fn)] == INT
    assert t.inferred[_binding(res, PARAM, "n")] == INT


def test_recursive_function_return():
    src = "def loop(n: Int):\n    return if true then n else loop(n + 1)\nloop(0)\n"
    res, t = _table(parse(src))
    assert t.inferred[ReturnOf(_binding(res, "function", "loop"))] == INT


def test_literal_entries(listing1):
    res, t = _table(listing1)
    for n in walk_program(listing1):
        if isinstance(n, IntLit):
            assert t[n.nid] == (INT, INT)
        elif isinstance(n, BoolLit):
            assert t[n.nid] == (BOOL, BOOL)


def _replace_unknowns(given, inferred):
    """Fill every * of ``given`` from the same position of ``inferred``."""
    if given == UNKNOWN:
        return inferred
    if isinstance(given, TArray):
        return TArray(_replace_unknowns(given.elem, inferred.elem))
    if isinstance(given, TFunction):
        return TFunction(tuple(_replace_unknowns(g, i) for g, i in zip(given.params, inferred.params)),
                         _replace_unknowns(given.ret, inferred.ret))
    return given


@given(programs())
def test_refinement(p):
    _, t = _table(p)
    assert t.given.keys() == t.inferred.keys()
    for k, g in t.given.items():
        i = t.inferred[k]
        assert more_precise(i, g)
        assert _replace_unknowns(g, i) == i
        if not contains_unknown(g):
            assert i == g


@given(programs())
def test_determinism(p):
    _, a = _table(p)
    _, b = _table(p)
    assert a == b


@given(programs())
def test_every_site_has_an_entry(p):
    res, t = _table(p)
    for b in res.bindings:
        if b.kind in (VAR, PARAM):
            assert b in t.inferred
        elif b.kind == "function":
            assert ReturnOf(b) in t.inferred and isinstance(b, BindingId)

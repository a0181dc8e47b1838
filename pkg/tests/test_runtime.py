import pytest
from hypothesis import assume, given

from conftest import CORPUS
from strategies import programs, reparsed
from typepycker.bench import load
from typepycker.errors import StaticTypeError, TypePyckerError
from typepycker.parser import parse
from typepycker.runtime import EVENT_KINDS, elaborate, erase, evaluate
from typepycker.types import BOOL, INT, UNKNOWN


def _sites(cp):
    return [(s.span.line, s.span.column, str(s.target), str(s.source)) for s in cp.static_sites]


def run(src, budget=10**6):
    return evaluate(elaborate(parse(src, file="t.spy")), budget)


def test_listing1_cast_sites(listing1):
    assert sorted(_sites(elaborate(listing1))) == [
        (6, 15, "Bool", "*"), (9, 8, "*", "Int"), (9, 12, "*", "Bool")]


def test_degradation_cast_sites():
    cp = elaborate(load(CORPUS / "degradation.spy"))
    assert sorted(_sites(cp)) == [
        (5, 9, "*", "Int"), (6, 15, "Bool", "*"), (7, 27, "*", "Int"),
        (9, 3, "Int", "*"), (9, 8, "*", "Int"), (9, 12, "*", "Bool")]


def test_listing1_given_run(listing1):
    outcome, report = evaluate(elaborate(listing1))
    assert outcome.ok and outcome.value == 3
    assert report.total == 3
    assert report.dynamic["projection"] == 1 and report.dynamic["injection"] == 2


def test_fully_concrete_program_has_no_casts():
    src = ("extern lt: Function([Int, Int], Bool)\n"
           "def sum(i: Int, acc: Int) -> Int:\n"
           "    return if lt(i, 4) then sum(i + 1, acc + i) else acc\n"
           "total: Int = sum(0, 0)\n"
           "total\n")
    cp = elaborate(parse(src))
    assert cp.static_sites == []
    outcome, report = evaluate(cp)
    assert outcome.value == 6 and report.total == 0


def test_array_literals_are_untyped():
    # a literal's elements are injected into *, so even Array(Int) data costs casts
    cp = elaborate(parse("xs: Array(Int) = [1, 2]\n"))
    assert sorted(str(s.target) for s in cp.static_sites) == ["*", "*", "Array(Int)"]


def test_projection_to_bool_succeeds():
    outcome, report = run("x: * = true\ny: Bool = x\ny\n")
    assert outcome.value is True
    assert report.dynamic["projection"] == 1


def test_projection_to_int_fails_with_blame():
    outcome, report = run("x: * = true\ny: Int = x\ny\n")
    assert outcome.kind == "cast-failure"
    assert (outcome.span.line, outcome.span.column) == (2, 10)
    assert len(report.failures) == 1


def test_static_type_error():
    with pytest.raises(StaticTypeError):
        elaborate(parse("x: Int = true\n"))


def test_array_proxy_checks_each_access():
    src = ("def total(a: Array(Int)):\n"
           "    return a[0] + a[1]\n"
           "xs: * = [1, 2]\n"
           "total(xs)\n")
    outcome, report = run(src)
    assert outcome.value == 3
    assert report.dynamic["proxy_read"] == 2


def test_array_proxy_write_failure():
    src = ("def put(a: Array(Int)):\n"
           "    a[0] = true\n"
           "    return a\n"
           "xs: * = [1, 2]\n"
           "put(xs)\n")
    with pytest.raises(StaticTypeError):
        elaborate(parse(src))
    src = src.replace("a[0] = true", "b: * = true\n    a[0] = b")
    outcome, report = run(src)
    assert outcome.kind == "cast-failure"


def test_function_proxy_checks_calls():
    src = ("def twice(g: Function([Int], Int), n: Int):\n"
           "    return g(g(n))\n"
           "def inc(k):\n"
           "    return k + 1\n"
           "twice(inc, 1)\n")
    outcome, report = run(src)
    assert outcome.value == 3
    assert report.dynamic["proxy_call"] > 0


def test_calling_a_non_function():
    outcome, _ = run("x: * = 1\nx(2)\n")
    assert outcome.kind == "runtime-error"


def test_index_out_of_bounds():
    outcome, _ = run("a = [1]\na[3]\n")
    assert outcome.kind == "runtime-error"


def test_overflow_is_a_runtime_error():
    src = "def grow(n):\n    return grow(n + n)\ngrow(1)\n"
    outcome, _ = run(src)
    assert outcome.kind == "runtime-error"


def test_budget_exhaustion():
    outcome, _ = run("def spin(n):\n    return spin(n)\nspin(0)\n", budget=1000)
    assert outcome.kind == "budget-exhausted"


def test_deep_recursion_fits():
    src = ("extern lt: Function([Int, Int], Bool)\n"
           "def down(n: Int, k: Int) -> Int:\n"
           "    return if lt(k, n) then down(n, k + 1) else k\n"
           "down(30000, 0)\n")
    outcome, _ = run(src)
    assert outcome.value == 30000


def test_report_json_shape(listing1):
    _, report = evaluate(elaborate(listing1))
    doc = report.to_json()
    assert set(doc) == {"static_sites", "dynamic", "outcome", "failures"}
    assert set(doc["dynamic"]) == {"total", *EVENT_KINDS}
    assert doc["dynamic"]["total"] == sum(doc["dynamic"][k] for k in EVENT_KINDS)


def _elaborated(p):
    p = reparsed(p)
    try:
        return elaborate(p)
    except TypePyckerError:
        assume(False)


@given(programs())
def test_erasure_preserves_values(p):
    cp = _elaborated(p)
    outcome, _ = evaluate(cp, 20_000)
    if outcome.ok:
        bare, report = evaluate(erase(cp), 20_000)
        assert bare.key() == outcome.key()
        assert report.total == 0


@given(programs())
def test_reports_are_deterministic(p):
    cp = _elaborated(p)
    a, ra = evaluate(cp, 20_000)
    b, rb = evaluate(cp, 20_000)
    assert a == b and ra.to_json() == rb.to_json()


@given(programs())
def test_event_total_is_sum_of_kinds(p):
    cp = _elaborated(p)
    outcome, report = evaluate(cp, 20_000)
    assert report.total == sum(report.dynamic.values())
    assert bool(report.failures) == (outcome.kind == "cast-failure")


@given(programs())
def test_no_identity_casts(p):
    cp = _elaborated(p)
    for s in cp.static_sites:
        assert s.source != s.target


def test_type_constants_are_distinct():
    assert len({INT, BOOL, UNKNOWN}) == 3

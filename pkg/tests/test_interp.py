"""Reference interpreter: outcomes, dispatch, exceptions, fuel, stubs.

Everything here runs through enumerate_traces so fuel accounting and cycle
detection see the same code paths the analyses rely on.
"""

import pytest

from guidecheck.fjparser import parse_program
from guidecheck.interp import (
    CastStuck,
    Obj,
    OutOfFuel,
    Terminated,
    Thrown,
    enumerate_traces,
    eval_expr,
    first_heap_violation,
    heap_satisfies,
    replay_entry,
    store_satisfies,
    value_satisfies,
)
from guidecheck.intrinsics import parse_config
from guidecheck.regions import NULL_REGION, UNKNOWN, created_at, region_meta


def single_run(src, entry, fuel=32, intrinsics=None):
    runs = enumerate_traces(parse_program(src), entry, fuel=fuel, intrinsics=intrinsics)
    assert len(runs) == 1, runs
    return runs[0]


def test_alloc_and_field_roundtrip():
    run = single_run(
        """
class Cell { Cell next; Cell go() {
    Cell a = new[one] Cell();
    Cell b = new[two] Cell();
    a.next = b;
    emit wrote;
    return a.next;
} }
""",
        "Cell.go",
    )
    out = run.outcome
    assert isinstance(out, Terminated)
    assert out.trace == ("wrote",)
    assert out.heap[out.value].label == "two"
    # the entry receiver plus the two allocations
    assert sorted(o.label for o in out.heap.values()) == ["$entry", "one", "two"]


def test_dynamic_dispatch_picks_runtime_class():
    run = single_run(
        """
class A { Object cry() { emit base; return null; } }
class B extends A { Object cry() { emit sub; return null; } }
class M { Object go() { A x = new B(); return x.cry(); } }
""",
        "M.go",
    )
    assert run.outcome.trace == ("sub",)


def test_inherited_method_runs_on_subclass_instance():
    run = single_run(
        """
class A { Object cry() { emit base; return null; } }
class B extends A { }
class M { Object go() { B x = new B(); return x.cry(); } }
""",
        "M.go",
    )
    assert run.outcome.trace == ("base",)


def test_upcast_noop_downcast_stuck_nullcast_fine():
    up = single_run(
        "class A { } class B extends A { }"
        "class M { Object go() { B b = new B(); A a = (A) b; return a; } }",
        "M.go",
    )
    assert isinstance(up.outcome, Terminated) and up.outcome.heap[up.outcome.value].cls == "B"

    down = single_run(
        "class A { } class B extends A { }"
        "class M { Object go() { A a = new A(); B b = (B) a; return b; } }",
        "M.go",
    )
    assert isinstance(down.outcome, CastStuck)

    nul = single_run(
        "class A { } class B extends A { }"
        "class M { Object go() { A a = null; B b = (B) a; return b; } }",
        "M.go",
    )
    assert isinstance(nul.outcome, Terminated) and nul.outcome.value is None


def test_throw_and_catch_by_superclass():
    run = single_run(
        """
class E { } class F extends E { }
class M { Object go() {
    try { F f = new[fs] F(); throw f; } catch (E e) { emit caught; }
    return null;
} }
""",
        "M.go",
    )
    assert isinstance(run.outcome, Terminated)
    assert run.outcome.trace == ("caught",)


def test_uncaught_throw_propagates_with_location():
    run = single_run(
        """
class E { } class F extends E { }
class M { Object go() {
    emit before;
    try { E e = new[es] E(); throw e; } catch (F f) { emit nope; }
    return null;
} }
""",
        "M.go",
    )
    out = run.outcome
    assert isinstance(out, Thrown)
    assert out.trace == ("before",)
    assert out.heap[out.location].cls == "E" and out.heap[out.location].label == "es"


def test_catch_can_rethrow_the_bound_exception():
    run = single_run(
        """
class E { }
class M { Object go() {
    try { E e = new[es] E(); throw e; } catch (E f) { emit seen; throw f; }
    return null;
} }
""",
        "M.go",
    )
    assert isinstance(run.outcome, Thrown)
    assert run.outcome.trace == ("seen",)


def test_stuck_configurations_are_reported_not_crashed():
    run = single_run(
        "class M { Object go() { M x = null; return x.go(); } }", "M.go"
    )
    assert run.outcome is None and run.stuck is not None
    assert run.stuck.kind == "call-on-null"

    run2 = single_run(
        "class M { M f; Object go() { M x = null; M y = x.f; return y; } }", "M.go"
    )
    assert run2.stuck.kind == "field-access-on-null"


def test_if_compares_values_not_names():
    run = single_run(
        """
class M { Object go() {
    M a = new[m1] M();
    M b = a;
    if (a == b) { emit same; } else { emit diff; }
    return null;
} }
""",
        "M.go",
    )
    assert run.outcome.trace == ("same",)


DIVERGE = """
class L { Object spin() { emit t; return this.spin(); } }
"""


def test_out_of_fuel_records_cycle_candidates():
    runs = enumerate_traces(parse_program(DIVERGE), "L.spin", fuel=8)
    (run,) = runs
    assert isinstance(run.outcome, OutOfFuel)
    assert run.outcome.trace == ("t",) * 8
    assert run.cycles
    cand = run.cycles[0]
    assert cand.cycle_trace == ("t",)
    assert cand.cycle_script == ()


def test_cycle_candidate_replays_to_a_longer_prefix():
    prog = parse_program(DIVERGE)
    (run,) = enumerate_traces(prog, "L.spin", fuel=6)
    cand = run.cycles[0]
    ev = replay_entry(prog, "L.spin", cand.stem_script + cand.cycle_script * 3, fuel=40)
    want = cand.stem_trace + cand.cycle_trace * 3
    assert tuple(ev.trace[: len(want)]) == want


def test_silent_divergence_has_empty_cycle_trace():
    (run,) = enumerate_traces(
        parse_program("class L { Object spin() { return this.spin(); } }"),
        "L.spin",
        fuel=5,
    )
    assert isinstance(run.outcome, OutOfFuel)
    assert run.outcome.trace == ()
    assert run.cycles and run.cycles[0].cycle_trace == ()


def test_entry_validation():
    prog = parse_program("class M { Object go(M x) { return null; } }")
    with pytest.raises(ValueError, match="entry"):
        enumerate_traces(prog, "Mgo")
    with pytest.raises(ValueError, match="no parameters"):
        enumerate_traces(prog, "M.go")


# -- intrinsic stubs -----------------------------------------------------------

STUB_PROG = """
class R { R tick() { return null; } }
class M { Object go() { R r = new R(); R x = r.tick(); return null; } }
"""


def test_stub_scripts_branch_per_word():
    prog = parse_program(STUB_PROG)
    specs = parse_config("R.tick() -> Null emits a | b b\n", ("a", "b"))
    runs = enumerate_traces(prog, "M.go", intrinsics=specs)
    assert sorted(r.outcome.trace for r in runs) == [("a",), ("b", "b")]
    for r in runs:
        assert isinstance(r.outcome, Terminated) and r.outcome.value is None
        assert len(r.script) == 1
    # lexicographic script order
    assert [r.script for r in runs] == sorted(r.script for r in runs)


def test_stub_words_are_capped_not_enumerated_forever():
    prog = parse_program(STUB_PROG)
    specs = parse_config("R.tick() -> Null emits a*\n", ("a", "b"))
    runs = enumerate_traces(prog, "M.go", intrinsics=specs)
    # shortlex sample of a*, capped at three words
    assert [r.outcome.trace for r in runs] == [(), ("a",), ("a", "a")]


def test_stubs_do_not_consume_fuel():
    prog = parse_program(STUB_PROG)
    specs = parse_config("R.tick() -> Null emits eps\n", ("a", "b"))
    (run,) = enumerate_traces(prog, "M.go", fuel=1, intrinsics=specs)
    assert isinstance(run.outcome, Terminated)  # the one fuel unit feeds go()


def test_unknown_result_stub_can_return_fresh_object():
    prog = parse_program(
        """
class R { R tick() { return null; } }
class M { R go() { R r = new R(); R x = r.tick(); return x; } }
"""
    )
    specs = parse_config("R.tick() -> Unknown emits eps\n", ("a", "b"))
    runs = enumerate_traces(prog, "M.go", intrinsics=specs)
    values = {
        (r.outcome.value is None) for r in runs if isinstance(r.outcome, Terminated)
    }
    assert values == {True, False}  # one null return, one fresh stub object


# -- satisfaction predicates ----------------------------------------------------


def test_value_satisfies():
    heap = {0: Obj("A", "siteX", {})}
    assert value_satisfies(None, heap, NULL_REGION)
    assert value_satisfies(None, heap, UNKNOWN)
    assert not value_satisfies(None, heap, created_at("siteX"))
    assert value_satisfies(0, heap, created_at("siteX"))
    assert not value_satisfies(0, heap, created_at("siteY"))
    assert value_satisfies(0, heap, UNKNOWN)
    assert not value_satisfies(0, heap, NULL_REGION)


def test_store_satisfies():
    heap = {0: Obj("A", "s", {})}
    store = {"x": 0, "y": None}
    assert store_satisfies(store, heap, {"x": created_at("s"), "y": NULL_REGION})
    assert not store_satisfies(store, heap, {"x": NULL_REGION})
    assert not store_satisfies({}, heap, {"x": UNKNOWN})


def test_heap_satisfaction_against_field_table():
    prog = parse_program(
        "class A { A f; A mk() { A x = new[s] A(); A y = x.f = x; return x; } }"
    )
    meta = region_meta(prog)
    (run,) = enumerate_traces(prog, "A.mk")
    heap = run.outcome.heap
    at_s = created_at("s")
    # the $entry receiver inhabits only Unknown, x inhabits @s and Unknown;
    # a row is needed for every region an object meets
    ok = {
        ("A", at_s, "f"): frozenset({at_s}),
        ("A", UNKNOWN, "f"): frozenset({at_s, NULL_REGION}),
    }
    assert heap_satisfies(heap, ok, prog, meta)
    bad = dict(ok)
    bad[("A", at_s, "f")] = frozenset({NULL_REGION})
    violation = first_heap_violation(heap, bad, prog, meta)
    assert violation is not None
    loc, cls, region, fname = violation
    assert (cls, region, fname) == ("A", at_s, "f")
    assert heap[loc].label == "s"
    # a missing row means nothing is allowed
    assert not heap_satisfies(heap, {}, prog, meta)

"""Guideline automata: parsing, finite reading, and Büchi lasso acceptance.

The lasso check is validated against a brute-force oracle that works on the
configuration graph of the ultimately periodic word directly, without the
relation algebra the implementation uses.
"""

import itertools
import random

import pytest

from guidecheck.guideline import GuidelineAutomaton, GuidelineError, parse_guideline

from conftest import fixture, random_automaton


def load(name):
    with open(fixture(name), encoding="utf-8") as fh:
        return parse_guideline(fh.read())


# --- brute-force Büchi oracle ------------------------------------------------


def brute_lasso(g: GuidelineAutomaton, stem, cycle) -> bool:
    """stem·cycle^ω accepted iff a reachable cycle of the configuration graph
    (state, offset-in-cycle) passes through an accepting state."""
    delta = {}
    for q, a, q2 in g.transitions:
        delta.setdefault((q, a), set()).add(q2)
    cur = set(g.initial)
    for a in stem:
        cur = {t for q in cur for t in delta.get((q, a), ())}
    n = len(cycle)
    edges = {
        (q, i): {(t, (i + 1) % n) for t in delta.get((q, cycle[i]), ())}
        for q in g.states
        for i in range(n)
    }
    seen = {(q, 0) for q in cur}
    stack = list(seen)
    while stack:
        c = stack.pop()
        for d in edges[c]:
            if d not in seen:
                seen.add(d)
                stack.append(d)
    for c in seen:
        if c[0] not in g.accepting:
            continue
        # is c on a cycle?
        frontier = set(edges[c])
        walked = set(frontier)
        work = list(frontier)
        ok = c in walked
        while work and not ok:
            d = work.pop()
            if d == c:
                ok = True
                break
            for e2 in edges[d]:
                if e2 not in walked:
                    walked.add(e2)
                    work.append(e2)
        if ok or c in walked:
            return True
    return False


# --- parsing -----------------------------------------------------------------


def test_parse_golden_fixture():
    g = load("parity.gl")
    assert g.alphabet == ("a",)
    assert set(g.states) == {"even", "odd"}
    assert g.initial == frozenset({"even"})
    assert g.accepting == frozenset({"odd"})
    assert ("even", "a", "odd") in g.transitions


@pytest.mark.parametrize(
    "text,needle,line",
    [
        ("alphabet: a\nstates q\n", "expected 'key", 2),
        ("alphabet: a\nalphabet: b\nstates: q\ninitial: q\n", "duplicate alphabet", 2),
        ("alphabet: a\nstates: q\ninitial: q\ntrans: q a\n", "state letter state", 4),
        ("alphabet: a\nstates: q\ninitial: q\nflavour: mild\n", "unknown key", 4),
        ("alphabet: a\nstates: q\ninitial: q\ntrans: q b q\n", "undeclared letter b", 4),
        ("alphabet: a\nstates: q\ninitial: p\n", "undeclared state p", None),
        ("states: q\ninitial: q\n", "missing alphabet", None),
    ],
)
def test_parse_errors_carry_line_numbers(text, needle, line):
    with pytest.raises(GuidelineError) as exc:
        parse_guideline(text)
    assert needle in str(exc.value)
    if line is not None:
        assert exc.value.line == line


def test_comments_and_blank_lines_ignored():
    g = parse_guideline(
        "# a comment\nalphabet: a b\n\nstates: s\ninitial: s\naccepting: s\ntrans: s a s\n"
    )
    assert g.accepts_finite(["a"])


# --- finite reading ----------------------------------------------------------


def test_parity_membership():
    g = load("parity.gl")
    for k in range(9):
        assert g.accepts_finite(["a"] * k) == (k % 2 == 1)


def test_dead_position():
    g = load("double_letter.gl")
    assert g.dead_position(["a", "a"]) is None
    # qf has no outgoing edges, so a third letter kills the run
    assert g.dead_position(["a", "a", "b"]) == 3
    assert g.dead_position(["a", "b"]) == 2  # qa only continues on a


def test_rel_of_word_is_compositional():
    g = load("count_mod3.gl")
    rng = random.Random(5)
    for _ in range(40):
        u = [rng.choice(g.alphabet) for _ in range(rng.randrange(4))]
        v = [rng.choice(g.alphabet) for _ in range(rng.randrange(4))]
        assert g.rel_of_word(u + v) == g.compose_rel(g.rel_of_word(u), g.rel_of_word(v))


def test_letter_rel_marks_accepting_endpoints():
    g = load("parity.gl")
    assert ("even", 1, "odd") in g.letter_rel("a")  # target accepting
    assert ("odd", 1, "even") in g.letter_rel("a")  # source accepting


# --- lasso acceptance --------------------------------------------------------


def test_parity_lassos():
    g = load("parity.gl")
    assert g.accepts_lasso([], ["a"])  # visits odd every other step
    assert g.accepts_lasso(["a"], ["a", "a"]) is True
    assert g.accepts_lasso([], ["a", "a"]) is True  # run still crosses odd
    assert g.accepts_lasso([], ["a"]) == brute_lasso(g, [], ["a"])


def test_liveness_fixture_rejects_silent_debtor():
    g = load("serve_liveness.gl")
    # access then nothing but more accesses: owing forever
    assert not g.accepts_lasso(["access"], ["access"])
    assert g.accepts_lasso([], ["log"])
    assert g.accepts_lasso([], ["access", "log"])
    assert not g.accepts_lasso(["log"], ["access", "authcheck"])


def test_cycle_must_be_nonempty():
    g = load("parity.gl")
    with pytest.raises(ValueError):
        g.accepts_lasso(["a"], [])


def test_lasso_rotation_and_unrolling_invariance():
    g = load("double_letter.gl")
    rng = random.Random(11)
    for _ in range(60):
        u = [rng.choice(g.alphabet) for _ in range(rng.randrange(3))]
        v = [rng.choice(g.alphabet) for _ in range(1, 4)]
        base = g.accepts_lasso(u, v)
        assert g.accepts_lasso(u + v, v) == base  # unroll into the stem
        assert g.accepts_lasso(u, v + v) == base  # square the cycle
        k = rng.randrange(len(v))
        assert g.accepts_lasso(u + v[:k], v[k:] + v[:k]) == base  # rotate


def test_lasso_against_bruteforce_on_random_automata():
    rng = random.Random(20260825)
    checked = 0
    for _ in range(150):
        g = random_automaton(rng)
        letters = list(g.alphabet)
        for _ in range(12):
            u = [rng.choice(letters) for _ in range(rng.randrange(3))]
            v = [rng.choice(letters) for _ in range(1, 4)]
            assert g.accepts_lasso(u, v) == brute_lasso(g, u, v), (g, u, v)
            checked += 1
    assert checked == 1800


def test_lasso_exhaustive_small_words():
    g = load("serve_safety.gl")
    for ul in range(3):
        for vl in range(1, 3):
            for u in itertools.product(g.alphabet, repeat=ul):
                for v in itertools.product(g.alphabet, repeat=vl):
                    assert g.accepts_lasso(list(u), list(v)) == brute_lasso(
                        g, list(u), list(v)
                    )

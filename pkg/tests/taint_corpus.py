"""Source/sink discipline programs with verdicts fixed by hand, in advance.

The guideline (tests/fixtures/taint.gl) forbids any sink once a src has
been emitted; the tainted state simply has no sink transition, so a
violating word — finite or infinite — loses all its automaton runs.

Every verdict below was decided by reading the program, not by running the
tool: trace out what each method can emit, in order, and check it against
the two-state automaton.  `phase_confusion` is the deliberate precision
casualty: each concrete run is safe, but the analysis may not prove it (see
the note there).  EXPECTED maps name -> "pass" | "fail".
"""

from __future__ import annotations

# name -> (source, expected verdict)
PROGRAMS: dict = {}
EXPECTED: dict = {}


def _add(name, verdict, source):
    assert name not in PROGRAMS and verdict in ("pass", "fail")
    PROGRAMS[name] = source
    EXPECTED[name] = verdict


# Only sinks: the clean state loops on sink forever.  Hand check: every
# trace is sink^n, accepted.
_add("clean_reads", "pass", """
class Main extends Object {
    Object go() {
        emit sink;
        emit sink;
        return null;
    }
}
""")

# Only sources: tainting is fine as long as nothing sinks afterwards.
_add("src_only", "pass", """
class Main extends Object {
    Object go() {
        emit src;
        emit src;
        return null;
    }
}
""")

# The canonical leak.  Trace src·sink: after src the automaton sits in
# tainted, which has no sink edge.
_add("leak_direct", "fail", """
class Main extends Object {
    Object go() {
        emit src;
        emit sink;
        return null;
    }
}
""")

# Same two events, safe order: sink happens while still clean.
_add("sink_then_src", "pass", """
class Main extends Object {
    Object go() {
        emit sink;
        emit src;
        return null;
    }
}
""")

# The leak spans a call boundary: read() taints, show() sinks, the caller
# orders them.  Composed trace src·sink, rejected.
_add("leak_in_callee", "fail", """
class Io extends Object {
    Object read() {
        emit src;
        return null;
    }

    Object show() {
        emit sink;
        return null;
    }
}

class Main extends Object {
    Object go() {
        Io io = new[k1] Io();
        Object x = io.read();
        return io.show();
    }
}
""")

# Either branch alone: traces are src or sink, each a single letter from
# the clean state, both fine.  The join {src, sink} stays fine because the
# branches never compose.
_add("branch_either", "pass", """
class Main extends Object {
    Object go(Object p, Object q) {
        if (p == q) {
            emit src;
        } else {
            emit sink;
        }
        return null;
    }
}
""")

# SAFE but expected to be FLAGGED.  The two ifs share their condition, so
# concretely a run emits either src (then skips the sink) or sink (never
# tainted) — every trace is accepted.  The analysis types each if on its
# own and concatenates the joins, {src,ε}·{ε,sink}, which contains the
# phantom trace src·sink.  Correlated conditions are exactly what a
# per-expression effect join cannot see, so the hand verdict is "fail":
# we pin the imprecision rather than the semantics.
_add("phase_confusion", "fail", """
class Main extends Object {
    Object go(Object p, Object q) {
        if (p == q) {
            emit src;
        } else {
        }
        if (p == q) {
        } else {
            emit sink;
        }
        return null;
    }
}
""")

# Region narrowing rescues precision: only Pure objects live at n2, and
# Pure.put is silent, so the call after src emits nothing.  The Raw.put
# override does sink, but no Raw object can flow into that call.
_add("narrowed_sink", "pass", """
class Pure extends Object {
    Object put() {
        return null;
    }
}

class Raw extends Pure {
    Object put() {
        emit sink;
        return null;
    }
}

class Main extends Object {
    Object go() {
        Raw r = new[n1] Raw();
        Object d = r.put();
        Pure p = new[n2] Pure();
        emit src;
        return p.put();
    }
}
""")

# An emitting loop that alternates src and sink diverges with trace
# (src·sink)^ω; already the first sink after the first src is dead, so the
# infinitary behaviour (and every prefix beyond it) is rejected.
_add("leak_loop", "fail", """
class Main extends Object {
    Object go() {
        emit src;
        emit sink;
        return this.go();
    }
}
""")

# Sinking forever while clean is fine: sink^ω stays in the accepting clean
# state, so the infinitary verdict passes too.
_add("loop_safe", "pass", """
class Main extends Object {
    Object go() {
        emit sink;
        return this.go();
    }
}
""")

# The handler sinks after the protected body tainted: src·sink again, the
# try/catch changes nothing about the order of events.
_add("catch_leak", "fail", """
class Boom extends Object {
}

class Main extends Object {
    Object go() {
        try {
            emit src;
            throw new[c1] Boom();
        } catch (Boom e) {
            emit sink;
        }
        return null;
    }
}
""")

# Throwing while tainted is fine — the exceptional trace is just src, and
# nothing ever sinks.
_add("throw_no_leak", "pass", """
class Boom extends Object {
}

class Main extends Object {
    Object go() {
        emit src;
        throw new[c2] Boom();
    }
}
""")

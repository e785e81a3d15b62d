"""End-to-end analysis and the command-line interface.

``analyze`` wires the pipeline together: static checks, effect inference
over the guideline's profile domain, the divergence equations and their
closed-form solution, then one accept/reject verdict per signature — its
returning effects, its throwing effects and its divergence effects must all
be accepted by the guideline.  When a verdict fails and entry points are
given, ``find_counterexample`` searches interpreter runs for a concrete
witness: a rejected complete trace, a prefix no accepted word extends, or a
diverging execution whose infinite trace the guideline rejects (validated by
replaying its script).

Exit codes: 0 all signatures conform, 1 some verdict failed, 2 the inputs
were unusable (parse, type, guideline or config errors).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .domains import OracleDomain, ProfileDomain
from .fjast import FjError, Program
from .fjparser import parse_programs
from .fjtypes import fj_typecheck
from .guideline import GuidelineAutomaton, GuidelineError, load_guideline
from .inference import check_well_typed, infer
from .interp import (
    OutOfFuel,
    Terminated,
    Thrown,
    enumerate_traces,
    replay_entry,
)
from .intrinsics import ConfigError, load_config, validate_against_program
from .regions import Sig, region_meta
from .solver import EquationSystem, solve


class AnalysisError(Exception):
    """Input rejected before analysis: parse/type/config problems."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(str(m) for m in self.messages))


@dataclass
class SigReport:
    sig: Sig
    returns_ok: bool
    throws_ok: bool
    diverges_ok: bool
    effects: dict | None = None  # concrete-mode renderings

    @property
    def ok(self) -> bool:
        return self.returns_ok and self.throws_ok and self.diverges_ok

    def to_json(self) -> dict:
        out = {
            "class": self.sig.cls,
            "receiver": str(self.sig.recv),
            "method": self.sig.method,
            "args": [str(a) for a in self.sig.args],
            "returns_ok": self.returns_ok,
            "throws_ok": self.throws_ok,
            "diverges_ok": self.diverges_ok,
        }
        if self.effects is not None:
            out["effects"] = self.effects
        return out


@dataclass
class Counterexample:
    entry: str
    kind: str  # finite-trace | dead-prefix | silent-divergence | divergence
    trace: tuple
    cycle: tuple | None = None
    position: int | None = None
    script: tuple = ()

    def to_json(self) -> dict:
        out = {
            "entry": self.entry,
            "kind": self.kind,
            "trace": list(self.trace),
        }
        if self.cycle is not None:
            out["cycle"] = list(self.cycle)
        if self.position is not None:
            out["position"] = self.position
        return out

    def describe(self) -> str:
        word = " ".join(self.trace) if self.trace else "(empty)"
        if self.kind == "finite-trace":
            return (f"{self.entry}: run emits '{word}', rejected at "
                    f"position {self.position}")
        if self.kind == "dead-prefix":
            return (f"{self.entry}: prefix '{word}' admits no accepted "
                    f"extension (dead at position {self.position})")
        if self.kind == "silent-divergence":
            return (f"{self.entry}: diverges after '{word}' emitting "
                    f"nothing further; the finite trace is rejected")
        cyc = " ".join(self.cycle or ())
        return (f"{self.entry}: diverges emitting '{word}' then "
                f"'{cyc}' forever; the infinite trace is rejected")


@dataclass
class Report:
    verdict: str  # "pass" | "fail"
    signatures: list = field(default_factory=list)
    counterexamples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "signatures": [s.to_json() for s in self.signatures],
            "counterexamples": [c.to_json() for c in self.counterexamples],
        }

    def to_text(self) -> str:
        lines = []
        for s in self.signatures:
            marks = ", ".join(
                f"{name}:{'ok' if okay else 'FAIL'}"
                for name, okay in (
                    ("returns", s.returns_ok),
                    ("throws", s.throws_ok),
                    ("diverges", s.diverges_ok),
                )
            )
            lines.append(f"{s.sig}  {marks}")
            if s.effects is not None:
                for part in ("returns", "throws", "diverges"):
                    val = s.effects.get(part)
                    if val:
                        lines.append(f"    {part}: {val}")
        for c in self.counterexamples:
            lines.append(f"counterexample: {c.describe()}")
        if self.counterexamples:
            lines.append(
                "(counterexamples come from a bounded enumeration of runs; "
                "not finding one proves nothing)"
            )
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def analyze(
    prog: Program,
    guideline: GuidelineAutomaton,
    intrinsics: dict | None = None,
    mode: str = "abstract",
    fuel: int = 32,
    entries: list | None = None,
    demand_driven: bool = False,
) -> Report:
    type_errors = fj_typecheck(prog)
    if type_errors:
        raise AnalysisError(type_errors)
    missing = sorted(prog.alphabet - set(guideline.alphabet))
    if missing:
        raise AnalysisError(
            [f"program emits {e}, not in the guideline alphabet"
             for e in missing]
        )
    specs = intrinsics or {}
    if specs:
        validate_against_program(specs, prog)

    domain = ProfileDomain(guideline)
    meta = region_meta(prog)
    table = infer(
        prog, domain, intrinsics=specs,
        entries=entries if demand_driven else None, meta=meta,
    )
    offenses = check_well_typed(prog, table, domain, specs, meta)
    if offenses:
        raise RuntimeError(
            "inference produced a table its own re-check rejects: "
            + "; ".join(str(o) for o in offenses)
        )
    system = EquationSystem.from_table(table, domain)
    eta = solve(system, domain)

    effects_by_sig: dict = {}
    if mode == "concrete":
        effects_by_sig = _concrete_effects(prog, guideline, specs, meta)

    sig_reports = []
    all_ok = True
    for sig in sorted(table.mtable, key=Sig.sort_key):
        t, h, _ = table.mtable[sig]
        div = eta[sig]
        if not t and not h and domain.mix_is_bottom(div):
            continue
        r_ok = all(domain.accepts_fin(u) for _, u in sorted(
            t.items(), key=lambda kv: kv[0].sort_key()))
        h_ok = all(domain.accepts_fin(u) for _, u in sorted(
            h.items(), key=lambda kv: kv[0].sort_key()))
        d_ok = domain.accepts_mix(div)
        all_ok = all_ok and r_ok and h_ok and d_ok
        sig_reports.append(SigReport(
            sig, r_ok, h_ok, d_ok, effects_by_sig.get(sig)))

    counterexamples = []
    if not all_ok and entries:
        for entry in sorted(entries):
            ce = find_counterexample(prog, guideline, entry, fuel, specs)
            if ce is not None:
                counterexamples.append(ce)

    return Report(
        "pass" if all_ok else "fail", sig_reports, counterexamples,
    )


def _concrete_effects(prog, guideline, specs, meta) -> dict:
    """Advisory language-level effects: iteration-capped, for rendering only."""
    oracle = OracleDomain(guideline.alphabet)
    table = infer(prog, oracle, intrinsics=specs, max_sweeps=8, meta=meta)
    system = EquationSystem.from_table(table, oracle)
    eta = solve(system, oracle)
    out = {}
    for sig in table.mtable:
        t, h, _ = table.mtable[sig]
        entry = {}
        rendered_t = {str(r): oracle.render_fin(u) for r, u in sorted(
            t.items(), key=lambda kv: kv[0].sort_key())
            if not oracle.fin_is_bottom(u)}
        rendered_h = {str(r): oracle.render_fin(u) for r, u in sorted(
            h.items(), key=lambda kv: kv[0].sort_key())
            if not oracle.fin_is_bottom(u)}
        if rendered_t:
            entry["returns"] = "; ".join(
                f"{r} after {w}" for r, w in rendered_t.items())
        if rendered_h:
            entry["throws"] = "; ".join(
                f"{r} after {w}" for r, w in rendered_h.items())
        if not oracle.mix_is_bottom(eta[sig]):
            entry["diverges"] = oracle.render_mix(eta[sig])
        if entry:
            out[sig] = entry
    return out


# -- counterexample search -----------------------------------------------------


def find_counterexample(
    prog: Program,
    guideline: GuidelineAutomaton,
    entry: str,
    fuel: int = 32,
    intrinsics: dict | None = None,
):
    """A concrete guideline violation reachable from entry, or None.

    Tried in order: (1) the first complete run (terminated or thrown) whose
    trace the guideline rejects as a finite word; (2) the first fuel-stopped
    run whose emitted prefix kills every automaton run; (3) the first
    diverging execution — witnessed by a repeated call configuration and
    validated by replay — whose trace stem·cycle^ω the guideline rejects.
    """
    runs = enumerate_traces(prog, entry, fuel, intrinsics)

    for run in runs:
        if isinstance(run.outcome, (Terminated, Thrown)):
            w = run.outcome.trace
            if not guideline.accepts_finite(w):
                pos = guideline.dead_position(w)
                return Counterexample(
                    entry, "finite-trace", w,
                    position=pos if pos is not None else len(w),
                    script=run.script,
                )

    for run in runs:
        if isinstance(run.outcome, OutOfFuel):
            w = run.outcome.trace
            pos = guideline.dead_position(w)
            if pos is not None:
                return Counterexample(
                    entry, "dead-prefix", w, position=pos, script=run.script,
                )

    seen = set()
    for run in runs:
        for cand in run.cycles:
            key = (cand.stem_trace, cand.cycle_trace,
                   cand.stem_script, cand.cycle_script)
            if key in seen:
                continue
            seen.add(key)
            if not cand.cycle_trace:
                if guideline.accepts_finite(cand.stem_trace):
                    continue
                if _replay_confirms(prog, entry, cand, fuel, intrinsics):
                    return Counterexample(
                        entry, "silent-divergence", cand.stem_trace,
                        cycle=(), script=cand.stem_script,
                    )
            else:
                if guideline.accepts_lasso(cand.stem_trace, cand.cycle_trace):
                    continue
                if _replay_confirms(prog, entry, cand, fuel, intrinsics):
                    return Counterexample(
                        entry, "divergence", cand.stem_trace,
                        cycle=cand.cycle_trace,
                        script=cand.stem_script + cand.cycle_script,
                    )
    return None


def _replay_confirms(prog, entry, cand, fuel, intrinsics) -> bool:
    """Re-run the candidate's choices with the cycle pumped three times; the
    trace must follow stem·cycle·cycle."""
    script = cand.stem_script + cand.cycle_script * 3
    ev = replay_entry(prog, entry, script, fuel * 4 + 8, intrinsics)
    expected = cand.stem_trace + cand.cycle_trace * 2
    got = tuple(ev.trace)
    if len(got) < len(expected):
        return False
    return got[: len(expected)] == expected


# -- command line ----------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="guidecheck",
        description="Check event-emitting programs against an automaton "
                    "guideline, including their infinite behaviours.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    pa = sub.add_parser("analyze", help="analyze programs against a guideline")
    pa.add_argument("--program", action="append", required=True,
                    metavar="FILE", help="source file (repeatable)")
    pa.add_argument("--guideline", required=True, metavar="FILE")
    pa.add_argument("--config", metavar="FILE",
                    help="external-call stub declarations")
    pa.add_argument("--mode", choices=("abstract", "concrete"),
                    default="abstract",
                    help="concrete adds advisory language renderings")
    pa.add_argument("--fuel", type=int, default=32,
                    help="interpreter call budget for counterexamples")
    pa.add_argument("--entry", action="append", metavar="Class.method",
                    help="entry point for counterexample search (repeatable)")
    pa.add_argument("--demand-driven", action="store_true",
                    help="analyze only signatures reachable from --entry")
    pa.add_argument("--report", choices=("text", "json"), default="text")
    pa.add_argument("--out", metavar="FILE", help="write the report here")
    args = parser.parse_args(argv)

    try:
        guideline = load_guideline(args.guideline)
        sources = []
        for path in args.program:
            with open(path, encoding="utf-8") as fh:
                sources.append((fh.read(), path))
        prog = parse_programs(sources, alphabet=guideline.alphabet)
        specs = {}
        if args.config:
            specs = load_config(args.config, guideline.alphabet)
        if args.demand_driven and not args.entry:
            raise AnalysisError(["--demand-driven requires --entry"])
        report = analyze(
            prog, guideline, intrinsics=specs, mode=args.mode,
            fuel=args.fuel, entries=args.entry,
            demand_driven=args.demand_driven,
        )
    except (FjError, GuidelineError, ConfigError, AnalysisError, OSError) as exc:
        print(f"guidecheck: error: {exc}", file=sys.stderr)
        return 2

    if args.report == "json":
        rendered = json.dumps(report.to_json(), indent=2, sort_keys=True)
    else:
        rendered = report.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered + "\n")
    else:
        print(rendered)
    return 0 if report.verdict == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())

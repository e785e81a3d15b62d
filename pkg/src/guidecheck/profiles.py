"""Transition-profile algebra over a guideline automaton.

A profile records, for a finite word, the triples (q, b, q') such that the
automaton can read the word from q to q', with b = 1 iff some accepting state
occurs along that path (endpoints included).  Profiles of the empty word are
tagged: the empty word's profile has the same triples as some nonempty words
on degenerate automata, but the two behave differently under the infinite
iteration, so equality on profiles includes the tag.

Sets of profiles abstract languages of finite words (``FinAbs``); pairs of a
stem profile and an idempotent cycle profile, together with a finite part,
abstract languages of finite and infinite words (``MixAbs``).  These carry
union, concatenation, Kleene star and an infinite-iteration operator, and
they admit membership probes for finite words and for ultimately periodic
words u·v^ω.

Two MixAbs values that denote the same language can differ in their raw pair
sets (a pair may be rotated through a factorization of its cycle).  Equality
and inclusion therefore go through rotation saturation: close the pair set
under (s, e) ↦ (s·χ, ξ·e·χ) for every factorization e = χ·ξ over the
automaton's full realizable monoid.  Saturated sets are canonical forms;
acceptance and membership are invariant under saturation, so those use the
raw sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .guideline import GuidelineAutomaton

# Hard cap on the realizable profile monoid; the analyses here are meant for
# small specification automata, and a blow-up almost certainly means a bug.
MONOID_CAP = 20000


@dataclass(frozen=True)
class Profile:
    triples: frozenset[tuple[str, int, str]]
    empty: bool = False

    def __repr__(self) -> str:
        inner = ", ".join(
            f"({q},{b},{q2})" for q, b, q2 in sorted(self.triples)
        )
        tag = "ε:" if self.empty else ""
        return "{" + tag + inner + "}"


class MixAbs(NamedTuple):
    fin: frozenset[Profile]
    inf: frozenset[tuple[Profile, Profile]]


FinAbs = frozenset  # of Profile

FIN_BOTTOM: FinAbs = frozenset()
MIX_BOTTOM = MixAbs(frozenset(), frozenset())


class ProfileMonoid:
    """All realizable profiles of one automaton, with composition.

    Eagerly closes the letter profiles under composition; the closure is the
    set of profiles of all finite words, which the rotation saturation and
    the prefix-extension probe quantify over.
    """

    def __init__(self, g: GuidelineAutomaton):
        self.g = g
        self.eps = Profile(
            frozenset(
                (q, 1 if q in g.accepting else 0, q) for q in g.states
            ),
            empty=True,
        )
        self.letters: dict[str, Profile] = {
            a: Profile(g.letter_rel(a)) for a in g.alphabet
        }
        self._compose_cache: dict[tuple[Profile, Profile], Profile] = {}
        self._factor_cache: dict[Profile, tuple[tuple[Profile, Profile], ...]] = {}
        self._sat_cache: dict[frozenset, frozenset] = {}
        self.elements: frozenset[Profile] = self._close()

    def _close(self) -> frozenset[Profile]:
        seen: set[Profile] = set(self.letters.values())
        frontier = list(seen)
        while frontier:
            p = frontier.pop()
            for lp in self.letters.values():
                q = self.compose(p, lp)
                if q not in seen:
                    seen.add(q)
                    frontier.append(q)
            if len(seen) > MONOID_CAP:
                raise RuntimeError("profile monoid exceeded size cap")
        seen.add(self.eps)
        return frozenset(seen)

    # -- monoid structure ---------------------------------------------------

    def compose(self, p1: Profile, p2: Profile) -> Profile:
        cached = self._compose_cache.get((p1, p2))
        if cached is not None:
            return cached
        by_src: dict[str, list[tuple[int, str]]] = {}
        for q, b, q2 in p2.triples:
            by_src.setdefault(q, []).append((b, q2))
        triples = set()
        for q, b1, mid in p1.triples:
            for b2, q2 in by_src.get(mid, ()):
                triples.add((q, b1 | b2, q2))
        out = Profile(frozenset(triples), p1.empty and p2.empty)
        self._compose_cache[(p1, p2)] = out
        return out

    def profile_of_word(self, word: Sequence[str]) -> Profile:
        p = self.eps
        for a in word:
            p = self.compose(p, self.letters[a])
        return p

    def s_plus(self, gens: Iterable[Profile]) -> frozenset[Profile]:
        """Closure of gens under composition (products of one or more)."""
        gens = list(gens)
        seen: set[Profile] = set(gens)
        frontier = list(gens)
        while frontier:
            p = frontier.pop()
            for q0 in gens:
                q = self.compose(p, q0)
                if q not in seen:
                    seen.add(q)
                    frontier.append(q)
        return frozenset(seen)

    def factorizations(self, e: Profile) -> tuple[tuple[Profile, Profile], ...]:
        cached = self._factor_cache.get(e)
        if cached is None:
            elems = self.elements
            cached = tuple(
                (x, y) for x in elems for y in elems if self.compose(x, y) == e
            )
            self._factor_cache[e] = cached
        return cached

    # -- FinAbs operations ----------------------------------------------------

    def alpha_words(self, words: Iterable[Sequence[str]]) -> FinAbs:
        return frozenset(self.profile_of_word(w) for w in words)

    def alpha_nfa(self, nfa) -> FinAbs:
        """Profiles of all words of an NFA, by pair reachability.

        Explores (NFA state set, profile) pairs; both components live in
        finite spaces, so the walk terminates.
        """
        start = (nfa.initial, self.eps)
        seen = {start}
        queue = [start]
        out: set[Profile] = set()
        while queue:
            sset, p = queue.pop()
            if sset & nfa.accepting:
                out.add(p)
            for a in self.g.alphabet:
                nxt = nfa.step(sset, a)
                if not nxt:
                    continue
                item = (nxt, self.compose(p, self.letters[a]))
                if item not in seen:
                    seen.add(item)
                    queue.append(item)
        return frozenset(out)

    def alpha_lang(self, lang) -> MixAbs:
        """Abstraction of an NFA-backed language of finite and infinite words
        (anything with a ``fin`` NFA and ``inf`` pairs of NFAs denoting U·V^ω):
        stems are profiles of U·V^k, cycles are idempotent profiles of V⁺,
        keeping the linked pairs."""
        fin = self.alpha_nfa(lang.fin)
        pairs: set[tuple[Profile, Profile]] = set()
        for u_nfa, v_nfa in lang.inf:
            heads = self.alpha_nfa(u_nfa)
            body = self.s_plus(self.alpha_nfa(v_nfa))
            stems = set(heads)
            for p in heads:
                for m in body:
                    stems.add(self.compose(p, m))
            for e in body:
                if self.compose(e, e) != e:
                    continue
                for s in stems:
                    if self.compose(s, e) == s:
                        pairs.add((s, e))
        return MixAbs(fin, frozenset(pairs))

    def concat_fin(self, a: FinAbs, b: FinAbs) -> FinAbs:
        return frozenset(self.compose(p, q) for p in a for q in b)

    def star(self, a: FinAbs) -> FinAbs:
        return frozenset({self.eps}) | self.s_plus(a)

    def omega(self, a: FinAbs) -> MixAbs:
        """Abstraction of (γ a)^ω: finite words from infinitely many ε picks,
        infinite words as linked stem/idempotent-cycle pairs."""
        gens = [p for p in a if not p.empty]
        has_eps = len(gens) < len(a)
        fin = self.star(a) if has_eps else FIN_BOTTOM
        splus = self.s_plus(gens)
        pairs = set()
        for e in splus:
            if self.compose(e, e) != e:
                continue
            for s in splus:
                # stems with an ε̂ prefix factor are covered by s ∈ S⁺ itself;
                # a bare ε̂ stem never satisfies s·e = s since e is nonempty.
                if self.compose(s, e) == s:
                    pairs.add((s, e))
        return MixAbs(fin, frozenset(pairs))

    def concat_fin_mix(self, a: FinAbs, x: MixAbs) -> MixAbs:
        fin = self.concat_fin(a, x.fin)
        inf = frozenset(
            (self.compose(p, s), e) for p in a for (s, e) in x.inf
        )
        return MixAbs(fin, inf)

    def mix_join(self, x: MixAbs, y: MixAbs) -> MixAbs:
        return MixAbs(x.fin | y.fin, x.inf | y.inf)

    # -- canonical forms ------------------------------------------------------

    def saturate(self, pairs: frozenset) -> frozenset:
        cached = self._sat_cache.get(pairs)
        if cached is not None:
            return cached
        cur: set[tuple[Profile, Profile]] = set()
        for s, e in pairs:
            if self.compose(e, e) == e and self.compose(s, e) == s:
                cur.add((s, e))
        work = list(cur)
        while work:
            s, e = work.pop()
            for chi, xi in self.factorizations(e):
                s2 = self.compose(s, chi)
                e2 = self.compose(xi, self.compose(e, chi))
                pair = (s2, e2)
                if pair not in cur:
                    cur.add(pair)
                    work.append(pair)
        out = frozenset(cur)
        self._sat_cache[pairs] = out
        return out

    def normalize_mix(self, x: MixAbs) -> MixAbs:
        return MixAbs(x.fin, self.saturate(x.inf))

    def mix_eq(self, x: MixAbs, y: MixAbs) -> bool:
        if x.fin != y.fin:
            return False
        if x.inf == y.inf:
            return True
        return self.saturate(x.inf) == self.saturate(y.inf)

    def mix_leq(self, x: MixAbs, y: MixAbs) -> bool:
        if not x.fin <= y.fin:
            return False
        if x.inf <= y.inf:
            return True
        return self.saturate(x.inf) <= self.saturate(y.inf)

    # -- membership and acceptance --------------------------------------------

    def member_fin(self, word: Sequence[str], a: FinAbs) -> bool:
        return self.profile_of_word(word) in a

    def member_up_word(self, u: Sequence[str], v: Sequence[str], x: MixAbs) -> bool:
        """Is u·v^ω denoted by x?  Holds iff some (profile(u·v^k), profile(v^m))
        is a pair of x; both power sequences are eventually periodic, so one
        pass over each orbit is complete."""
        if not v:
            raise ValueError("v must be nonempty")
        inf = self.saturate(x.inf)
        if not inf:
            return False
        pv = self.profile_of_word(v)
        cycles = []
        seen: set[Profile] = set()
        cur = pv
        while cur not in seen:
            seen.add(cur)
            cycles.append(cur)
            cur = self.compose(cur, pv)
        stems = []
        seen2: set[Profile] = set()
        cur = self.profile_of_word(u)
        while cur not in seen2:
            seen2.add(cur)
            stems.append(cur)
            cur = self.compose(cur, pv)
        return any((s, e) in inf for s in stems for e in cycles)

    def accepts_fin(self, a: FinAbs) -> bool:
        """Every finite word denoted by a is accepted by the automaton."""
        ini, acc = self.g.initial, self.g.accepting
        for p in a:
            if not any(q in ini and q2 in acc for (q, _, q2) in p.triples):
                return False
        return True

    def accepts_mix(self, x: MixAbs) -> bool:
        """Every word denoted by x (finite under the NFA reading, infinite
        under the Büchi reading) is accepted.  Invariant under saturation,
        checked on the raw pairs."""
        if not self.accepts_fin(x.fin):
            return False
        ini = self.g.initial
        for s, e in x.inf:
            starts = {q2 for (q, _, q2) in s.triples if q in ini}
            loops = {q for (q, b, q2) in e.triples if q == q2 and b == 1}
            if not (starts & loops):
                return False
        return True

    def extendable_into(self, p: Profile, fins: Iterable[FinAbs],
                        mixes: Iterable[MixAbs]) -> bool:
        """Can p be right-extended by some realizable profile into one of the
        given abstractions (a finite-part profile or an infinite-pair stem)?"""
        fin_targets: set[Profile] = set()
        for a in fins:
            fin_targets |= a
        stem_targets: set[Profile] = set()
        for x in mixes:
            for s, _ in self.saturate(x.inf):
                stem_targets.add(s)
        targets = fin_targets | stem_targets
        if not targets:
            return False
        return any(self.compose(p, tau) in targets for tau in self.elements)

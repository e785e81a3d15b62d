"""Concrete regular languages of finite and infinite words.

``Nfa`` is a plain ε-free NFA with integer states and possibly several
initial states; the regular operations (union, concatenation, star, the
nonempty part) are implemented with letter-bridging constructions so the
result stays ε-free.

``WordLang`` packs a finite part (one NFA) with an infinitary part, a list of
(U, V) pairs denoting U·V^ω where V is ε-free as a language (ε ∉ L(V)) and
nonempty.  Membership of an ultimately periodic word u·v^ω is decided on a
Büchi product automaton per pair.  ``bounded_equiv`` compares two languages
on all words and lassos up to a length bound; it is the measuring stick for
the iteration-based reference computations, which have no exact equality.

A small regex dialect (union ``|``, concatenation by juxtaposition, ``*``,
``eps``, parentheses) compiles to an ``Nfa``; it is used by the external-call
configuration and by tests.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, NamedTuple, Sequence

from .guideline import GuidelineAutomaton


class Nfa(NamedTuple):
    alphabet: tuple[str, ...]
    nstates: int
    delta: dict  # (state, letter) -> frozenset[state]
    initial: frozenset
    accepting: frozenset

    # -- construction ------------------------------------------------------

    @staticmethod
    def none(alphabet: Sequence[str]) -> "Nfa":
        return Nfa(tuple(alphabet), 0, {}, frozenset(), frozenset())

    @staticmethod
    def epsilon(alphabet: Sequence[str]) -> "Nfa":
        return Nfa(tuple(alphabet), 1, {}, frozenset({0}), frozenset({0}))

    @staticmethod
    def letter(a: str, alphabet: Sequence[str]) -> "Nfa":
        return Nfa(
            tuple(alphabet), 2, {(0, a): frozenset({1})},
            frozenset({0}), frozenset({1}),
        )

    @staticmethod
    def word(w: Sequence[str], alphabet: Sequence[str]) -> "Nfa":
        if not w:
            return Nfa.epsilon(alphabet)
        delta = {(i, a): frozenset({i + 1}) for i, a in enumerate(w)}
        return Nfa(tuple(alphabet), len(w) + 1, delta,
                   frozenset({0}), frozenset({len(w)}))

    @staticmethod
    def of_words(words: Iterable[Sequence[str]], alphabet: Sequence[str]) -> "Nfa":
        out = Nfa.none(alphabet)
        for w in words:
            out = nfa_union(out, Nfa.word(w, alphabet))
        return out

    @staticmethod
    def full(alphabet: Sequence[str]) -> "Nfa":
        """All finite words."""
        delta = {(0, a): frozenset({0}) for a in alphabet}
        return Nfa(tuple(alphabet), 1, delta, frozenset({0}), frozenset({0}))

    # -- queries -------------------------------------------------------------

    def step(self, states: frozenset, a: str) -> frozenset:
        out: set = set()
        for q in states:
            out |= self.delta.get((q, a), frozenset())
        return frozenset(out)

    def accepts(self, word: Sequence[str]) -> bool:
        cur = self.initial
        for a in word:
            cur = self.step(cur, a)
            if not cur:
                return False
        return bool(cur & self.accepting)

    def has_eps(self) -> bool:
        return bool(self.initial & self.accepting)

    def is_empty(self) -> bool:
        seen = set(self.initial)
        frontier = list(self.initial)
        while frontier:
            q = frontier.pop()
            if q in self.accepting:
                return False
            for a in self.alphabet:
                for q2 in self.delta.get((q, a), ()):
                    if q2 not in seen:
                        seen.add(q2)
                        frontier.append(q2)
        return True

    def words(self, max_len: int, limit: int | None = None) -> Iterator[tuple[str, ...]]:
        """Accepted words in shortlex order up to max_len."""
        count = 0
        layer: list[tuple[tuple[str, ...], frozenset]] = [((), self.initial)]
        for _ in range(max_len + 1):
            nxt = []
            for w, sset in layer:
                if sset & self.accepting:
                    yield w
                    count += 1
                    if limit is not None and count >= limit:
                        return
            for w, sset in layer:
                for a in self.alphabet:
                    t = self.step(sset, a)
                    if t:
                        nxt.append((w + (a,), t))
            layer = nxt
            if not layer:
                return


def _shift(nfa: Nfa, off: int) -> dict:
    return {
        (q + off, a): frozenset(q2 + off for q2 in tgt)
        for (q, a), tgt in nfa.delta.items()
    }


def nfa_union(a: Nfa, b: Nfa) -> Nfa:
    delta = dict(a.delta)
    delta.update(_shift(b, a.nstates))
    return Nfa(
        a.alphabet, a.nstates + b.nstates, delta,
        a.initial | frozenset(q + a.nstates for q in b.initial),
        a.accepting | frozenset(q + a.nstates for q in b.accepting),
    )


def nfa_concat(a: Nfa, b: Nfa) -> Nfa:
    """ε-free concatenation: transitions into an accepting state of a also
    jump to b's initial states."""
    off = a.nstates
    delta: dict = {}
    b_init = frozenset(q + off for q in b.initial)
    for (q, ltr), tgt in a.delta.items():
        extra = b_init if (tgt & a.accepting) else frozenset()
        delta[(q, ltr)] = tgt | extra
    for (q, ltr), tgt in _shift(b, off).items():
        delta[(q, ltr)] = delta.get((q, ltr), frozenset()) | tgt
    initial = a.initial | (b_init if a.has_eps() else frozenset())
    accepting = frozenset(q + off for q in b.accepting)
    if b.has_eps():
        accepting |= a.accepting
    return Nfa(a.alphabet, a.nstates + b.nstates, delta, initial, accepting)


def nfa_star(a: Nfa) -> Nfa:
    """Loop accepting transitions back to the initial states; a fresh state
    provides ε."""
    fresh = a.nstates
    delta: dict = {}
    for (q, ltr), tgt in a.delta.items():
        extra = a.initial if (tgt & a.accepting) else frozenset()
        delta[(q, ltr)] = tgt | extra
    return Nfa(
        a.alphabet, a.nstates + 1, delta,
        a.initial | frozenset({fresh}),
        a.accepting | frozenset({fresh}),
    )


def nfa_nonempty_part(a: Nfa) -> Nfa:
    """L(a) minus the empty word, via a saw-one-letter bit."""
    n = a.nstates
    delta: dict = {}
    for (q, ltr), tgt in a.delta.items():
        shifted = frozenset(t + n for t in tgt)
        delta[(q, ltr)] = shifted
        delta[(q + n, ltr)] = shifted
    return Nfa(
        a.alphabet, 2 * n, delta,
        a.initial,
        frozenset(q + n for q in a.accepting),
    )


# -- regex ------------------------------------------------------------------


class RegexError(Exception):
    pass


def regex_to_nfa(src: str, alphabet: Sequence[str]) -> Nfa:
    tokens = _regex_tokens(src)
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_alt() -> Nfa:
        left = parse_cat()
        while peek() == "|":
            take()
            left = nfa_union(left, parse_cat())
        return left

    def parse_cat() -> Nfa:
        out: Nfa | None = None
        while peek() is not None and peek() not in ("|", ")"):
            piece = parse_piece()
            out = piece if out is None else nfa_concat(out, piece)
        if out is None:
            raise RegexError(f"empty alternative in regex {src!r}")
        return out

    def parse_piece() -> Nfa:
        tok = take()
        if tok == "(":
            inner = parse_alt()
            if peek() != ")":
                raise RegexError(f"unbalanced parentheses in {src!r}")
            take()
            base = inner
        elif tok == "eps":
            base = Nfa.epsilon(alphabet)
        elif tok in ("|", ")", "*"):
            raise RegexError(f"unexpected {tok!r} in regex {src!r}")
        else:
            if tok not in alphabet:
                raise RegexError(f"letter {tok!r} not in the alphabet")
            base = Nfa.letter(tok, alphabet)
        while peek() == "*":
            take()
            base = nfa_star(base)
        return base

    out = parse_alt()
    if pos != len(tokens):
        raise RegexError(f"trailing input in regex {src!r}")
    return out


def _regex_tokens(src: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
        elif c in "()|*":
            tokens.append(c)
            i += 1
        elif c.isalnum() or c == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(src[i:j])
            i = j
        else:
            raise RegexError(f"bad character {c!r} in regex {src!r}")
    if not tokens:
        raise RegexError("empty regex")
    return tokens


# -- languages of finite and infinite words -----------------------------------


class WordLang(NamedTuple):
    fin: Nfa
    inf: tuple  # of (Nfa, Nfa) pairs (U, V): U·V^ω, ε ∉ L(V)

    @staticmethod
    def none(alphabet: Sequence[str]) -> "WordLang":
        return WordLang(Nfa.none(alphabet), ())

    @staticmethod
    def of_fin(nfa: Nfa) -> "WordLang":
        return WordLang(nfa, ())

    @staticmethod
    def universal(alphabet: Sequence[str]) -> "WordLang":
        """All finite and infinite words."""
        letters = Nfa.none(alphabet)
        for a in alphabet:
            letters = nfa_union(letters, Nfa.letter(a, alphabet))
        return WordLang(Nfa.full(alphabet), ((Nfa.epsilon(alphabet), letters),))


def lang_union(x: WordLang, y: WordLang) -> WordLang:
    return WordLang(nfa_union(x.fin, y.fin), x.inf + y.inf)


def lang_concat_fin(u: Nfa, x: WordLang) -> WordLang:
    return WordLang(
        nfa_concat(u, x.fin),
        tuple((nfa_concat(u, p), v) for p, v in x.inf),
    )


def lang_omega(u: Nfa) -> WordLang:
    """U^ω: the finite words are U* when ε ∈ U (drop ε infinitely often),
    the infinite words are (U ∖ {ε})^ω."""
    alphabet = u.alphabet
    fin = nfa_star(u) if u.has_eps() else Nfa.none(alphabet)
    w = nfa_nonempty_part(u)
    inf: tuple = () if w.is_empty() else ((Nfa.epsilon(alphabet), w),)
    return WordLang(fin, inf)


def _lasso_product(u: Nfa, v: Nfa) -> GuidelineAutomaton:
    """Büchi automaton for U·V^ω: run U, then V-words forever; completing a
    V-word enters a marked copy of V's initial states."""
    states = [f"u{q}" for q in range(u.nstates)]
    states += [f"v{q}.{b}" for q in range(v.nstates) for b in (0, 1)]
    trans: list[tuple[str, str, str]] = []
    v_init0 = [f"v{q}.0" for q in v.initial]
    v_init1 = [f"v{q}.1" for q in v.initial]
    for (q, a), tgt in u.delta.items():
        for q2 in tgt:
            trans.append((f"u{q}", a, f"u{q2}"))
        if tgt & u.accepting:
            for s in v_init0:
                trans.append((f"u{q}", a, s))
    for (q, a), tgt in v.delta.items():
        for b in (0, 1):
            src = f"v{q}.{b}"
            for q2 in tgt:
                trans.append((src, a, f"v{q2}.0"))
            if tgt & v.accepting:
                for s in v_init1:
                    trans.append((src, a, s))
    initial = [f"u{q}" for q in u.initial]
    if u.has_eps():
        initial += v_init0
    return GuidelineAutomaton(
        u.alphabet, states, initial, v_init1, trans
    )


def _nfa_key(a: Nfa) -> tuple:
    return (
        a.alphabet, a.nstates,
        frozenset((q, ltr, tgt) for (q, ltr), tgt in a.delta.items()),
        a.initial, a.accepting,
    )


class _LassoCache(dict):
    def product(self, pair: tuple[Nfa, Nfa]) -> GuidelineAutomaton:
        key = (_nfa_key(pair[0]), _nfa_key(pair[1]))
        got = self.get(key)
        if got is None:
            got = _lasso_product(*pair)
            self[key] = got
        return got


_products = _LassoCache()


def lang_member_fin(w: Sequence[str], x: WordLang) -> bool:
    return x.fin.accepts(w)


def lang_member_up(u: Sequence[str], v: Sequence[str], x: WordLang) -> bool:
    if not v:
        raise ValueError("v must be nonempty")
    return any(
        _products.product(pair).accepts_lasso(u, v) for pair in x.inf
    )


def all_words(alphabet: Sequence[str], max_len: int) -> Iterator[tuple[str, ...]]:
    for n in range(max_len + 1):
        for w in itertools.product(alphabet, repeat=n):
            yield w


def bounded_equiv(x: WordLang, y: WordLang, alphabet: Sequence[str],
                  bound: int = 6) -> bool:
    """Agreement on every finite word of length ≤ bound and every lasso u·v^ω
    with |u| ≤ bound, 1 ≤ |v| ≤ bound."""
    for w in all_words(alphabet, bound):
        if x.fin.accepts(w) != y.fin.accepts(w):
            return False
    for u in all_words(alphabet, bound):
        for v in all_words(alphabet, bound):
            if not v:
                continue
            if lang_member_up(u, v, x) != lang_member_up(u, v, y):
                return False
    return True

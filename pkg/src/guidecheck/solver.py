"""Divergence equations and their closed-form solution.

Each signature δ gets one equation δ = ⊔ᵢ Uᵢ·δᵢ built from the S-component
of the method table: Uᵢ is the finite-word effect emitted before entering the
call δᵢ.  The intended value η(δ) is the abstraction of all complete —
including infinite — event sequences of executions that start in δ and never
return.

``solve`` eliminates variables in a fixed order: rewrite the current
equation with all previously solved forms, split off the self-coefficient A,
and replace δ = A·δ ⊔ F by δ = A*·F ⊔ A^ω, distributing A* over F's terms;
a back-substitution pass then closes every form.  The result is a fixpoint
of the system — ``verify_fixpoint`` checks η(δ) = S(η)(δ) exactly — and the
order of elimination does not affect it.

``approx_eta`` is the executable reference: descend from the top element
(all finite and infinite words) by iterating the system inside a concrete
language domain, comparing successive iterates up to a length bound.  It
reports the index at which the chain stabilizes, or that it did not within
the cap.  ``naive_gfp`` does the same descent inside a finite abstract
domain with exact equality; the contrast between its answer and ``solve``'s
on self-loops is the reason the solver exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .classtable import ClassTable
from .effexpr import dict_drop_bottom, dict_join, dict_scale
from .regions import Sig


@dataclass
class EquationSystem:
    sigs: list  # canonical variable order
    rhs: dict  # Sig -> {Sig: fin element}

    @staticmethod
    def from_table(table: ClassTable, domain) -> "EquationSystem":
        sigs = sorted(table.mtable, key=Sig.sort_key)
        rhs = {
            sig: dict_drop_bottom(dict(table.mtable[sig][2]),
                                  domain.fin_is_bottom)
            for sig in sigs
        }
        return EquationSystem(sigs, rhs)


@dataclass
class _LinForm:
    coeffs: dict  # Sig -> fin element
    const: object  # mix element


def solve(system: EquationSystem, domain, order: Sequence | None = None) -> dict:
    order = list(order) if order is not None else list(system.sigs)
    if sorted(order, key=Sig.sort_key) != sorted(system.sigs, key=Sig.sort_key):
        raise ValueError("order must be a permutation of the system variables")
    solved: dict = {}

    def substitute(form: _LinForm, var, sub: _LinForm) -> _LinForm:
        u = form.coeffs.pop(var, None)
        if u is None:
            return form
        form.coeffs = dict_join(
            form.coeffs, dict_scale(u, sub.coeffs, domain.fin_concat),
            domain.fin_join,
        )
        form.const = domain.mix_join(
            form.const, domain.fin_mix_concat(u, sub.const)
        )
        return form

    for i, var in enumerate(order):
        form = _LinForm(dict(system.rhs[var]), domain.mix_bottom())
        for prev in order[:i]:
            form = substitute(form, prev, solved[prev])
        self_coeff = form.coeffs.pop(var, None)
        if self_coeff is not None and not domain.fin_is_bottom(self_coeff):
            star = domain.star(self_coeff)
            form.coeffs = dict_scale(star, form.coeffs, domain.fin_concat)
            form.const = domain.mix_join(
                domain.fin_mix_concat(star, form.const),
                domain.omega(self_coeff),
            )
        solved[var] = form

    for var in reversed(order):
        form = solved[var]
        for later, u in sorted(form.coeffs.items(),
                               key=lambda kv: Sig.sort_key(kv[0])):
            form.const = domain.mix_join(
                form.const, domain.fin_mix_concat(u, solved[later].const)
            )
        form.coeffs = {}

    return {var: solved[var].const for var in system.sigs}


def apply_system(system: EquationSystem, eta: dict, domain) -> dict:
    """One application of the equations: S(η)."""
    out = {}
    for sig in system.sigs:
        acc = domain.mix_bottom()
        for callee, u in sorted(system.rhs[sig].items(),
                                key=lambda kv: Sig.sort_key(kv[0])):
            acc = domain.mix_join(acc, domain.fin_mix_concat(u, eta[callee]))
        out[sig] = acc
    return out


def verify_fixpoint(system: EquationSystem, eta: dict, domain) -> bool:
    applied = apply_system(system, eta, domain)
    return all(domain.mix_eq(eta[sig], applied[sig]) for sig in system.sigs)


@dataclass
class ApproxResult:
    etas: list  # η₀, η₁, ... as computed
    stabilized_at: int | None  # least n with ηₙ ≈ ηₙ₊₁, None if cap exceeded

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None

    def describe(self) -> str:
        if self.stabilized_at is None:
            return (f"chain did not stabilize within {len(self.etas) - 1} "
                    f"iterations")
        return f"chain stabilized at iteration {self.stabilized_at}"


def approx_eta(system: EquationSystem, domain, cap: int = 16,
               bound: int = 6) -> ApproxResult:
    """Iterate from the top element; compare successive iterates on all words
    and lassos up to the bound.  The comparison is bounded, not exact, so the
    result is a reference measurement, not a proof."""
    eta = {sig: domain.mix_top() for sig in system.sigs}
    etas = [eta]
    for n in range(cap):
        nxt = apply_system(system, eta, domain)
        etas.append(nxt)
        if all(domain.bounded_equiv(eta[sig], nxt[sig], bound)
               for sig in system.sigs):
            return ApproxResult(etas, n)
        eta = nxt
    return ApproxResult(etas, None)


def naive_gfp(system: EquationSystem, domain, cap: int = 1000) -> dict:
    """Greatest-fixpoint iteration inside a finite domain with exact equality
    and a top element.  Converges by finiteness; the cap guards bugs."""
    eta = {sig: domain.mix_top() for sig in system.sigs}
    for _ in range(cap):
        nxt = apply_system(system, eta, domain)
        if all(domain.mix_eq(eta[sig], nxt[sig]) for sig in system.sigs):
            return nxt
        eta = nxt
    raise RuntimeError("gfp iteration failed to converge within its cap")

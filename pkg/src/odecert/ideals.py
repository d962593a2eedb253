"""Groebner bases with membership witnesses, rank, and differential radicals.

Buchberger's algorithm runs with the normal selection strategy (smallest
S-pair lcm in the active order, ties by pair index) and carries a transform
matrix so every basis element is an explicit combination of the original
generators.  That transform is what turns division records into the exact
cofactor witnesses the certificates replay.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
import heapq
from typing import Optional, Sequence

from .errors import InputError, ResourceError
from .odecore import OdeSystem, lie_derivative
from .polyarith import (GREVLEX, MonomialOrder, Polynomial, VarTable,
                        mono_coprime, mono_div, mono_divides, mono_lcm,
                        mono_mul)

DEFAULT_STEP_BUDGET = 400_000
DEFAULT_RANK_CAP = 20


class StepBudget:
    """Mutable countdown shared across one computation."""

    __slots__ = ("remaining", "what")

    def __init__(self, steps: int = DEFAULT_STEP_BUDGET, what: str = "groebner"):
        self.remaining = steps
        self.what = what

    def spend(self, n: int = 1, partial=None) -> None:
        self.remaining -= n
        if self.remaining < 0:
            raise ResourceError(f"{self.what} step budget exhausted", partial=partial)


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis plus the transform back to the generators.

    ``basis[k] == sum_j transform[k][j] * generators[j]`` exactly.
    """
    generators: tuple[Polynomial, ...]
    basis: tuple[Polynomial, ...]
    order: MonomialOrder
    transform: tuple[tuple[Polynomial, ...], ...]

    def recombination_holds(self) -> bool:
        for b, row in zip(self.basis, self.transform):
            acc = Polynomial.zero(b.table)
            for h, g in zip(row, self.generators):
                acc = acc + h * g
            if acc != b:
                return False
        return True

    def render(self) -> str:
        """Diagnostic dump, one canonical polynomial per line."""
        if not self.basis:
            return "<empty basis>"
        return "\n".join(b.render(self.order) for b in self.basis)


@dataclass(frozen=True)
class MembershipWitness:
    """Cofactors h_j with sum h_j * generators[j] equal to the queried polynomial."""
    cofactors: tuple[Polynomial, ...]


@dataclass(frozen=True)
class RankResult:
    """Smallest n >= 1 with L^n p = sum_{i<n} cofactors[i] * L^i p exactly."""
    n: int
    cofactors: tuple[Polynomial, ...]


# Transform cofactors are carried as (integer term map, positive denominator)
# pairs during Buchberger runs: plain int arithmetic avoids the per-operation
# gcd normalization of Fraction and is what keeps witness tracking usable on
# degree-8 chains.  Conversion to Polynomial happens only at the API boundary.
_IPoly = tuple[dict, int]

_IP_ZERO: _IPoly = ({}, 1)


def _ip_unit(mono) -> _IPoly:
    return ({mono: 1}, 1)


def _ip_from_poly_terms(terms: dict) -> _IPoly:
    den = 1
    for c in terms.values():
        c = Fraction(c)
        den = den * c.denominator // gcd(den, c.denominator)
    return ({m: int(Fraction(c) * den) for m, c in terms.items()}, den)


def _ip_to_poly(ip: _IPoly, table: VarTable) -> Polynomial:
    terms, den = ip
    return Polynomial(table, {m: Fraction(n, den) for m, n in terms.items() if n},
                      _normalized=False)


def _ip_normalize(terms: dict, den: int) -> _IPoly:
    if not terms:
        return ({}, 1)
    g = den
    for v in terms.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        terms = {m: v // g for m, v in terms.items()}
        den //= g
    return (terms, den)


def _ip_scale(ip: _IPoly, c: Fraction) -> _IPoly:
    if c == 0:
        return _IP_ZERO
    terms, den = ip
    out = {m: v * c.numerator for m, v in terms.items()}
    return _ip_normalize(out, den * c.denominator)


def _ip_combine(a: _IPoly, ma, b: _IPoly, mb) -> _IPoly:
    """x^ma * a - x^mb * b (the s-pair combination for monic rows)."""
    (ta, da), (tb, db) = a, b
    den = da * db // gcd(da, db)
    fa, fb = den // da, den // db
    out: dict = {}
    for m, v in ta.items():
        out[mono_mul(m, ma)] = v * fa
    for m, v in tb.items():
        mm = mono_mul(m, mb)
        s = out.get(mm, 0) - v * fb
        if s:
            out[mm] = s
        else:
            out.pop(mm, None)
    return _ip_normalize(out, den)


def _ip_submul(a: _IPoly, b: _IPoly, mult: _IPoly) -> _IPoly:
    """a - b * mult."""
    (ta, da), (tb, db), (tm, dm) = a, b, mult
    if not tb or not tm:
        return a
    prod: dict = {}
    for m1, v1 in tb.items():
        for m2, v2 in tm.items():
            mm = mono_mul(m1, m2)
            s = prod.get(mm, 0) + v1 * v2
            if s:
                prod[mm] = s
            else:
                prod.pop(mm, None)
    dp = db * dm
    den = da * dp // gcd(da, dp)
    fa, fp = den // da, den // dp
    out = {m: v * fa for m, v in ta.items()}
    for m, v in prod.items():
        s = out.get(m, 0) - v * fp
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return _ip_normalize(out, den)


class _Row:
    __slots__ = ("poly", "cofs", "lm", "lc")

    def __init__(self, poly: Polynomial, cofs: list[_IPoly],
                 order: MonomialOrder):
        self.poly = poly
        self.cofs = cofs
        self.lm, self.lc = poly.leading(order)


def _reduce_terms(terms: dict, rows: Sequence[_Row], order: MonomialOrder,
                  budget: StepBudget) -> tuple[dict, dict[int, dict]]:
    """Fully reduce a term map in place against ``rows``.

    Returns (remainder terms, multipliers): multipliers[i] is the term map of
    the polynomial m_i with  input = remainder + sum_i m_i * rows[i].poly.
    Mutating one working dict instead of rebuilding polynomials keeps the
    inner loop linear in the touched terms.
    """
    key = order.key
    key_cache: dict = {}

    def mono_key(m):
        k = key_cache.get(m)
        if k is None:
            k = key(m)
            key_cache[m] = k
        return k

    work = terms
    rem: dict = {}
    multipliers: dict[int, dict] = {}
    while work:
        wm = max(work, key=mono_key)
        wc = work[wm]
        for ridx, row in enumerate(rows):
            if mono_divides(row.lm, wm):
                c = wc / row.lc
                m = mono_div(wm, row.lm)
                for m0, c0 in row.poly.terms.items():
                    mm = mono_mul(m0, m)
                    s = work.get(mm)
                    if s is None:
                        work[mm] = -c0 * c
                    else:
                        s = s - c0 * c
                        if s:
                            work[mm] = s
                        else:
                            del work[mm]
                used = multipliers.setdefault(ridx, {})
                used[m] = used.get(m, 0) + c
                budget.spend()
                break
        else:
            rem[wm] = wc
            del work[wm]
    return rem, multipliers


def _apply_multipliers(cofs: list[_IPoly], rows: Sequence[_Row],
                       multipliers: dict[int, dict]) -> None:
    """cofs[j] -= sum_i multipliers[i] * rows[i].cofs[j], in place."""
    for ridx, mult_terms in multipliers.items():
        mult = _ip_from_poly_terms(mult_terms)
        if not mult[0]:
            continue
        row = rows[ridx]
        for j, rj in enumerate(row.cofs):
            if rj[0]:
                cofs[j] = _ip_submul(cofs[j], rj, mult)


class BuchbergerState:
    """Incremental Buchberger engine; generators may be added between runs,
    which is how rank computations warm-start each chain step.

    With ``track=False`` the transform bookkeeping is skipped entirely:
    membership can still be *tested* by reduction, but no witnesses come out.
    """

    def __init__(self, table: VarTable, order: MonomialOrder = GREVLEX,
                 budget: Optional[StepBudget] = None, track: bool = True):
        self.table = table
        self.order = order
        self.budget = budget if budget is not None else StepBudget()
        self.track = track
        self.gens: list[Polynomial] = []
        self.rows: list[_Row] = []
        self._pairs: list[tuple] = []  # heap of (lcm_key, i, j)

    # -- internals ---------------------------------------------------------

    def _unit_cofs(self, idx: int) -> list[_IPoly]:
        cofs = [_IP_ZERO] * len(self.gens)
        cofs[idx] = _ip_unit((0,) * len(self.table))
        return cofs

    def _normal_form(self, poly: Polynomial,
                     cofs: Optional[list[_IPoly]]) -> tuple[Polynomial, Optional[list[_IPoly]]]:
        """Full reduction modulo the current rows, updating cofactors."""
        rem_terms, multipliers = _reduce_terms(dict(poly.terms), self.rows,
                                               self.order, self.budget)
        if cofs is not None and self.track:
            _apply_multipliers(cofs, self.rows, multipliers)
        return Polynomial(self.table, rem_terms, _normalized=True), cofs

    def _push_pairs(self, new_index: int) -> None:
        order = self.order
        lm_new = self.rows[new_index].lm
        for i in range(new_index):
            lm_i = self.rows[i].lm
            if mono_coprime(lm_i, lm_new):
                continue  # product criterion
            key = order.key(mono_lcm(lm_i, lm_new))
            heapq.heappush(self._pairs, (key, i, new_index))

    def _append_row(self, poly: Polynomial, cofs: list[_IPoly]) -> None:
        _, lc = poly.leading(self.order)
        if lc != 1:
            inv = Fraction(1) / lc
            poly = poly.scale(inv)
            cofs = [_ip_scale(c, inv) for c in cofs] if self.track else []
        self.rows.append(_Row(poly, cofs, self.order))
        self._push_pairs(len(self.rows) - 1)

    # -- public ------------------------------------------------------------

    def add_generator(self, g: Polynomial) -> None:
        if g.table != self.table:
            raise InputError("generator over a different variable table")
        if self.track:
            for row in self.rows:
                row.cofs.append(_IP_ZERO)
        self.gens.append(g)
        if g.is_zero():
            return
        start = self._unit_cofs(len(self.gens) - 1) if self.track else []
        rem, cofs = self._normal_form(g, start)
        if not rem.is_zero():
            self._append_row(rem, cofs)

    def complete(self) -> None:
        """Run Buchberger's loop to quiescence (normal strategy)."""
        while self._pairs:
            _, i, j = heapq.heappop(self._pairs)
            fi, fj = self.rows[i], self.rows[j]
            lcm = mono_lcm(fi.lm, fj.lm)
            ci, mi = Fraction(1) / fi.lc, mono_div(lcm, fi.lm)
            cj, mj = Fraction(1) / fj.lc, mono_div(lcm, fj.lm)
            s = fi.poly.mul_term(ci, mi) - fj.poly.mul_term(cj, mj)
            # rows are monic, so the s-pair cofactors combine with unit scalars
            cofs = [_ip_combine(a, mi, b, mj)
                    for a, b in zip(fi.cofs, fj.cofs)] if self.track else []
            self.budget.spend()
            rem, cofs = self._normal_form(s, cofs)
            if not rem.is_zero():
                self._append_row(rem, cofs)

    def normal_form(self, p: Polynomial) -> Polynomial:
        """Canonical remainder of p modulo the current basis (no witness)."""
        rem, _ = self._normal_form(p, None)
        return rem

    def normal_form_with_witness(self, p: Polynomial) -> tuple[Polynomial, list[Polynomial]]:
        """Reduce p; returns (remainder, cofactors w.r.t. the generators) with
        p == remainder + sum cofactors[j]*generators[j]."""
        if not self.track:
            raise InputError("witnesses need a transform-tracking state")
        cofs = [_IP_ZERO] * len(self.gens)
        rem, cofs = self._normal_form(p, cofs)
        return rem, [-_ip_to_poly(c, self.table) for c in cofs]

    def reduced_basis(self) -> GroebnerBasis:
        """Inter-reduced, monic, deterministic view of the current basis."""
        if not self.track:
            raise InputError("the public basis view needs a transform-tracking state")
        order = self.order
        rows = sorted(self.rows, key=lambda r: order.key(r.lm))
        kept: list[_Row] = []
        for row in rows:
            if any(mono_divides(k.lm, row.lm) for k in kept):
                continue
            kept.append(row)
        for idx, row in enumerate(kept):
            others = kept[:idx] + kept[idx + 1:]
            rem_terms, multipliers = _reduce_terms(dict(row.poly.terms), others,
                                                   order, self.budget)
            cofs = list(row.cofs)
            _apply_multipliers(cofs, others, multipliers)
            rem = Polynomial(self.table, rem_terms, _normalized=True)
            _, lc = rem.leading(order)
            if lc != 1:
                inv = Fraction(1) / lc
                rem = rem.scale(inv)
                cofs = [_ip_scale(c, inv) for c in cofs]
            kept[idx] = _Row(rem, cofs, order)
        return GroebnerBasis(
            generators=tuple(self.gens),
            basis=tuple(r.poly for r in kept),
            order=order,
            transform=tuple(tuple(_ip_to_poly(c, self.table) for c in r.cofs)
                            for r in kept),
        )


def groebner(gens: Sequence[Polynomial], order: MonomialOrder = GREVLEX,
             step_budget: Optional[int] = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Deterministic for a fixed order and generator order.  An all-zero
    generator list is allowed (the zero ideal; empty basis).
    """
    if len(gens) == 0:
        raise InputError("groebner needs at least one generator")
    budget = StepBudget(step_budget if step_budget is not None else DEFAULT_STEP_BUDGET)
    state = BuchbergerState(gens[0].table, order, budget)
    for g in gens:
        state.add_generator(g)
    state.complete()
    return state.reduced_basis()


def member_with_witness(p: Polynomial, gens: Sequence[Polynomial],
                        order: MonomialOrder = GREVLEX,
                        step_budget: Optional[int] = None) -> Optional[MembershipWitness]:
    """Exact cofactors for p in <gens>, or None when p is not a member.

    Budget exhaustion raises ResourceError (distinct from None).
    """
    if len(gens) == 0:
        raise InputError("membership needs at least one generator")
    budget = StepBudget(step_budget if step_budget is not None else DEFAULT_STEP_BUDGET,
                        what="membership")
    state = BuchbergerState(gens[0].table, order, budget)
    for g in gens:
        state.add_generator(g)
    state.complete()
    rem, cofs = state.normal_form_with_witness(p)
    if not rem.is_zero():
        return None
    _assert_recombines(p, cofs, gens)
    return MembershipWitness(tuple(cofs))


def _assert_recombines(p: Polynomial, cofs: Sequence[Polynomial],
                       gens: Sequence[Polynomial]) -> None:
    acc = Polynomial.zero(p.table)
    for h, g in zip(cofs, gens):
        acc = acc + h * g
    if acc != p:
        raise AssertionError("witness does not recombine to the queried polynomial")


def reduce_mod(p: Polynomial, basis: Sequence[Polynomial],
               order: MonomialOrder = GREVLEX,
               budget: Optional[StepBudget] = None) -> Polynomial:
    """Normal form of p modulo an (assumed Groebner) basis, without witness
    tracking.  With a genuine Groebner basis the result is canonical, so a
    zero remainder decides ideal membership."""
    budget = budget if budget is not None else StepBudget(what="reduction")
    rows = [_Row(b, [], order) for b in basis if not b.is_zero()]
    rem_terms, _ = _reduce_terms(dict(p.terms), rows, order, budget)
    return Polynomial(p.table, rem_terms, _normalized=True)


def rank(p: Polynomial, sys: OdeSystem, cap: int = DEFAULT_RANK_CAP,
         order: MonomialOrder = GREVLEX,
         step_budget: Optional[int] = None) -> RankResult:
    """Smallest N >= 1 with L^N p in <p, Lp, ..., L^{N-1}p>, with exact cofactors.

    The Groebner chain is warm-started: each step adds one Lie derivative as a
    fresh generator to the running basis.  The zero polynomial has rank 1 with
    cofactor 0.  Exceeding ``cap`` raises ResourceError carrying the partial
    Lie chain.
    """
    if cap < 1:
        raise InputError("rank cap must be >= 1")
    if p.table != sys.table:
        raise InputError("polynomial and system use different variable tables")
    if p.is_zero():
        return RankResult(1, (Polynomial.zero(p.table),))
    budget = StepBudget(step_budget if step_budget is not None else DEFAULT_STEP_BUDGET,
                        what="rank")
    state = BuchbergerState(p.table, order, budget)
    chain = [p]
    state.add_generator(p)
    state.complete()
    q = p
    for n in range(1, cap + 1):
        q = lie_derivative(q, sys)
        rem, cofs = state.normal_form_with_witness(q)
        if rem.is_zero():
            _assert_recombines(q, cofs, chain)
            return RankResult(n, tuple(cofs))
        chain.append(q)
        state.add_generator(q)
        state.complete()
    raise ResourceError(f"rank cap {cap} exceeded", partial=chain[:cap])


def differential_radical(p: Polynomial, sys: OdeSystem, cap: int = DEFAULT_RANK_CAP,
                         order: MonomialOrder = GREVLEX,
                         step_budget: Optional[int] = None) -> list[Polynomial]:
    """The chain [L^0 p, ..., L^{N-1} p] whose zero-conjunction is the
    differential radical formula of p."""
    result = rank(p, sys, cap=cap, order=order, step_budget=step_budget)
    chain = [p]
    for _ in range(result.n - 1):
        chain.append(lie_derivative(chain[-1], sys))
    return chain

"""Invariance deciders, tiered side-condition discharge, and certificates.

Verdicts are three-valued.  Invariant is only ever issued with a certificate
that re-checks exactly; NotInvariant only with a rational witness point that
re-verifies by exact evaluation; everything else is Unknown.  The discharge
tiers run in order: syntactic identity, ideal reduction, rational sampling,
then (opt-in) an external SMT solver whose answers are re-verified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionError, InputError, ResourceError
from .ideals import (DEFAULT_RANK_CAP, DEFAULT_STEP_BUDGET, RankResult,
                     groebner, member_with_witness, rank, reduce_mod)
from .odecore import OdeSystem, lie_derivative, reverse
from .polyarith import GREVLEX, Polynomial, PolyMatrix, VarTable, mono_degree
from .sampling import sample_points
from .semalg import (Atom, Conjunct, Formula, NormalForm, PointEvaluator,
                     TrueF, fold_constants, make_and, negate_normal_form,
                     semialg_progress, to_normal_form)
from .smtlib import SolverConfig, emit_smtlib, run_solver

# status kinds
PROVED_IDENTITY = "proved_identity"
PROVED_IDEAL = "proved_by_ideal_reduction"
SMT_VALID = "smt_valid"
REFUTED = "refuted"
UNKNOWN = "unknown"
_PROVED_KINDS = (PROVED_IDENTITY, PROVED_IDEAL, SMT_VALID)


@dataclass(frozen=True)
class DischargeStatus:
    kind: str = UNKNOWN
    witness: Optional[tuple[Fraction, ...]] = None
    detail: str = ""

    def is_proved(self) -> bool:
        return self.kind in _PROVED_KINDS


@dataclass(frozen=True)
class SideCondition:
    """Universally quantified implication over the system variables."""
    hypothesis: Formula
    conclusion: Formula
    universal_vars: tuple[str, ...]
    provenance: str
    status: DischargeStatus = DischargeStatus()

    def with_status(self, status: DischargeStatus) -> "SideCondition":
        return replace(self, status=status)


@dataclass(frozen=True)
class DischargeConfig:
    samples: int = 100_000
    seed: int = 0
    solver: Optional[SolverConfig] = None
    rank_cap: int = DEFAULT_RANK_CAP
    step_budget: int = DEFAULT_STEP_BUDGET
    tier1_budget: int = 100_000
    split_limit: int = 64
    dnf_limit: int = 4096


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class DarbouxCert:
    kind = "darboux"
    system: OdeSystem
    p: Polynomial
    g: Polynomial
    relation: str  # "=", ">=", ">"
    domain: Optional[Formula] = None


@dataclass(frozen=True)
class VdbxCert:
    kind = "vdbx"
    system: OdeSystem
    p_vec: tuple[Polynomial, ...]
    G: PolyMatrix


@dataclass(frozen=True)
class DriCert:
    kind = "dri"
    system: OdeSystem
    p: Polynomial
    domain: Optional[Polynomial]  # Q is (domain != 0); None means Q is true
    rank_result: RankResult


@dataclass(frozen=True)
class SaiCert:
    kind = "sai"
    system: OdeSystem
    P: NormalForm
    Q: NormalForm
    forward: Formula
    backward: Formula
    conditions: tuple[SideCondition, ...]


@dataclass(frozen=True)
class ChainRecord:
    """One Star node's ideal chain q_0..q_k and the witness for
    q_k = sum_{i<k} cofactors[i] * q_i."""
    chain: tuple[Polynomial, ...]
    cofactors: tuple[Polynomial, ...]


@dataclass(frozen=True)
class HpReductionCert:
    kind = "hpreduce"
    table: VarTable
    program: object  # hpreduce.HybridProgram
    p: Polynomial
    q: Polynomial
    chains: tuple[ChainRecord, ...]
    cap: int = DEFAULT_RANK_CAP


Certificate = object  # union of the five kinds above


@dataclass(frozen=True)
class Verdict:
    kind: str  # "invariant" | "not_invariant" | "unknown"
    certificate: Optional[Certificate] = None
    witness: Optional[tuple[Fraction, ...]] = None
    failed_condition: Optional[SideCondition] = None
    conditions: tuple[SideCondition, ...] = ()
    diagnostics: str = ""

    @classmethod
    def invariant(cls, cert, conditions=()):
        return cls("invariant", certificate=cert, conditions=tuple(conditions))

    @classmethod
    def not_invariant(cls, witness, failed, conditions=()):
        return cls("not_invariant", witness=tuple(witness), failed_condition=failed,
                   conditions=tuple(conditions))

    @classmethod
    def unknown(cls, diagnostics="", conditions=()):
        return cls("unknown", diagnostics=diagnostics, conditions=tuple(conditions))


# ---------------------------------------------------------------------------
# exact dense linear algebra for cofactor search

def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """One solution of A x = b over Q (free variables set to 0), or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n] != 0:
            return None  # inconsistent
    x = [Fraction(0)] * n
    for i, c in enumerate(pivot_cols):
        x[c] = a[i][n]
    return x


def _monomials_up_to(table: VarTable, deg: int) -> list[tuple[int, ...]]:
    n = len(table)
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], remaining: int, pos: int):
        if pos == n:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, pos + 1)

    rec([], deg, 0)
    out.sort(key=lambda m: (mono_degree(m), m))
    return out


def find_darboux_cofactor(p: Polynomial, sys: OdeSystem,
                          deg_bound: Optional[int] = None) -> Optional[Polynomial]:
    """Polynomial g with lie(p) = g*p exactly, with deg(g) <= deg_bound,
    found by an exact linear solve in g's unknown coefficients."""
    if p.is_zero():
        raise InputError("Darboux cofactor search needs a nonzero polynomial")
    lp = lie_derivative(p, sys)
    if deg_bound is None:
        deg_bound = max(0, lp.total_degree() - p.total_degree())
    monos = _monomials_up_to(sys.table, deg_bound)
    columns = [p.mul_term(Fraction(1), m) for m in monos]
    row_monos = sorted({mm for col in columns for mm in col.terms} | set(lp.terms))
    rows = [[col.terms.get(mm, Fraction(0)) for col in columns] for mm in row_monos]
    rhs = [lp.terms.get(mm, Fraction(0)) for mm in row_monos]
    sol = _solve_exact(rows, rhs)
    if sol is None:
        return None
    g = Polynomial(sys.table, {m: c for m, c in zip(monos, sol)})
    assert (lp - g * p).is_zero()
    return g


def find_vectorial_darboux(p_vec: Sequence[Polynomial], sys: OdeSystem,
                           deg_bound: Optional[int] = None) -> Optional[PolyMatrix]:
    """Matrix G with lie(p_i) = sum_j G[i][j]*p_j exactly for all i; one
    degree bound shared across all entries."""
    if len(p_vec) == 0:
        raise InputError("vectorial Darboux search needs a nonempty vector")
    n = len(p_vec)
    lies = [lie_derivative(q, sys) for q in p_vec]
    if deg_bound is None:
        lo = min((q.total_degree() for q in p_vec if not q.is_zero()), default=0)
        hi = max((l.total_degree() for l in lies), default=0)
        deg_bound = max(0, hi - lo)
    monos = _monomials_up_to(sys.table, deg_bound)
    columns = [[q.mul_term(Fraction(1), m) for m in monos] for q in p_vec]
    entries: list[Polynomial] = []
    for i in range(n):
        flat_cols = [col for j in range(n) for col in columns[j]]
        row_monos = sorted({mm for col in flat_cols for mm in col.terms} | set(lies[i].terms))
        rows = [[col.terms.get(mm, Fraction(0)) for col in flat_cols] for mm in row_monos]
        rhs = [lies[i].terms.get(mm, Fraction(0)) for mm in row_monos]
        sol = _solve_exact(rows, rhs)
        if sol is None:
            return None
        for j in range(n):
            part = sol[j * len(monos):(j + 1) * len(monos)]
            entries.append(Polynomial(sys.table, {m: c for m, c in zip(monos, part)}))
    G = PolyMatrix(n, n, entries)
    for i in range(n):
        residue = lies[i] - _dot(G.row(i), p_vec)
        assert residue.is_zero()
    return G


def _dot(row: Sequence[Polynomial], vec: Sequence[Polynomial]) -> Polynomial:
    acc = Polynomial.zero(row[0].table)
    for a, b in zip(row, vec):
        acc = acc + a * b
    return acc


def dri_companion(rank_result: RankResult, p: Polynomial, sys: OdeSystem) -> VdbxCert:
    """Companion-form vectorial Darboux certificate from a rank identity:
    1 on the superdiagonal, the rank cofactors in the last row, and
    p_vec = (p, Lp, ..., L^{N-1}p)."""
    n = rank_result.n
    p_vec = [p]
    for _ in range(n - 1):
        p_vec.append(lie_derivative(p_vec[-1], sys))
    zero, one = Polynomial.zero(sys.table), Polynomial.one(sys.table)
    entries = []
    for i in range(n - 1):
        entries.extend([one if j == i + 1 else zero for j in range(n)])
    entries.extend(rank_result.cofactors)
    return VdbxCert(system=sys, p_vec=tuple(p_vec), G=PolyMatrix(n, n, entries))


# ---------------------------------------------------------------------------
# discharge tiers

def _formula_table(*formulas: Formula) -> Optional[VarTable]:
    from .semalg import formula_atoms
    for f in formulas:
        for a in formula_atoms(f):
            return a.poly.table
    return None


def _try_identity(cond: SideCondition) -> Optional[DischargeStatus]:
    concl = fold_constants(cond.conclusion)
    if isinstance(concl, TrueF):
        return DischargeStatus(PROVED_IDENTITY, detail="conclusion is identically true")
    from .semalg import FalseF
    hyp = fold_constants(cond.hypothesis)
    if isinstance(hyp, FalseF):
        return DischargeStatus(PROVED_IDENTITY, detail="hypothesis is identically false")
    return None


def _split_cases(c: Conjunct, split_limit: int) -> Optional[list[tuple[list[Polynomial], list[Polynomial]]]]:
    """Sign-split a hypothesis conjunct into (equalities, stricts) cases.

    Paired atoms p>=0, -p>=0 go straight to the equality side; each leftover
    p>=0 splits into p=0 | p>0.  None when the split would exceed the limit.
    """
    geqs = list(c.geqs)
    available = set(geqs)
    eqs: list[Polynomial] = []
    used: set[Polynomial] = set()
    loose: list[Polynomial] = []
    for p in geqs:
        if p in used:
            continue
        if -p in available:
            used.add(p)
            used.add(-p)
            eqs.append(p)
        else:
            used.add(p)
            loose.append(p)
    if 2 ** len(loose) > split_limit:
        return None
    cases = [(list(eqs), list(c.gts))]
    for p in loose:
        nxt = []
        for (e, s) in cases:
            nxt.append((e + [p], list(s)))
            nxt.append((list(e), s + [p]))
        cases = nxt
    return cases


def _case_basis(eqs: list[Polynomial], budget: int) -> Optional[list[Polynomial]]:
    nonzero = [e for e in eqs if not e.is_zero()]
    if not nonzero:
        return []
    gb = groebner(nonzero, step_budget=budget)
    return list(gb.basis)


def _case_entails(eqs: list[Polynomial], stricts: list[Polynomial],
                  concl_nf: NormalForm, budget: int) -> bool:
    try:
        basis = _case_basis(eqs, budget)
    except ResourceError:
        return False
    if basis and basis[0].is_constant():
        return True  # 1 in the ideal: no real point satisfies the equalities
    cache: dict[Polynomial, Polynomial] = {}

    def red(q: Polynomial) -> Polynomial:
        r = cache.get(q)
        if r is None:
            r = reduce_mod(q, basis) if basis else q
            cache[q] = r
        return r

    red_stricts = [red(s) for s in stricts]
    for r in red_stricts:
        if r.is_zero() or (r.is_constant() and r.constant_value() <= 0):
            return True  # contradictory case is vacuously entailing
    strict_set = set(red_stricts)
    for r in red_stricts:
        if -r in strict_set:
            return True

    def forced_strict(q: Polynomial) -> bool:
        r = red(q)
        if r.is_constant():
            return r.constant_value() > 0
        return _positive_multiple(r, red_stricts)

    def forced_nonstrict(q: Polynomial) -> bool:
        r = red(q)
        if r.is_zero():
            return True
        if r.is_constant():
            return r.constant_value() >= 0
        return _positive_multiple(r, red_stricts)

    for disjunct in concl_nf.disjuncts:
        if all(forced_nonstrict(p) for p in disjunct.geqs) and \
           all(forced_strict(q) for q in disjunct.gts):
            return True
    return False


def _positive_multiple(r: Polynomial, candidates: list[Polynomial]) -> bool:
    if r.is_zero():
        return False
    _, rc = r.leading(GREVLEX)
    for s in candidates:
        if s.is_zero() or s.is_constant():
            continue
        _, sc = s.leading(GREVLEX)
        lam = rc / sc
        if lam > 0 and r == s.scale(lam):
            return True
    return False


def _try_ideal(cond: SideCondition, config: DischargeConfig,
               hyp_nf: NormalForm) -> Optional[DischargeStatus]:
    try:
        concl_nf = to_normal_form(cond.conclusion, limit=config.dnf_limit)
    except ResourceError:
        return None
    for disjunct in hyp_nf.disjuncts:
        cases = _split_cases(disjunct, config.split_limit)
        if cases is None:
            return None
        for eqs, stricts in cases:
            try:
                if not _case_entails(eqs, stricts, concl_nf, config.tier1_budget):
                    return None
            except ResourceError:
                return None
    return DischargeStatus(PROVED_IDEAL,
                           detail="conclusion forced modulo hypothesis equalities")


def _boundary_atoms(hyp_nf: NormalForm) -> list[Polynomial]:
    seen: dict[Polynomial, None] = {}
    for c in hyp_nf.disjuncts:
        for p in c.geqs:
            seen.setdefault(p)
    return list(seen)


def _try_sampling(cond: SideCondition, config: DischargeConfig,
                  hyp_nf: NormalForm) -> Optional[DischargeStatus]:
    table = _formula_table(cond.hypothesis, cond.conclusion)
    if table is None or config.samples <= 0:
        return None
    rng = random.Random(config.seed)
    boundary = _boundary_atoms(hyp_nf)
    for point in sample_points(rng, len(table), config.samples, boundary):
        ev = PointEvaluator(point)
        if ev(cond.hypothesis) and not ev(cond.conclusion):
            return DischargeStatus(REFUTED, witness=point,
                                   detail="exact rational counterexample")
    return None


def _try_smt(cond: SideCondition, config: DischargeConfig) -> DischargeStatus:
    query = emit_smtlib(cond.hypothesis, cond.conclusion, cond.universal_vars,
                        comment=f"side condition: {cond.provenance}")
    if config.solver is None:
        return DischargeStatus(UNKNOWN, detail="no solver configured")
    answer = run_solver(query, config.solver, cond.universal_vars)
    if answer.result == "unsat":
        return DischargeStatus(SMT_VALID, detail="solver reports unsat")
    if answer.result == "sat":
        table = _formula_table(cond.hypothesis, cond.conclusion)
        if answer.model is not None and table is not None:
            point = tuple(answer.model.get(n, Fraction(0)) for n in table.names)
            ev = PointEvaluator(point)
            if ev(cond.hypothesis) and not ev(cond.conclusion):
                return DischargeStatus(REFUTED, witness=point,
                                       detail="solver model re-verified exactly")
        return DischargeStatus(UNKNOWN,
                               detail="solver model failed exact re-verification")
    return DischargeStatus(UNKNOWN, detail=answer.detail or f"solver answered {answer.result}")


def discharge(cond: SideCondition, config: Optional[DischargeConfig] = None) -> SideCondition:
    """Fill the condition's status via the tiers: identity, ideal reduction,
    rational sampling (refutation only), then the optional external solver."""
    config = config if config is not None else DischargeConfig()
    status = _try_identity(cond)
    if status is not None:
        return cond.with_status(status)
    try:
        hyp_nf = to_normal_form(cond.hypothesis, limit=config.dnf_limit)
    except ResourceError as exc:
        return cond.with_status(DischargeStatus(UNKNOWN, detail=str(exc)))
    status = _try_ideal(cond, config, hyp_nf)
    if status is not None:
        return cond.with_status(status)
    status = _try_sampling(cond, config, hyp_nf)
    if status is not None:
        return cond.with_status(status)
    return cond.with_status(_try_smt(cond, config))


# ---------------------------------------------------------------------------
# deciders

def _domain_formula(domain: Optional[Polynomial]) -> Formula:
    if domain is None:
        return TrueF()
    return Atom("!=", domain)


def check_algebraic_invariance(p: Polynomial, sys: OdeSystem,
                               domain: Optional[Polynomial] = None,
                               config: Optional[DischargeConfig] = None) -> Verdict:
    """Decide validity of p=0 -> [x'=f & Q] p=0 with Q either true or a
    disequation (domain != 0), via the side condition
    forall x (p=0 and Q -> differential radical of p)."""
    config = config if config is not None else DischargeConfig()
    try:
        rr = rank(p, sys, cap=config.rank_cap, step_budget=config.step_budget)
    except ResourceError as exc:
        return Verdict.unknown(diagnostics=f"rank computation failed: {exc}")
    chain = [p]
    for _ in range(rr.n - 1):
        chain.append(lie_derivative(chain[-1], sys))
    eps = make_and([Atom("=", q) for q in chain])
    hyp = make_and([Atom("=", p), _domain_formula(domain)])
    cond = SideCondition(hypothesis=hyp, conclusion=eps,
                         universal_vars=sys.table.names,
                         provenance="algebraic-invariance")
    cond = discharge(cond, config)
    if cond.status.is_proved():
        cert = DriCert(system=sys, p=p, domain=domain, rank_result=rr)
        if not check_certificate(cert, config):
            return Verdict.unknown(diagnostics="internal: DRI certificate failed re-check",
                                   conditions=(cond,))
        return Verdict.invariant(cert, conditions=(cond,))
    if cond.status.kind == REFUTED:
        return Verdict.not_invariant(cond.status.witness, cond, conditions=(cond,))
    return Verdict.unknown(diagnostics=cond.status.detail, conditions=(cond,))


def check_semialgebraic_invariance(P: NormalForm, Q: NormalForm, sys: OdeSystem,
                                   config: Optional[DischargeConfig] = None) -> Verdict:
    """Decide P -> [x'=f & Q] P for semialgebraic P, Q via the two progress
    side conditions (forward, and backward over the reversed system), with
    the topological open/closed shortcuts."""
    config = config if config is not None else DischargeConfig()
    try:
        conditions = sai_side_conditions(P, Q, sys, config)
    except ResourceError as exc:
        return Verdict.unknown(diagnostics=f"progress construction failed: {exc}")
    forward, backward = conditions
    if not forward.status.is_proved():
        forward = discharge(forward, config)
    if forward.status.kind == REFUTED:
        return Verdict.not_invariant(forward.status.witness, forward,
                                     conditions=(forward, backward))
    if not backward.status.is_proved():
        backward = discharge(backward, config)
    if backward.status.kind == REFUTED:
        return Verdict.not_invariant(backward.status.witness, backward,
                                     conditions=(forward, backward))
    if forward.status.is_proved() and backward.status.is_proved():
        cert = SaiCert(system=sys, P=P, Q=Q,
                       forward=forward.conclusion, backward=backward.conclusion,
                       conditions=(forward, backward))
        if not check_certificate(cert, config):
            return Verdict.unknown(diagnostics="internal: SAI certificate failed re-check",
                                   conditions=(forward, backward))
        return Verdict.invariant(cert, conditions=(forward, backward))
    pending = tuple(c for c in (forward, backward) if not c.status.is_proved())
    detail = "; ".join(f"{c.provenance}: {c.status.detail or 'undecided'}" for c in pending)
    return Verdict.unknown(diagnostics=detail, conditions=(forward, backward))


def sai_side_conditions(P: NormalForm, Q: NormalForm, sys: OdeSystem,
                        config: Optional[DischargeConfig] = None) -> tuple[SideCondition, SideCondition]:
    """The two premises of the domain-aware semialgebraic invariance rule,
    with the open/closed shortcut statuses pre-filled."""
    config = config if config is not None else DischargeConfig()
    cap = config.rank_cap
    neg_p = negate_normal_form(P, limit=config.dnf_limit)
    rsys = reverse(sys)
    fwd_cache: dict = {}
    bwd_cache: dict = {}
    forward = SideCondition(
        hypothesis=make_and([P.to_formula(), Q.to_formula(),
                             semialg_progress(Q, sys, cap=cap, _cache=fwd_cache)]),
        conclusion=semialg_progress(P, sys, cap=cap, _cache=fwd_cache),
        universal_vars=sys.table.names,
        provenance="sai-forward",
    )
    backward = SideCondition(
        hypothesis=make_and([neg_p.to_formula(), Q.to_formula(),
                             semialg_progress(Q, rsys, cap=cap, _cache=bwd_cache)]),
        conclusion=semialg_progress(neg_p, rsys, cap=cap, _cache=bwd_cache),
        universal_vars=sys.table.names,
        provenance="sai-backward",
    )
    if P.all_strict():
        forward = forward.with_status(
            DischargeStatus(PROVED_IDENTITY, detail="open-set shortcut"))
    if P.all_nonstrict():
        backward = backward.with_status(
            DischargeStatus(PROVED_IDENTITY, detail="closed-set shortcut"))
    return forward, backward


# ---------------------------------------------------------------------------
# certificate checking

def check_certificate(cert: Certificate, config: Optional[DischargeConfig] = None) -> bool:
    """Replay a certificate by exact arithmetic; False means rejected."""
    config = config if config is not None else DischargeConfig()
    try:
        if isinstance(cert, DarbouxCert):
            return _check_darboux(cert, config)
        if isinstance(cert, VdbxCert):
            return _check_vdbx(cert)
        if isinstance(cert, DriCert):
            return _check_dri(cert, config)
        if isinstance(cert, SaiCert):
            return _check_sai(cert, config)
        if isinstance(cert, HpReductionCert):
            return _check_hpreduce(cert)
    except (InputError, DimensionError, ResourceError):
        return False
    raise InputError(f"unknown certificate type {type(cert).__name__}")


def _check_darboux(cert: DarbouxCert, config: DischargeConfig) -> bool:
    if cert.relation not in ("=", ">=", ">"):
        return False
    residue = lie_derivative(cert.p, cert.system) - cert.g * cert.p
    if cert.domain is None:
        return residue.is_zero()
    rel = "=" if cert.relation == "=" else ">="
    cond = SideCondition(hypothesis=cert.domain, conclusion=Atom(rel, residue),
                         universal_vars=cert.system.table.names,
                         provenance="darboux-premise")
    return discharge(cond, config).status.is_proved()


def _check_vdbx(cert: VdbxCert) -> bool:
    n = len(cert.p_vec)
    if cert.G.rows != n or cert.G.cols != n or n == 0:
        return False
    for i in range(n):
        lhs = lie_derivative(cert.p_vec[i], cert.system)
        if not (lhs - _dot(cert.G.row(i), cert.p_vec)).is_zero():
            return False
    return True


def _check_dri(cert: DriCert, config: DischargeConfig) -> bool:
    rr = cert.rank_result
    if rr.n < 1 or len(rr.cofactors) != rr.n:
        return False
    chain = [cert.p]
    for _ in range(rr.n):
        chain.append(lie_derivative(chain[-1], cert.system))
    acc = Polynomial.zero(cert.p.table)
    for g, q in zip(rr.cofactors, chain[:rr.n]):
        acc = acc + g * q
    if acc != chain[rr.n]:
        return False
    for i in range(1, rr.n):
        if member_with_witness(chain[i], chain[:i],
                               step_budget=config.step_budget) is not None:
            return False  # a smaller rank exists: recorded minimality is wrong
    return True


def _check_sai(cert: SaiCert, config: DischargeConfig) -> bool:
    forward, backward = sai_side_conditions(cert.P, cert.Q, cert.system, config)
    if cert.forward != forward.conclusion or cert.backward != backward.conclusion:
        return False
    recorded = {c.provenance: c for c in cert.conditions}
    for rebuilt in (forward, backward):
        rec = recorded.get(rebuilt.provenance)
        if rec is None:
            return False
        if rec.hypothesis != rebuilt.hypothesis or rec.conclusion != rebuilt.conclusion:
            return False
        if rebuilt.status.is_proved():
            continue  # open/closed shortcut re-derived
        if not discharge(rebuilt, config).status.is_proved():
            return False
    return True


def _check_hpreduce(cert: HpReductionCert) -> bool:
    from .hpreduce import reduce_box

    for record in cert.chains:
        k = len(record.chain) - 1
        if k < 0 or len(record.cofactors) != k:
            return False
        acc = Polynomial.zero(cert.p.table)
        for g, q in zip(record.cofactors, record.chain[:k]):
            acc = acc + g * q
        if acc != record.chain[k]:
            return False
    q, trace = reduce_box(cert.program, cert.p, cap=cert.cap)
    if q != cert.q:
        return False
    replayed = tuple(ChainRecord(tuple(c), tuple(w)) for c, w in trace.star_chains())
    return replayed == cert.chains

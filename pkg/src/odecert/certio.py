"""Versioned JSON (de)serialization of certificates.

Certificates are self-contained: they carry the variable table and the ODE
system (or program) they speak about, with polynomials and formulas in the
canonical text form, so `cert-check` can replay them from the file alone.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError
from .hpreduce import render_program
from .ideals import RankResult
from .invariant import (ChainRecord, Certificate, DarbouxCert, DischargeStatus,
                        DriCert, HpReductionCert, SaiCert, SideCondition,
                        VdbxCert)
from .odecore import OdeSystem
from .parser import parse_formula, parse_program, parse_term
from .polyarith import PolyMatrix, VarTable
from .semalg import Conjunct, NormalForm, render_formula

FORMAT_VERSION = 1


def _fraction_str(c: Fraction) -> str:
    return str(c)


def _fraction_parse(s: str) -> Fraction:
    return Fraction(s)


def _system_json(sys: OdeSystem) -> dict:
    return {
        "vars": list(sys.table.names),
        "ode_vars": [sys.table.name(i) for i in sys.var_indices],
        "ode_rhs": [f.render() for f in sys.rhs],
    }


def _system_parse(d: dict) -> OdeSystem:
    table = VarTable(d["vars"])
    pairs = [(name, parse_term(rhs, table))
             for name, rhs in zip(d["ode_vars"], d["ode_rhs"])]
    return OdeSystem.from_pairs(table, pairs)


def _nf_json(nf: NormalForm) -> dict:
    return {"disjuncts": [{"geqs": [p.render() for p in c.geqs],
                           "gts": [q.render() for q in c.gts]}
                          for c in nf.disjuncts]}


def _nf_parse(d: dict, table: VarTable) -> NormalForm:
    disjuncts = []
    for c in d["disjuncts"]:
        disjuncts.append(Conjunct(tuple(parse_term(s, table) for s in c["geqs"]),
                                  tuple(parse_term(s, table) for s in c["gts"])))
    return NormalForm(tuple(disjuncts))


def status_json(status: DischargeStatus) -> dict:
    return {
        "kind": status.kind,
        "witness": None if status.witness is None
        else [_fraction_str(v) for v in status.witness],
        "detail": status.detail,
    }


def _status_parse(d: dict) -> DischargeStatus:
    witness = d.get("witness")
    return DischargeStatus(
        kind=d["kind"],
        witness=None if witness is None else tuple(_fraction_parse(v) for v in witness),
        detail=d.get("detail", ""),
    )


def condition_json(cond: SideCondition) -> dict:
    return {
        "hypothesis": render_formula(cond.hypothesis),
        "conclusion": render_formula(cond.conclusion),
        "universal_vars": list(cond.universal_vars),
        "provenance": cond.provenance,
        "status": status_json(cond.status),
    }


def _condition_parse(d: dict, table: VarTable) -> SideCondition:
    return SideCondition(
        hypothesis=parse_formula(d["hypothesis"], table),
        conclusion=parse_formula(d["conclusion"], table),
        universal_vars=tuple(d["universal_vars"]),
        provenance=d["provenance"],
        status=_status_parse(d["status"]),
    )


def certificate_to_json(cert: Certificate) -> dict:
    if isinstance(cert, DarbouxCert):
        return {
            "version": FORMAT_VERSION,
            "kind": "darboux",
            "system": _system_json(cert.system),
            "p": cert.p.render(),
            "g": cert.g.render(),
            "relation": cert.relation,
            "domain": None if cert.domain is None else render_formula(cert.domain),
        }
    if isinstance(cert, VdbxCert):
        return {
            "version": FORMAT_VERSION,
            "kind": "vdbx",
            "system": _system_json(cert.system),
            "p_vec": [p.render() for p in cert.p_vec],
            "G": [[cert.G.get(i, j).render() for j in range(cert.G.cols)]
                  for i in range(cert.G.rows)],
        }
    if isinstance(cert, DriCert):
        return {
            "version": FORMAT_VERSION,
            "kind": "dri",
            "system": _system_json(cert.system),
            "p": cert.p.render(),
            "domain": None if cert.domain is None else cert.domain.render(),
            "rank": {"n": cert.rank_result.n,
                     "cofactors": [g.render() for g in cert.rank_result.cofactors]},
        }
    if isinstance(cert, SaiCert):
        return {
            "version": FORMAT_VERSION,
            "kind": "sai",
            "system": _system_json(cert.system),
            "P": _nf_json(cert.P),
            "Q": _nf_json(cert.Q),
            "forward": render_formula(cert.forward),
            "backward": render_formula(cert.backward),
            "conditions": [condition_json(c) for c in cert.conditions],
        }
    if isinstance(cert, HpReductionCert):
        return {
            "version": FORMAT_VERSION,
            "kind": "hpreduce",
            "vars": list(cert.table.names),
            "program": render_program(cert.program),
            "p": cert.p.render(),
            "q": cert.q.render(),
            "cap": cert.cap,
            "chains": [{"chain": [p.render() for p in rec.chain],
                        "cofactors": [g.render() for g in rec.cofactors]}
                       for rec in cert.chains],
        }
    raise InputError(f"cannot serialize certificate of type {type(cert).__name__}")


def certificate_from_json(d: dict) -> Certificate:
    if not isinstance(d, dict) or "kind" not in d:
        raise InputError("certificate JSON must be an object with a 'kind' field")
    if d.get("version") != FORMAT_VERSION:
        raise InputError(f"unsupported certificate version {d.get('version')!r}")
    kind = d["kind"]
    if kind == "hpreduce":
        table = VarTable(d["vars"])
        return HpReductionCert(
            table=table,
            program=parse_program(d["program"], table),
            p=parse_term(d["p"], table),
            q=parse_term(d["q"], table),
            cap=d.get("cap", 20),
            chains=tuple(
                ChainRecord(tuple(parse_term(s, table) for s in rec["chain"]),
                            tuple(parse_term(s, table) for s in rec["cofactors"]))
                for rec in d["chains"]),
        )
    system = _system_parse(d["system"])
    table = system.table
    if kind == "darboux":
        return DarbouxCert(
            system=system,
            p=parse_term(d["p"], table),
            g=parse_term(d["g"], table),
            relation=d["relation"],
            domain=None if d.get("domain") is None else parse_formula(d["domain"], table),
        )
    if kind == "vdbx":
        rows = d["G"]
        n = len(rows)
        entries = [parse_term(s, table) for row in rows for s in row]
        return VdbxCert(
            system=system,
            p_vec=tuple(parse_term(s, table) for s in d["p_vec"]),
            G=PolyMatrix(n, n if n == 0 else len(rows[0]), entries),
        )
    if kind == "dri":
        return DriCert(
            system=system,
            p=parse_term(d["p"], table),
            domain=None if d.get("domain") is None else parse_term(d["domain"], table),
            rank_result=RankResult(
                d["rank"]["n"],
                tuple(parse_term(s, table) for s in d["rank"]["cofactors"])),
        )
    if kind == "sai":
        return SaiCert(
            system=system,
            P=_nf_parse(d["P"], table),
            Q=_nf_parse(d["Q"], table),
            forward=parse_formula(d["forward"], table),
            backward=parse_formula(d["backward"], table),
            conditions=tuple(_condition_parse(c, table) for c in d["conditions"]),
        )
    raise InputError(f"unknown certificate kind {kind!r}")

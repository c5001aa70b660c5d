"""Relation classifier combining invariants with verified certificates.

Five relations between two shifts are tracked:

``COE``   continuous orbit equivalence
``SCOE``  COE with cocycles cohomologous to 1
``UCOE``  uniform COE, decided here through eventual conjugacy
``UOE``   order-unit isomorphism of the stationary dimension groups
``TSC``   two-sided conjugacy of the natural extensions

Known implications: UCOE => UOE, UCOE => SCOE, SCOE => COE and SCOE => TSC.
Established statuses travel forward along them and refutations travel
backward.  A relation that ends up both established and refuted means a bug
or a bad certificate, and raises ``ContradictoryEvidence``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .fullgroup import af_transpositions
from .invariants import (
    bowen_franks,
    det_id_minus,
    dimension_group,
    dimension_groups_isomorphic,
    elementary_sse_search,
    format_poly,
    k_groups,
    nonzero_spectrum_poly,
    pointed_isomorphic,
)
from .sft import LCFunction, Point, TransitionMatrix, cocycle_sum, is_coboundary_equivalent
from .transducer import (
    CoeData,
    HomeoCertificate,
    check_coe_data,
    compose,
    extract_coe_data,
    identity,
    outputs_equal,
    run,
    synchronized_difference,
    tableau_transducer,
    verify_homeomorphism,
)

RELATIONS = ("COE", "SCOE", "UCOE", "UOE", "TSC")
IMPLICATIONS = (("UCOE", "UOE"), ("UCOE", "SCOE"), ("SCOE", "COE"), ("SCOE", "TSC"))

ESTABLISHED, REFUTED, UNKNOWN = "established", "refuted", "unknown"


class ContradictoryEvidence(RuntimeError):
    pass


@dataclass(frozen=True)
class Status:
    state: str = UNKNOWN
    evidence: str = ""
    cited: dict[str, str] = field(default_factory=dict)


@dataclass
class RelationReport:
    a_name: str
    b_name: str
    statuses: dict[str, Status]
    certificates: list[dict[str, str]] = field(default_factory=list)

    def state(self, relation: str) -> str:
        return self.statuses[relation].state

    def to_dict(self) -> dict:
        return {
            "pair": [self.a_name, self.b_name],
            "relations": {
                r: {"status": s.state, "evidence": s.evidence, "cited": dict(sorted(s.cited.items()))}
                for r, s in ((r, self.statuses[r]) for r in RELATIONS)
            },
            "certificates": self.certificates,
        }


# -- certificate checks -----------------------------------------------------------------


@dataclass(frozen=True)
class EventualConjugacy:
    verified: bool
    k1: int | None = None
    k2: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.verified


def _least_lag(T, k_bound: int) -> int | None:
    """Least ``K`` with ``sigma^K T(sigma x) == sigma^(K+1) T(x)`` for all ``x``."""
    for K in range(k_bound + 1):
        if all(synchronized_difference(T, (), T, (a,), a, K, K + 1) is None for a in T.source.symbols):
            return K
    return None


def verify_eventual_conjugacy(c: HomeoCertificate, k_bound: int = 16) -> EventualConjugacy:
    k1 = _least_lag(c.forward, k_bound)
    if k1 is None:
        return EventualConjugacy(False, reason=f"forward map: no K <= {k_bound}")
    k2 = _least_lag(c.backward, k_bound)
    if k2 is None:
        return EventualConjugacy(False, k1, reason=f"backward map: no K <= {k_bound}")
    return EventualConjugacy(True, k1, k2)


@dataclass(frozen=True)
class UcoeCheck:
    verified: bool
    witness: object = None
    side: str = ""

    def __bool__(self) -> bool:
        return self.verified


def verify_ucoe(c: HomeoCertificate, depth: int = 2, k_bound: int = 16) -> UcoeCheck:
    """Conjugate every AF transposition of depth at most ``depth`` and look for its synchronising time.

    This tests a generating family only; it is evidence, not a proof, of
    uniformity over the whole AF subgroup.
    """
    for side, h, hinv in (("A", c.forward, c.backward), ("B", c.backward, c.forward)):
        space = h.source
        ident = identity(h.target)
        for d in range(1, depth + 1):
            for tau in af_transpositions(space, d):
                g = compose(h, compose(tableau_transducer(tau), hinv))
                if not any(outputs_equal(g, ident, K, K) for K in range(k_bound + 1)):
                    return UcoeCheck(False, tau, side)
    return UcoeCheck(True)


def lemma_sides(c: HomeoCertificate, data: CoeData, y: Point) -> tuple[int, int]:
    """Both sides of the cocycle identity relating the time changes of ``h`` and its inverse at ``y``."""
    x, xs = run(c.backward, y), run(c.backward, y.shift(1))
    k1, l1, k2, l2 = data.k1, data.l1, data.k2, data.l2
    lhs = cocycle_sum(k1, l2(y), x) + cocycle_sum(l1, k2(y), xs) + 1
    rhs = cocycle_sum(k1, k2(y), xs) + cocycle_sum(l1, l2(y), x)
    return lhs, rhs


def check_lemma_useful(c: HomeoCertificate, data: CoeData, samples: Iterable[Point]) -> bool:
    for y in samples:
        lhs, rhs = lemma_sides(c, data, y)
        if lhs != rhs:
            return False
    c1 = data.c1.constant_value
    if c1 is not None:
        return c1 == 1 and data.c2.constant_value == 1
    return True


@dataclass(frozen=True)
class ScoeCheck:
    status: str
    witnesses: tuple[LCFunction, LCFunction] | None = None
    orbit: tuple[int, ...] | None = None
    space: str = ""


def scoe_check(c: HomeoCertificate, data: CoeData, max_depth: int = 8) -> ScoeCheck:
    """Are both cocycles of the certificate cohomologous to 1?

    A "no" concerns this certificate only; it does not refute the relation.
    """
    r1 = is_coboundary_equivalent(data.c1, LCFunction.const(c.source, 1), max_depth)
    r2 = is_coboundary_equivalent(data.c2, LCFunction.const(c.target, 1), max_depth)
    for r, space in ((r1, "A"), (r2, "B")):
        if r.status == "no":
            return ScoeCheck("no", orbit=r.orbit, space=space)
    if r1 and r2:
        return ScoeCheck("yes", (r1.witness, r2.witness))
    return ScoeCheck("unknown")


# -- classification ---------------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    search_bound: int = 8
    max_depth: int = 4
    k_bound: int = 16
    inner_dim: int = 4
    coboundary_depth: int = 8
    ucoe_depth: int = 2


def _fmt_group(g) -> str:
    return f"{g} unit={list(g.unit_class)}"


def _direct_evidence(A: TransitionMatrix, B: TransitionMatrix, bounds: Bounds) -> dict[str, Status]:
    out: dict[str, Status] = {}

    dA, dB = det_id_minus(A), det_id_minus(B)
    (K0A, K1A), (K0B, K1B) = k_groups(A), k_groups(B)
    cited = {"det_id_minus": f"{dA} {dB}", "k0": f"{_fmt_group(K0A)} | {_fmt_group(K0B)}", "k1_rank": f"{K1A} {K1B}"}
    pointed = pointed_isomorphic(K0A, K0B)
    if dA != dB:
        out["COE"] = Status(REFUTED, "det(I-A) differs", cited)
    elif K1A != K1B or pointed is False:
        out["COE"] = Status(REFUTED, "K-groups with unit class differ", cited)
    elif pointed:
        out["COE"] = Status(ESTABLISHED, "K-groups, unit class and det(I-A) agree (via classification theorem)", cited)

    pA, pB = nonzero_spectrum_poly(A), nonzero_spectrum_poly(B)
    bfA, bfB = bowen_franks(A), bowen_franks(B)
    cited = {"charpoly_nonzero": f"{format_poly(pA)} | {format_poly(pB)}", "bowen_franks": f"{bfA} | {bfB}"}
    if pA != pB:
        out["TSC"] = Status(REFUTED, "nonzero spectra differ", cited)
    elif not bfA.same_group(bfB):
        out["TSC"] = Status(REFUTED, "Bowen-Franks groups differ", cited)
    else:
        found = elementary_sse_search(A, B, bounds.inner_dim)
        if found:
            R, S = found
            cited = cited | {"sse_R": str(R), "sse_S": str(S)}
            out["TSC"] = Status(ESTABLISHED, "elementary strong shift equivalence", cited)

    gA, gB = dimension_group(A), dimension_group(B)
    cited = {
        "dimgroup_A": f"rank={gA.eventual_rank} lambda={gA.lam} unit={gA.unit_value}",
        "dimgroup_B": f"rank={gB.eventual_rank} lambda={gB.lam} unit={gB.unit_value}",
    }
    iso = dimension_groups_isomorphic(gA, gB)
    if iso is True:
        out["UOE"] = Status(ESTABLISHED, "dimension groups with order unit agree", cited)
    elif iso is False:
        out["UOE"] = Status(REFUTED, "dimension groups with order unit differ", cited)
    return out


def _certificate_evidence(
    A: TransitionMatrix, B: TransitionMatrix, certs: Sequence[HomeoCertificate], bounds: Bounds
) -> tuple[dict[str, Status], list[dict[str, str]]]:
    out: dict[str, Status] = {}
    log: list[dict[str, str]] = []
    for i, c in enumerate(certs):
        cid = c.name or f"cert{i}"
        if (c.source, c.target) == (B, A):
            c = c.inverse()
        entry = {"id": cid}
        log.append(entry)
        if (c.source, c.target) != (A, B):
            entry["homeomorphism"] = "wrong spaces"
            continue
        check = verify_homeomorphism(c)
        if not check:
            entry["homeomorphism"] = f"failed ({check.reason}, witness {check.witness})"
            continue
        entry["homeomorphism"] = "verified"
        data = extract_coe_data(c, bounds.search_bound, bounds.max_depth)
        if data is None or not check_coe_data(c, data):
            entry["coe_data"] = "inconclusive"
            continue
        entry["coe_data"] = f"c1={data.c1!r} c2={data.c2!r}"
        out.setdefault("COE", Status(ESTABLISHED, f"verified certificate {cid}"))
        ev = verify_eventual_conjugacy(c, bounds.k_bound)
        entry["eventual_conjugacy"] = f"K1={ev.k1} K2={ev.k2}" if ev else ev.reason
        if ev:
            uc = verify_ucoe(c, bounds.ucoe_depth, bounds.k_bound)
            entry["ucoe_generators"] = "verified" if uc else f"failed at {uc.witness!r} on {uc.side}"
            out.setdefault("UCOE", Status(ESTABLISHED, f"eventual conjugacy certificate {cid}", {"K1": str(ev.k1), "K2": str(ev.k2)}))
        sc = scoe_check(c, data, bounds.coboundary_depth)
        entry["cocycles_trivial"] = sc.status
        if sc.status == "yes":
            w1, w2 = sc.witnesses
            out.setdefault("SCOE", Status(ESTABLISHED, f"certificate {cid} with coboundary witnesses", {"witness_A": repr(w1), "witness_B": repr(w2)}))
    return out, log


def _propagate(statuses: dict[str, Status]) -> dict[str, Status]:
    out = dict(statuses)
    changed = True
    while changed:
        changed = False
        for p, q in IMPLICATIONS:
            for src, dst, state in ((p, q, ESTABLISHED), (q, p, REFUTED)):
                if out[src].state != state:
                    continue
                if out[dst].state == UNKNOWN:
                    out[dst] = Status(state, f"implied by {src} {state}")
                    changed = True
                elif out[dst].state != state:
                    raise ContradictoryEvidence(
                        f"{src} is {state} ({out[src].evidence}) but {dst} is {out[dst].state} ({out[dst].evidence})"
                    )
    return out


def classify(
    A: TransitionMatrix,
    B: TransitionMatrix,
    certificates: Sequence[HomeoCertificate] = (),
    bounds: Bounds = Bounds(),
    names: tuple[str, str] = ("A", "B"),
) -> RelationReport:
    direct = _direct_evidence(A, B, bounds)
    from_certs, log = _certificate_evidence(A, B, certificates, bounds)
    for rel, status in from_certs.items():
        if direct.get(rel, Status()).state == REFUTED:
            raise ContradictoryEvidence(f"{rel}: {status.evidence} contradicts {direct[rel].evidence}")
        direct.setdefault(rel, status)
    statuses = _propagate({r: direct.get(r, Status()) for r in RELATIONS})
    return RelationReport(names[0], names[1], statuses, log)


# -- serialisation -----------------------------------------------------------------------


def report_to_json(report: RelationReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)


def report_to_text(report: RelationReport) -> str:
    d = report.to_dict()
    lines = [f"pair {d['pair'][0]} {d['pair'][1]}"]
    for rel in RELATIONS:
        r = d["relations"][rel]
        lines.append(f"relation {rel}")
        lines.append(f"  status: {r['status']}")
        lines.append(f"  evidence: {r['evidence']}")
        lines += [f"  cite {k}: {v}" for k, v in r["cited"].items()]
    for entry in d["certificates"]:
        lines.append("certificate")
        lines += [f"  {k}: {v}" for k, v in entry.items()]
    return "\n".join(lines) + "\n"


def parse_report_text(text: str) -> dict:
    """Inverse of :func:`report_to_text`, producing the same dictionary as the JSON form."""
    out: dict = {"pair": [], "relations": {}, "certificates": []}
    block: dict | None = None
    for line in text.splitlines():
        if line.startswith("pair "):
            out["pair"] = line.split()[1:3]
        elif line.startswith("relation "):
            block = {"status": "", "evidence": "", "cited": {}}
            out["relations"][line.split()[1]] = block
        elif line == "certificate":
            block = {}
            out["certificates"].append(block)
        elif line.startswith("  cite "):
            key, _, value = line[len("  cite ") :].partition(": ")
            block["cited"][key] = value
        elif line.startswith("  "):
            key, _, value = line[2:].partition(": ")
            block[key] = value
    return out

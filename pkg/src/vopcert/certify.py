"""Certification core: exact efficiency and robustness condition checks.

The verdict logic is deliberately one-directional. A violated necessary
condition refutes robustness with a re-checkable direction witness; a
sufficient condition certifies robustness only when every hypothesis it
needs (convex feasible set, cone-convex objective, exact cones) has been
established, never merely assumed. Anything else is Inconclusive and points
at the sampling oracle.

Every intersection-form condition is recomputed in its dual span form
through a double-description round trip, and the two verdicts must agree
exactly; a mismatch raises ConsistencyError because it can only be a bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .cones import (
    ConeHRep, cone_is_trivial, dd_generators_from_halfspaces,
    dd_halfspaces_from_generators,
)
from .errors import (
    CapabilityError, ConsistencyError, InfeasiblePointError,
    InstanceFormatError,
)
from .funcs import (
    CONVEX, NOT_CONVEX, PieceFn, Selection, eval_components,
    full_dim_selections, kconvexity_check,
)
from .geometry import (
    ConicBlockSet, DISCRETIZATION_NOTE, DiscretizedSet, FeasibleSet,
    OrderingCone, PolyhedralSet, conic_support, cones_coincide_check, feasible_contains,
    g1_cone, g2_cone, tangent_cone,
)
from .linprog import INFEASIBLE, OPTIMAL, le, lp_solve
from .rationals import (
    Q0, Q1, Vec, dedup_rows, is_zero_vec, vadd, vdot, vscale, vsub, zeros,
)

ROBUST_CERTIFIED = "RobustCertified"
NOT_ROBUST_CERTIFIED = "NotRobustCertified"
INCONCLUSIVE = "Inconclusive"

NECESSARY_INTERSECTION = "necessary-intersection"
NECESSARY_SPAN = "necessary-span"
SUFFICIENT_INTERSECTION = "sufficient-intersection"
SUFFICIENT_SPAN = "sufficient-span"
CONES_COINCIDE = "nonascent-cones-coincide"
CONIC_GATE = "conic-gate"
DISCRETIZED = "discretized"


@dataclass(frozen=True)
class VOPInstance:
    """A vector problem: minimize the objective vector over the feasible set
    with respect to the ordering cone."""

    objectives: Tuple[PieceFn, ...]
    feasible: FeasibleSet
    cone: OrderingCone
    n: int

    def __post_init__(self):
        if len(self.objectives) < 2:
            raise InstanceFormatError("need at least two objective components")
        if self.cone.dim != len(self.objectives):
            raise InstanceFormatError("ordering cone dimension != objective count")
        for fn in self.objectives:
            for piece in fn.pieces:
                if len(piece.a) != self.n:
                    raise InstanceFormatError("objective piece arity != n")
        if isinstance(self.feasible, PolyhedralSet):
            for r in self.feasible.rows:
                if len(r) != self.n:
                    raise InstanceFormatError("feasible row arity != n")

    @property
    def p(self) -> int:
        return len(self.objectives)


@dataclass(frozen=True)
class EfficiencyResult:
    efficient: bool
    witness: Optional[Vec] = None   # dominating feasible point when not efficient
    exact: bool = True


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    holds: Optional[bool]           # None = Unknown
    witness: Optional[Vec] = None
    exact: bool = True
    note: Optional[str] = None


@dataclass(frozen=True)
class Verdict:
    status: str
    applied_rule: Optional[str]
    hypotheses: Dict[str, Optional[bool]]
    reports: Tuple[ConditionReport, ...]
    oracle_referral: bool
    witness: Optional[Vec] = None
    stamps: Tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# feasible-set reduction

def polyhedral_reduction(omega: FeasibleSet) -> Optional[Tuple[Tuple[Vec, ...], Vec]]:
    """(rows, rhs) with the set equal to {x : rows x <= rhs}, or None."""
    if isinstance(omega, PolyhedralSet):
        return omega.rows, omega.rhs
    if isinstance(omega, DiscretizedSet):
        return (tuple(c.a for c in omega.constraints),
                tuple(-c.b for c in omega.constraints))
    if isinstance(omega, ConicBlockSet):
        if not all(fn.is_affine() and len(fn.pieces) == 1 for fn in omega.g):
            return None
        rows = []
        rhs = []
        n = len(omega.g[0].pieces[0].a)
        for lam in omega.q_cone.dual_neg_gens.generators:
            row = zeros(n)
            off = Q0
            for li, fn in zip(lam, omega.g):
                p = fn.pieces[0]
                if li:
                    row = vadd(row, vscale(li, p.a))
                    off += li * p.b
            if is_zero_vec(row):
                if off > 0:
                    raise InstanceFormatError("conic block is empty")
                continue
            rows.append(row)
            rhs.append(-off)
        return tuple(rows), tuple(rhs)
    return None


# ---------------------------------------------------------------------------
# exact efficiency decision

def _all_affine(components) -> bool:
    return all(fn.is_affine() for fn in components)


def _verify_domination(inst: VOPInstance, xbar: Vec, y: Vec) -> bool:
    if not feasible_contains(inst.feasible, y):
        return False
    w = vsub(eval_components(inst.objectives, xbar),
             eval_components(inst.objectives, y))
    if is_zero_vec(w):
        return False
    return all(vdot(m, w) <= 0 for m in inst.cone.hrep.rows)


def _grid_efficiency(inst: VOPInstance, xbar: Vec) -> EfficiencyResult:
    """Flagged fallback for shapes outside the exact path: finite probes only."""
    n = inst.n
    step = Fraction(1, 8) if n <= 2 else Fraction(1, 4)
    offsets = []
    span = int(1 / step)
    ranges = [range(-span, span + 1)] * n

    def rec(i, cur):
        if i == n:
            offsets.append(tuple(cur))
            return
        for k in ranges[i]:
            rec(i + 1, cur + [k * step])
    rec(0, [])
    for off in offsets:
        y = vadd(xbar, off)
        if _verify_domination(inst, xbar, y):
            return EfficiencyResult(False, y, exact=True)
    return EfficiencyResult(True, exact=False)


def efficiency_check(inst: VOPInstance, xbar: Vec,
                     regions: Optional[Tuple[Selection, ...]] = None) -> EfficiencyResult:
    """Exact efficiency decision for piecewise-affine objectives.

    Enumerates full-dimensional piece-selection regions (their closures
    cover space), and on each solves the domination program: maximize the
    summed cone violation of w = f(xbar) - f(y) subject to w staying in the
    cone, y in region and feasible. Pointedness makes a positive value
    equivalent to domination. Quadratic pieces fall back to a flagged grid.
    """
    if not feasible_contains(inst.feasible, xbar):
        raise InfeasiblePointError("candidate point is infeasible")
    if not _all_affine(inst.objectives):
        return _grid_efficiency(inst, xbar)
    reduced = polyhedral_reduction(inst.feasible)
    if reduced is None:
        raise CapabilityError("feasible set has no exact polyhedral reduction")
    omega_rows, omega_rhs = reduced
    n = inst.n
    fxbar = eval_components(inst.objectives, xbar)
    cone_rows = inst.cone.hrep.rows
    if regions is None:
        regions = full_dim_selections(inst.objectives, n)
    ssum = zeros(inst.p)
    for m in cone_rows:
        ssum = vadd(ssum, m)
    for sel in regions:
        sel_a = [fn.pieces[s].a for fn, s in zip(inst.objectives, sel.indices)]
        sel_b = [fn.pieces[s].b for fn, s in zip(inst.objectives, sel.indices)]
        rels = [le(row, rhs) for row, rhs in sel.rows]
        rels += [le(row, rhs) for row, rhs in zip(omega_rows, omega_rhs)]
        # cone rows on w = f(xbar) - (A y + b): m.w <= 0
        for m in cone_rows:
            row = zeros(n)
            off = Q0
            for mi, ai, bi, fi in zip(m, sel_a, sel_b, fxbar):
                if mi:
                    row = vadd(row, vscale(-mi, ai))
                    off += mi * (bi - fi)
            rels.append(le(row, off))
        # objective: sigma(y) = -(sum of cone rows) . w, linear part in y
        c = zeros(n)
        const = Q0
        for si, ai, bi, fi in zip(ssum, sel_a, sel_b, fxbar):
            if si:
                c = vadd(c, vscale(si, ai))
                const += si * (bi - fi)
        res = lp_solve(c, rels)
        if res.status == INFEASIBLE:
            continue
        if res.status == OPTIMAL:
            if res.value + const <= 0:
                continue
            y = res.x
        else:
            sigma0 = vdot(c, res.x) + const
            rate = vdot(c, res.ray)
            t = Q1 if sigma0 + rate > 0 else (Q1 - sigma0) / rate
            y = vadd(res.x, vscale(t, res.ray))
        if not _verify_domination(inst, xbar, y):
            raise ConsistencyError("domination witness failed substitution")
        return EfficiencyResult(False, y)
    return EfficiencyResult(True)


# ---------------------------------------------------------------------------
# cone conditions

def _trivial(rows, dim) -> Tuple[bool, Optional[Vec]]:
    return cone_is_trivial(ConeHRep(dim, dedup_rows(rows)))


def _span_form_verdict(rows, dim) -> bool:
    """Dual route: the sum of the generated cone and nothing else fills space
    iff the polar (rows as halfspaces) is trivial; decided after a full
    double-description round trip so it is a genuinely independent path."""
    polar = ConeHRep(dim, dedup_rows(rows))
    gens = dd_generators_from_halfspaces(polar)
    back = dd_halfspaces_from_generators(gens)
    trivial, _ = cone_is_trivial(back)
    return trivial


@dataclass(frozen=True)
class _Context:
    tangent_rows: Tuple[Vec, ...]
    tangent_exact: bool
    tangent_note: Optional[str]
    g1: ConeHRep
    g2_rows: Tuple[Vec, ...]
    g2_exact: bool
    gate_ok: Optional[bool]     # None when no conic block involved
    stamps: Tuple[str, ...]


def _build_context(inst: VOPInstance, xbar: Vec) -> _Context:
    stamps = []
    gate_ok = None
    if isinstance(inst.feasible, ConicBlockSet):
        sup = conic_support(inst.feasible, xbar)
        gate_ok = not sup.zero_in_subdiff
        t = tangent_cone(inst.feasible, xbar)
        t_rows, t_exact, t_note = t.cone.rows, t.exact, t.note
        if not sup.exact:
            t_exact = False
    else:
        t = tangent_cone(inst.feasible, xbar)
        t_rows, t_exact, t_note = t.cone.rows, t.exact, t.note
    if isinstance(inst.feasible, DiscretizedSet):
        # the sampled family is handled exactly as the polyhedron it is;
        # the whole verdict carries the discretization stamp instead
        stamps.append(DISCRETIZATION_NOTE)
        t_exact = True
    g1 = g1_cone(inst.objectives, inst.cone, xbar)
    g2 = g2_cone(inst.objectives, inst.cone, xbar)
    return _Context(t_rows, t_exact, t_note, g1, g2.hrep.rows, g2.exact,
                    gate_ok, tuple(stamps))


def _necessary_reports(inst: VOPInstance, ctx: _Context, n: int):
    rows = ctx.g1.rows + ctx.tangent_rows
    trivial, witness = _trivial(rows, n)
    if isinstance(inst.feasible, ConicBlockSet) and ctx.gate_ok is False:
        # surrogate tangent not valid: the branch is reported, not decided
        inter = ConditionReport(NECESSARY_INTERSECTION, None, exact=False,
                                note="conic gate failed; necessary branch skipped")
        span = ConditionReport(NECESSARY_SPAN, None, exact=False,
                               note="conic gate failed; necessary branch skipped")
        return inter, span
    if trivial:
        inter = ConditionReport(NECESSARY_INTERSECTION, True,
                                exact=ctx.tangent_exact, note=ctx.tangent_note)
    else:
        assert not is_zero_vec(witness)
        assert all(vdot(r, witness) <= 0 for r in rows)
        inter = ConditionReport(NECESSARY_INTERSECTION, False, witness)
    try:
        span_ok = _span_form_verdict(rows, n)
    except CapabilityError as exc:
        return inter, ConditionReport(NECESSARY_SPAN, None, exact=False,
                                      note=f"capability: {exc}")
    if span_ok != trivial:
        raise ConsistencyError("intersection and span forms disagree (necessary)")
    span = ConditionReport(NECESSARY_SPAN, span_ok,
                           None if span_ok else witness)
    return inter, span


def _sufficient_reports(inst: VOPInstance, ctx: _Context, n: int,
                        hypotheses_ok: Optional[bool]):
    rows = tuple(ctx.g2_rows) + ctx.tangent_rows
    trivial, witness = _trivial(rows, n)
    exact = ctx.g2_exact and ctx.tangent_exact
    if trivial and hypotheses_ok and exact:
        inter = ConditionReport(SUFFICIENT_INTERSECTION, True)
    elif not trivial:
        # a nonzero direction: the condition itself fails regardless of flags
        inter = ConditionReport(SUFFICIENT_INTERSECTION, False, witness,
                                exact=exact)
    else:
        why = "hypotheses not established" if not hypotheses_ok else \
            "cones not exact"
        inter = ConditionReport(SUFFICIENT_INTERSECTION, None, exact=exact,
                                note=why)
    try:
        span_ok = _span_form_verdict(rows, n)
    except CapabilityError as exc:
        return inter, ConditionReport(SUFFICIENT_SPAN, None, exact=False,
                                      note=f"capability: {exc}")
    if span_ok != trivial:
        raise ConsistencyError("intersection and span forms disagree (sufficient)")
    if inter.holds is None:
        span = ConditionReport(SUFFICIENT_SPAN, None, exact=exact, note=inter.note)
    else:
        span = ConditionReport(SUFFICIENT_SPAN, span_ok,
                               None if span_ok else witness, exact=exact)
    return inter, span


def check_necessary_intersection(inst: VOPInstance, xbar: Vec) -> ConditionReport:
    ctx = _build_context(inst, xbar)
    inter, _ = _necessary_reports(inst, ctx, inst.n)
    return inter


def check_sufficient_intersection(inst: VOPInstance, xbar: Vec) -> ConditionReport:
    ctx = _build_context(inst, xbar)
    hyp = _hypotheses(inst, xbar, ctx)
    ok = hyp["feasible-set-convex"] is True and hyp["objective-cone-convex"] is True
    inter, _ = _sufficient_reports(inst, ctx, inst.n, ok)
    return inter


def check_span_forms(inst: VOPInstance, xbar: Vec):
    ctx = _build_context(inst, xbar)
    hyp = _hypotheses(inst, xbar, ctx)
    ok = hyp["feasible-set-convex"] is True and hyp["objective-cone-convex"] is True
    _, nspan = _necessary_reports(inst, ctx, inst.n)
    _, sspan = _sufficient_reports(inst, ctx, inst.n, ok)
    return nspan, sspan


def _hypotheses(inst: VOPInstance, xbar: Vec, ctx: _Context):
    if isinstance(inst.feasible, ConicBlockSet):
        conv = kconvexity_check(inst.feasible.g,
                                inst.feasible.q_cone.dual_neg_gens.generators,
                                inst.n)
        omega_convex = True if conv.status == CONVEX else (
            False if conv.status == NOT_CONVEX else None)
    else:
        omega_convex = True  # explicit halfspace systems are convex
    kconv = kconvexity_check(inst.objectives,
                             inst.cone.dual_neg_gens.generators, inst.n)
    f_convex = True if kconv.status == CONVEX else (
        False if kconv.status == NOT_CONVEX else None)
    return {
        "feasible-set-convex": omega_convex,
        "objective-cone-convex": f_convex,
        CONES_COINCIDE: cones_coincide_check(inst.objectives, inst.cone, xbar),
    }


def certify(inst: VOPInstance, xbar: Vec) -> Verdict:
    """Decision tree: necessary refutation first, then hypothesis-gated
    sufficiency, otherwise Inconclusive with an oracle referral."""
    if not feasible_contains(inst.feasible, xbar):
        raise InfeasiblePointError("candidate point is infeasible")
    n = inst.n
    ctx = _build_context(inst, xbar)
    hyp = _hypotheses(inst, xbar, ctx)
    reports = []
    if ctx.gate_ok is not None:
        reports.append(ConditionReport(
            CONIC_GATE, ctx.gate_ok,
            note=None if ctx.gate_ok else
            "0 in the support scalarization subdifferential"))
    if isinstance(inst.feasible, DiscretizedSet):
        reports.append(ConditionReport(DISCRETIZED, True, exact=False,
                                       note=DISCRETIZATION_NOTE))
    inter_nec, span_nec = _necessary_reports(inst, ctx, n)
    hyp_ok = (hyp["feasible-set-convex"] is True
              and hyp["objective-cone-convex"] is True)
    inter_suf, span_suf = _sufficient_reports(inst, ctx, n, hyp_ok)
    reports += [inter_nec, span_nec, inter_suf, span_suf]
    reports.append(ConditionReport(CONES_COINCIDE, hyp[CONES_COINCIDE]))
    reports = tuple(sorted(reports, key=lambda r: r.condition))

    if inter_nec.holds is False:
        # weaker condition failing forces the stronger one to fail too
        assert inter_suf.holds is False
        return Verdict(NOT_ROBUST_CERTIFIED, NECESSARY_INTERSECTION, hyp,
                       reports, False, inter_nec.witness, ctx.stamps)
    if inter_suf.holds is True:
        return Verdict(ROBUST_CERTIFIED, SUFFICIENT_INTERSECTION, hyp,
                       reports, False, None, ctx.stamps)
    return Verdict(INCONCLUSIVE, None, hyp, reports, True, None, ctx.stamps)

"""Ordering cones, feasible sets, and the derived variational cones.

An ordering cone is validated on construction (nontrivial, pointed, full
interior) and carries both representations plus the generators of its
positive dual, which supply the scalarization weights used everywhere else.

The two non-ascent cones built from a candidate point are the heart of the
certification logic: the componentwise cone crosses dual generators with
component gradient vertices, while the scalarized cone takes the gradient
vertices of each scalarized objective directly. The first always contains
the second's polar relationships the right way around: componentwise is a
subset of scalarized, with equality exactly when the qualification holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence, Tuple, Union

from .cones import (
    ConeHRep, ConeVRep, cone_is_trivial, dd_generators_from_halfspaces,
    dd_halfspaces_from_generators, hrep_equal, hrep_subset,
)
from .errors import (
    EmptyInteriorError, InfeasiblePointError, NotPointedError,
    TrivialConeError,
)
from .funcs import (
    CONVEX, AffinePiece, PieceFn, clarke_subdiff_component, eval_components,
    kconvexity_check, scalarized_subdiff,
)
from .linprog import INFEASIBLE, eq, le, lp_solve, feasible_point
from .rationals import (
    Mat, Q0, Q1, Vec, dedup_rows, is_zero_vec, vadd, vdot, vneg, vscale,
    zeros,
)


# ---------------------------------------------------------------------------
# ordering cones

@dataclass(frozen=True)
class OrderingCone:
    dim: int
    hrep: ConeHRep
    vrep: ConeVRep
    dual_neg_gens: ConeVRep       # generators of the positive dual cone
    strict_polar_sample: Vec      # strictly positive on every nonzero cone point

    def contains(self, y) -> bool:
        return self.hrep.contains(y)


def validate_ordering_cone(dim: int, rows: Optional[Mat] = None,
                           generators: Optional[Mat] = None) -> OrderingCone:
    """Build a validated ordering cone from either representation.

    Raises TrivialConeError / NotPointedError / EmptyInteriorError with an
    exact witness when an axiom fails.
    """
    if rows is None and generators is None:
        raise ValueError("need an H-rep or a V-rep")
    if rows is None:
        vrep0 = ConeVRep(dim, dedup_rows(generators))
        hrep = dd_halfspaces_from_generators(vrep0)
    else:
        hrep = ConeHRep(dim, dedup_rows(rows))
    vrep = dd_generators_from_halfspaces(hrep)

    trivial, _ = cone_is_trivial(hrep)
    if trivial:
        raise TrivialConeError("ordering cone is {0}")
    doubled = ConeHRep(dim, hrep.rows + tuple(vneg(r) for r in hrep.rows))
    line_free, witness = cone_is_trivial(doubled)
    if not line_free:
        raise NotPointedError("ordering cone contains a line", witness)
    # nonempty interior: rows x <= -1 feasible (scaling); Farkas on failure
    res = lp_solve(zeros(dim), [le(r, Fraction(-1)) for r in hrep.rows])
    if res.status == INFEASIBLE:
        raise EmptyInteriorError("ordering cone has empty interior", res.farkas)

    polar = dd_generators_from_halfspaces(ConeHRep(dim, vrep.generators))
    dual_gens = tuple(sorted(vneg(g) for g in polar.generators))
    sample = zeros(dim)
    for g in dual_gens:
        sample = vadd(sample, g)
    for v in vrep.generators:
        assert vdot(sample, v) > 0, "dual sample not strictly positive on the cone"
    return OrderingCone(dim, hrep, vrep, ConeVRep(dim, dual_gens), sample)


# ---------------------------------------------------------------------------
# feasible sets

@dataclass(frozen=True)
class PolyhedralSet:
    """{x : rows x <= rhs}"""

    rows: Mat
    rhs: Vec

    def __post_init__(self):
        if any(is_zero_vec(r) for r in self.rows):
            raise ValueError("polyhedral rows must be nonzero")
        if len(self.rows) != len(self.rhs):
            raise ValueError("row/rhs length mismatch")


@dataclass(frozen=True)
class ConicBlockSet:
    """{x : g(x) in -Q} for a validated cone Q."""

    g: Tuple[PieceFn, ...]
    q_cone: OrderingCone

    def __post_init__(self):
        if len(self.g) != self.q_cone.dim:
            raise ValueError("constraint map dimension != cone dimension")


@dataclass(frozen=True)
class DiscretizedSet:
    """Finite sample of an infinite affine constraint family, g_j(x) <= 0.

    Anything proved from this set is stamped discretization-dependent: the
    sample can miss constraints of the underlying family.
    """

    constraints: Tuple[AffinePiece, ...]
    tau: Fraction = Q0

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("discretized family needs at least one member")
        if self.tau < 0:
            raise ValueError("near-activity tolerance must be >= 0")


FeasibleSet = Union[PolyhedralSet, ConicBlockSet, DiscretizedSet]

DISCRETIZATION_NOTE = "discretization-dependent"


def feasible_contains(omega: FeasibleSet, x: Vec) -> bool:
    if isinstance(omega, PolyhedralSet):
        return all(vdot(r, x) <= b for r, b in zip(omega.rows, omega.rhs))
    if isinstance(omega, ConicBlockSet):
        gx = eval_components(omega.g, x)
        return all(vdot(m, gx) >= 0 for m in omega.q_cone.hrep.rows)
    return all(c.value(x) <= 0 for c in omega.constraints)


def polyhedral_active_rows(omega: PolyhedralSet, x: Vec) -> Tuple[int, ...]:
    return tuple(j for j, (r, b) in enumerate(zip(omega.rows, omega.rhs))
                 if vdot(r, x) == b)


# ---------------------------------------------------------------------------
# conic support machinery

@dataclass(frozen=True)
class ConicSupport:
    """Active scalarizations of a conic block and the cones they induce."""

    active: Tuple[Vec, ...]        # dual-generator representatives with value 0
    upsilon: ConeVRep              # union of scalarized gradient vertices
    dcone: ConeHRep                # directions those vertices do not ascend
    zero_in_subdiff: bool          # support-function gate (hypothesis check)
    exact: bool


def conic_support(block: ConicBlockSet, xbar: Vec) -> ConicSupport:
    n = len(xbar)
    gx = eval_components(block.g, xbar)
    reps = block.q_cone.dual_neg_gens.generators
    vals = [vdot(lam, gx) for lam in reps]
    if any(v > 0 for v in vals):
        raise InfeasiblePointError("base point violates the conic block")
    exact = True
    verts_by_rep = []
    for lam in reps:
        sub = scalarized_subdiff(lam, block.g, xbar)
        exact = exact and sub.exact
        verts_by_rep.append(sub.vertices)
    active = tuple(lam for lam, v in zip(reps, vals) if v == 0)
    up = []
    for lam, verts in zip(reps, verts_by_rep):
        if vdot(lam, gx) == 0:
            up.extend(verts)
    gens = dedup_rows(up)
    upsilon = ConeVRep(n, gens)
    dcone = ConeHRep(n, gens)
    # gate: 0 in the hull of gradient vertices over the maximizing reps
    gmax = max(vals)
    hull = []
    for v, verts in zip(vals, verts_by_rep):
        if v == gmax:
            hull.extend(verts)
    hull = list(dict.fromkeys(hull))
    m = len(hull)
    rels = [eq(tuple(hull[i][j] for i in range(m)), Q0) for j in range(n)]
    rels.append(eq((Q1,) * m, Q1))
    zero_in = feasible_point(rels, m, nonneg=[True] * m) is not None
    return ConicSupport(active, upsilon, dcone, zero_in, exact)


def slater_point(block: ConicBlockSet) -> Optional[Vec]:
    """A point with g(x) strictly interior to -Q; affine maps only."""
    if not all(fn.is_affine() and len(fn.pieces) == 1 for fn in block.g):
        return None
    n = len(block.g[0].pieces[0].a)
    rels = []
    for m in block.q_cone.hrep.rows:
        # m . (-g(x)) <= -1, with g affine: -(sum m_i (a_i x + b_i)) <= -1
        row = zeros(n)
        off = Q0
        for mi, fn in zip(m, block.g):
            p = fn.pieces[0]
            if mi:
                row = vadd(row, vscale(-mi, p.a))
                off += mi * p.b
        rels.append(le(row, off - 1))
    return feasible_point(rels, n)


# ---------------------------------------------------------------------------
# tangent and normal cones

@dataclass(frozen=True)
class TangentCone:
    cone: ConeHRep
    exact: bool = True
    note: Optional[str] = None


@dataclass(frozen=True)
class NormalCone:
    cone: ConeVRep
    exact: bool = True
    note: Optional[str] = None


def _conic_flags(block: ConicBlockSet, sup: ConicSupport):
    if sup.zero_in_subdiff:
        return False, "support-scalarization gate failed: 0 in its subdifferential"
    if not sup.exact:
        return False, "scalarized subdifferential only bounded, not exact"
    conv = kconvexity_check(block.g, block.q_cone.dual_neg_gens.generators,
                            _block_dim(block))
    if conv.status != CONVEX:
        return False, "constraint map cone-convexity not established"
    if slater_point(block) is None:
        return False, "no strictly feasible point established"
    return True, None


def _block_dim(block: ConicBlockSet) -> int:
    p0 = block.g[0].pieces[0]
    return len(p0.a)


def tangent_cone(omega: FeasibleSet, xbar: Vec) -> TangentCone:
    n = len(xbar)
    if not feasible_contains(omega, xbar):
        raise InfeasiblePointError("base point is outside the feasible set")
    if isinstance(omega, PolyhedralSet):
        act = polyhedral_active_rows(omega, xbar)
        rows = dedup_rows([omega.rows[j] for j in act])
        return TangentCone(ConeHRep(n, rows))
    if isinstance(omega, ConicBlockSet):
        sup = conic_support(omega, xbar)
        exact, note = _conic_flags(omega, sup)
        return TangentCone(sup.dcone, exact, note)
    near = [c.a for c in omega.constraints if c.value(xbar) >= -omega.tau]
    return TangentCone(ConeHRep(n, dedup_rows(near)), False, DISCRETIZATION_NOTE)


def normal_cone(omega: FeasibleSet, xbar: Vec) -> NormalCone:
    n = len(xbar)
    if not feasible_contains(omega, xbar):
        raise InfeasiblePointError("base point is outside the feasible set")
    if isinstance(omega, PolyhedralSet):
        act = polyhedral_active_rows(omega, xbar)
        rows = dedup_rows([omega.rows[j] for j in act])
        return NormalCone(ConeVRep(n, rows))
    if isinstance(omega, ConicBlockSet):
        sup = conic_support(omega, xbar)
        exact, note = _conic_flags(omega, sup)
        return NormalCone(sup.upsilon, exact, note)
    near = [c.a for c in omega.constraints if c.value(xbar) >= -omega.tau]
    return NormalCone(ConeVRep(n, dedup_rows(near)), False, DISCRETIZATION_NOTE)


# ---------------------------------------------------------------------------
# non-ascent cones

def g1_cone(components: Sequence[PieceFn], cone: OrderingCone, xbar: Vec) -> ConeHRep:
    """Componentwise non-ascent cone.

    Rows are all products (dual generator) x (one gradient vertex per
    component); bilinearity makes the generator/vertex grid equivalent to
    quantifying over the whole dual cone and whole gradient sets.
    """
    n = len(xbar)
    per_comp = [clarke_subdiff_component(fn, xbar).vertices for fn in components]
    rows = []
    for mu in cone.dual_neg_gens.generators:
        for choice in product(*per_comp):
            xi = zeros(n)
            for m, v in zip(mu, choice):
                if m:
                    xi = vadd(xi, vscale(m, v))
            rows.append(xi)
    return ConeHRep(n, dedup_rows(rows))


@dataclass(frozen=True)
class G2Result:
    """Scalarized non-ascent cone; hrep is exact when exact is True.

    When a scalarized subdifferential was only bounded, inner/outer carry
    cones built from the outer/inner gradient bounds respectively (more
    gradient rows make a smaller cone), and hrep repeats inner.
    """

    hrep: ConeHRep
    exact: bool = True
    inner: Optional[ConeHRep] = None
    outer: Optional[ConeHRep] = None


def g2_cone(components: Sequence[PieceFn], cone: OrderingCone, xbar: Vec) -> G2Result:
    """Scalarized non-ascent cone over the dual generators.

    The sum rule for scalarized gradients makes generator rows imply the
    rows of every nonnegative combination, so generators suffice.
    """
    n = len(xbar)
    rows_outer_bound = []   # from outer gradient bounds -> inner cone
    rows_inner_bound = []   # from inner gradient bounds -> outer cone
    exact = True
    for g in cone.dual_neg_gens.generators:
        sub = scalarized_subdiff(g, components, xbar)
        rows_outer_bound.extend(sub.vertices)
        if sub.exact:
            rows_inner_bound.extend(sub.vertices)
        else:
            exact = False
            rows_inner_bound.extend(sub.inner_vertices or ())
    if exact:
        return G2Result(ConeHRep(n, dedup_rows(rows_outer_bound)))
    inner = ConeHRep(n, dedup_rows(rows_outer_bound))
    outer = ConeHRep(n, dedup_rows(rows_inner_bound))
    return G2Result(inner, False, inner, outer)


def cones_coincide_check(components: Sequence[PieceFn],
                         cone: OrderingCone, xbar: Vec) -> Optional[bool]:
    """True/False when decidable; None when the scalarized cone is inexact."""
    g2 = g2_cone(components, cone, xbar)
    if not g2.exact:
        return None
    g1 = g1_cone(components, cone, xbar)
    same, _ = hrep_equal(g1, g2.hrep)
    return same


def nonascent_containment(components: Sequence[PieceFn], cone: OrderingCone,
                          xbar: Vec) -> bool:
    """Componentwise cone is contained in the scalarized cone (invariant)."""
    g2 = g2_cone(components, cone, xbar)
    if not g2.exact:
        return True  # cannot be checked exactly; not a violation
    g1 = g1_cone(components, cone, xbar)
    ok, _ = hrep_subset(g1, g2.hrep)
    return ok

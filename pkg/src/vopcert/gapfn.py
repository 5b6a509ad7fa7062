"""Set-valued gap function over polytopes and its necessary condition.

For a feasible x and a matrix xi whose columns are picked from the component
generalized gradients, the gap set collects xi^T(x - y) over the points y
that are efficient for the linear vector problem max_y xi^T(x - y).  A
robust candidate must admit some xi placing zero in that set; this module
evaluates the set exactly by face enumeration and searches xi over the
vertex products of the gradient polytopes plus seeded convex combinations.
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .certify import ConditionReport, VOPInstance, efficiency_check, polyhedral_reduction
from .cones import ConeHRep, dd_generators_from_halfspaces
from .errors import CapabilityError, InfeasiblePointError, InstanceFormatError
from .funcs import (
    AffinePiece, CONVEX, PieceFn, SMOOTH, SubdiffPolytope,
    clarke_subdiff_component, full_dim_selections, kconvexity_check,
    polytopes_equal, scalarized_subdiff, subdiff_contains,
    _minkowski_vertices, _regular_convex_route,
)
from .geometry import FeasibleSet, OrderingCone, PolyhedralSet, feasible_contains
from .linprog import UNBOUNDED, eq, feasible_point, le, lp_solve
from .rationals import Vec, unit, vadd, vdot, vscale, vsub, zeros

GAP_NECESSARY = "gap-necessary"

# face enumeration walks row subsets; beyond this many rows the polytope
# is out of desk scale for the gap machinery
MAX_FACE_ROWS = 16


@dataclass(frozen=True)
class GapQuery:
    """A base point with one scalarization column per objective component."""

    x: Vec
    columns: Tuple[Vec, ...]


def gap_query(components: Sequence[PieceFn], x: Vec,
              columns: Sequence[Vec]) -> GapQuery:
    """Validated query: column j must lie in the j-th generalized gradient."""
    if len(columns) != len(components):
        raise InstanceFormatError("one scalarization column per component")
    for j, (fn, col) in enumerate(zip(components, columns)):
        if not subdiff_contains(clarke_subdiff_component(fn, x), col):
            raise InstanceFormatError(
                f"column {j} is outside the component's generalized gradient")
    return GapQuery(tuple(x), tuple(tuple(c) for c in columns))


@dataclass(frozen=True)
class Face:
    """A nonempty face: the rows it makes tight and the vertices it holds."""

    tight: Tuple[int, ...]
    vertices: Tuple[Vec, ...]

    def barycenter(self) -> Vec:
        k = Fraction(len(self.vertices))
        acc = zeros(len(self.vertices[0]))
        for v in self.vertices:
            acc = vadd(acc, v)
        return vscale(1 / k, acc)


EfficientFaceList = Tuple[Face, ...]


def _reduced_polytope(omega: FeasibleSet, n: int):
    reduced = polyhedral_reduction(omega)
    if reduced is None:
        raise CapabilityError("gap machinery needs a polyhedral feasible set")
    rows, rhs = reduced
    rels = [le(row, b) for row, b in zip(rows, rhs)]
    for i in range(n):
        for sense in ("max", "min"):
            res = lp_solve(unit(n, i), rels, sense=sense)
            if res.status == UNBOUNDED:
                raise CapabilityError("gap machinery needs a bounded polytope")
    return rows, rhs


def polytope_vertices(rows, rhs, n: int) -> Tuple[Vec, ...]:
    """Vertex set via double description of the homogenization cone."""
    hom_rows = [tuple(row) + (-b,) for row, b in zip(rows, rhs)]
    hom_rows.append(tuple(zeros(n)) + (Fraction(-1),))
    gens = dd_generators_from_halfspaces(ConeHRep(n + 1, tuple(hom_rows)))
    verts = []
    for g in gens.generators:
        t = g[n]
        if t == 0:
            # boundedness was established by LPs, so no recession directions
            assert all(c == 0 for c in g[:n])
            continue
        verts.append(tuple(c / t for c in g[:n]))
    return tuple(sorted(set(verts)))


def enumerate_faces(rows, rhs, n: int) -> Tuple[Face, ...]:
    """All nonempty faces, the whole polytope included, deduplicated.

    Every face is the convex hull of the polytope vertices lying on it and
    is cut out by some subset of rows turned tight, so walking row subsets
    and grouping by the resulting vertex set reaches each face once.
    """
    if len(rows) > MAX_FACE_ROWS:
        raise CapabilityError("too many rows for face enumeration")
    verts = polytope_vertices(rows, rhs, n)
    if not verts:
        return ()
    tight_sets = [tuple(i for i, (row, b) in enumerate(zip(rows, rhs))
                        if vdot(row, v) == b) for v in verts]
    seen = {}
    for mask in range(1 << len(rows)):
        sel = [i for i in range(len(rows)) if mask >> i & 1]
        group = tuple(k for k, ts in enumerate(tight_sets)
                      if all(i in ts for i in sel))
        if not group or group in seen:
            continue
        common = set(tight_sets[group[0]])
        for k in group[1:]:
            common &= set(tight_sets[k])
        seen[group] = Face(tuple(sorted(common)),
                           tuple(verts[k] for k in group))
    return tuple(seen.values())


def _linear_instance(columns: Sequence[Vec], rows, rhs,
                     cone: OrderingCone) -> VOPInstance:
    # max xi^T(x - y) over y is decided through its minimization mirror
    # y -> xi^T y; the constant xi^T x never moves the efficient set
    comps = tuple(PieceFn(SMOOTH, (AffinePiece(tuple(col), Fraction(0)),))
                  for col in columns)
    return VOPInstance(comps, PolyhedralSet(tuple(rows), tuple(rhs)),
                       cone, len(columns[0]))


def efficient_faces(columns: Sequence[Vec], omega: FeasibleSet,
                    cone: OrderingCone) -> EfficientFaceList:
    """Faces whose relative interior is efficient for the linear problem.

    Efficiency is constant on the relative interior of a face, so the
    vertex barycenter decides for the whole face.
    """
    n = len(columns[0])
    rows, rhs = _reduced_polytope(omega, n)
    inst = _linear_instance(columns, rows, rhs, cone)
    regions = full_dim_selections(inst.objectives, n)
    out = []
    for face in enumerate_faces(rows, rhs, n):
        res = efficiency_check(inst, face.barycenter(), regions)
        if res.efficient:
            out.append(face)
    return tuple(out)


def zero_in_gap(xbar: Vec, columns: Sequence[Vec], omega: FeasibleSet,
                cone: OrderingCone) -> bool:
    """Whether some efficient y for the linear problem has xi^T(xbar-y) = 0."""
    if not feasible_contains(omega, xbar):
        raise InfeasiblePointError("gap base point is infeasible")
    n = len(xbar)
    rows, rhs = _reduced_polytope(omega, n)
    inst = _linear_instance(columns, rows, rhs, cone)
    if efficiency_check(inst, xbar).efficient:
        return True
    targets = tuple(vdot(col, xbar) for col in columns)
    for face in efficient_faces(columns, omega, cone):
        k = len(face.vertices)
        rels = [eq(tuple(vdot(col, v) for v in face.vertices), t)
                for col, t in zip(columns, targets)]
        rels.append(eq(tuple(Fraction(1) for _ in range(k)), 1))
        if feasible_point(rels, k, nonneg=[True] * k) is not None:
            return True
    return False


def vertex_scalarizations(components: Sequence[PieceFn],
                          xbar: Vec) -> Tuple[Tuple[Vec, ...], ...]:
    """Every choice of one gradient-polytope vertex per component."""
    vertex_sets = [clarke_subdiff_component(fn, xbar).vertices
                   for fn in components]
    return tuple(itertools.product(*vertex_sets))


def sampled_scalarizations(components: Sequence[PieceFn], xbar: Vec,
                           seed: int, count: int) -> Tuple[Tuple[Vec, ...], ...]:
    """Seeded random convex combinations inside each gradient polytope."""
    rng = random.Random(seed)
    vertex_sets = [clarke_subdiff_component(fn, xbar).vertices
                   for fn in components]
    out = []
    for _ in range(count):
        cols = []
        for verts in vertex_sets:
            weights = [Fraction(rng.randint(0, 16)) for _ in verts]
            total = sum(weights)
            if total == 0:
                weights[0] = Fraction(1)
                total = Fraction(1)
            col = zeros(len(xbar))
            for w, v in zip(weights, verts):
                col = vadd(col, vscale(w / total, v))
            cols.append(col)
        out.append(tuple(cols))
    return tuple(out)


def scalarization_equality(components: Sequence[PieceFn], xbar: Vec,
                           cone: OrderingCone, seed: int = 0,
                           probes: int = 20):
    """Probe whether scalarized gradients split as weighted Minkowski sums.

    Returns (established, exact): the convex smooth/max shapes with
    nonnegative dual generators carry the equality structurally; anything
    else is probed on the dual generators plus seeded nonnegative
    combinations, which can refute exactly but confirm only sampled.
    """
    gens = cone.dual_neg_gens.generators
    ones = tuple(Fraction(1) for _ in components)
    if all(all(c >= 0 for c in g) for g in gens) and \
            _regular_convex_route(components, ones):
        return True, True
    rng = random.Random(seed)
    mus = list(gens)
    for _ in range(probes):
        weights = [Fraction(rng.randint(0, 8)) for _ in gens]
        if all(w == 0 for w in weights):
            weights[0] = Fraction(1)
        mu = zeros(len(components))
        for w, g in zip(weights, gens):
            mu = vadd(mu, vscale(w, g))
        mus.append(mu)
    n = len(xbar)
    decided_all = True
    for mu in mus:
        scal = scalarized_subdiff(mu, components, xbar)
        if not scal.exact:
            decided_all = False
            continue
        mink = SubdiffPolytope(n, _minkowski_vertices(components, mu, xbar))
        if not polytopes_equal(scal, mink):
            return False, True
    return (True, False) if decided_all else (None, False)


def gap_necessary_check(inst: VOPInstance, xbar: Vec, seed: int = 0,
                        samples: int = 100) -> ConditionReport:
    """Search for a scalarization matrix placing zero in the gap set.

    holds=True whenever some candidate works, regardless of the regularity
    hypotheses (those only control whether failure would mean anything);
    holds=False only for smooth objectives, where the single gradient
    matrix exhausts the search space; otherwise the continuum of candidate
    matrices leaves a failed search inconclusive.
    """
    if not feasible_contains(inst.feasible, xbar):
        raise InfeasiblePointError("candidate point is infeasible")
    _reduced_polytope(inst.feasible, inst.n)  # polytope gate

    smooth_all = all(fn.kind == SMOOTH for fn in inst.objectives)
    if smooth_all:
        regular = True
    else:
        conv = kconvexity_check(inst.objectives,
                                inst.cone.dual_neg_gens.generators,
                                inst.n, seed=seed)
        regular = True if conv.status == CONVEX else None
    eq3, eq3_exact = scalarization_equality(inst.objectives, xbar, inst.cone,
                                            seed=seed)
    hyp_note = (f"regularity={_word(regular)}; "
                f"scalarization-equality={_word(eq3)}"
                + ("" if eq3_exact else " (sampled)"))

    vertex_xis = vertex_scalarizations(inst.objectives, xbar)
    sampled_xis = () if smooth_all else sampled_scalarizations(
        inst.objectives, xbar, seed, samples)
    searched = f"searched {len(vertex_xis)} vertex matrices, " \
               f"{len(sampled_xis)} sampled"
    for xi in vertex_xis + sampled_xis:
        if zero_in_gap(xbar, xi, inst.feasible, inst.cone):
            return ConditionReport(GAP_NECESSARY, True, witness=xi,
                                   note=f"{hyp_note}; {searched}")
    if smooth_all:
        return ConditionReport(GAP_NECESSARY, False,
                               note=f"{hyp_note}; gradient matrix is the "
                                    "only candidate")
    return ConditionReport(GAP_NECESSARY, None, exact=False,
                           note=f"{hyp_note}; {searched}; search is not "
                                "exhaustive over the matrix continuum")


def _word(flag: Optional[bool]) -> str:
    if flag is None:
        return "unknown"
    return "established" if flag else "failed"

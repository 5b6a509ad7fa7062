"""Shared test utilities: builders, random families, and slope oracles.

The slope oracles work by evaluation only (no gradient calls), so they form
an independent check on the generalized-gradient machinery for piecewise
affine functions.
"""

from fractions import Fraction

from vopcert.certify import VOPInstance
from vopcert.errors import ConeValidationError
from vopcert.funcs import MAX, MIN, SMOOTH, AffinePiece, PieceFn, QuadPiece
from vopcert.geometry import PolyhedralSet, validate_ordering_cone
from vopcert.rationals import vadd, vdot, vscale

Q = Fraction


def af(coeffs, b=0) -> AffinePiece:
    return AffinePiece(tuple(Q(c) for c in coeffs), Q(b))


def qp(h, a, b=0) -> QuadPiece:
    return QuadPiece(tuple(tuple(Q(v) for v in row) for row in h),
                     tuple(Q(c) for c in a), Q(b))


def maxfn(*pieces) -> PieceFn:
    return PieceFn(MAX, tuple(pieces))


def minfn(*pieces) -> PieceFn:
    return PieceFn(MIN, tuple(pieces))


def smooth(piece) -> PieceFn:
    return PieceFn(SMOOTH, (piece,))


def qv(*vals):
    return tuple(Q(v) for v in vals)


def support_of(vertices, d) -> Fraction:
    return max(vdot(v, d) for v in vertices)


def stable_quotient(fn, x, d) -> Fraction:
    """(f(x+td)-f(x))/t with t halved until exact; terminates for piecewise
    affine f because the quotient is constant below the first breakpoint."""
    t = Q(1, 2)
    prev = None
    for _ in range(80):
        quot = (fn.value(vadd(x, vscale(t, d))) - fn.value(x)) / t
        if quot == prev:
            return quot
        prev = quot
        t /= 2
    raise AssertionError("difference quotient did not stabilize")


_STAR8 = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def slope_sweep(fn, x, d) -> Fraction:
    """Largest one-sided slope along d over base points near x.

    For piecewise affine f whose regions around x each contain a star
    direction, this equals the support of the generalized gradient at x in
    direction d. Evaluation-only; used as the independent oracle.
    """
    star = ((1,), (-1,)) if len(x) == 1 else _STAR8
    delta = Q(1, 4)
    prev = None
    for _ in range(60):
        pts = [x] + [vadd(x, vscale(delta, qv(*s))) for s in star]
        vals = sorted(stable_quotient(fn, p, d) for p in pts)
        if vals == prev:
            return vals[-1]
        prev = vals
        delta /= 2
    raise AssertionError("slope sweep did not stabilize")


DIRS16 = tuple(qv(a, b) for a, b in (
    (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1),
    (2, 1), (1, 2), (-1, 2), (-2, 1), (-2, -1), (-1, -2), (1, -2), (2, -1)))

DIRS24 = DIRS16 + tuple(qv(a, b) for a, b in (
    (3, 1), (1, 3), (-1, 3), (-3, 1), (-3, -1), (-1, -3), (1, -3), (3, -1)))


def random_cone(rng, p):
    """Pointed full-interior ordering cone from p random integer generators."""
    while True:
        gens = tuple(tuple(Q(rng.randint(-3, 3)) for _ in range(p))
                     for _ in range(p))
        try:
            return validate_ordering_cone(p, generators=gens)
        except ConeValidationError:
            continue


def orthant_containing_cone(rng, p):
    """Random pointed cone that contains the nonnegative orthant.

    Generators form a column-dominant Z-matrix, so the orthant basis vectors
    have nonnegative coordinates in them and every dual generator is
    componentwise nonnegative.
    """
    offs = [[0 if i == j else rng.randint(0, 1) for i in range(p)]
            for j in range(p)]
    gens = []
    for j in range(p):
        col = [Q(-offs[j][i]) for i in range(p)]
        col[j] = Q(sum(offs[j]) + rng.randint(1, 2))
        gens.append(tuple(col))
    return validate_ordering_cone(p, generators=tuple(gens))


def random_box(rng, n):
    """Axis-aligned box -lo <= x <= hi with integer bounds straddling zero.

    Returns the set, its upper corner (a vertex candidate), and the per-axis
    (low, high) bounds as plain ints.
    """
    rows, rhs, bounds = [], [], []
    for i in range(n):
        hi = rng.randint(1, 2)
        lo = rng.randint(1, 2)
        e = [Q(0)] * n
        e[i] = Q(1)
        rows.append(tuple(e))
        rhs.append(Q(hi))
        e = [Q(0)] * n
        e[i] = Q(-1)
        rows.append(tuple(e))
        rhs.append(Q(lo))
        bounds.append((-lo, hi))
    corner = tuple(Q(hi) for _, hi in bounds)
    return PolyhedralSet(tuple(rows), tuple(rhs)), corner, tuple(bounds)


def random_pa_components(rng, n, p, mode="generic"):
    """Piecewise affine components with 1-2 pieces each.

    mode "descent" forces every gradient to ascend along e1 so the candidate
    tends to admit a common descent direction; mode "span" pairs each piece
    with its negation so subdifferentials straddle zero and certifications
    become likely; "generic" draws freely.
    """
    comps = []
    for k in range(p):
        npieces = 2 if mode == "span" else rng.randint(1, 2)
        pieces = []
        for j in range(npieces):
            if mode == "span" and j == 1:
                a = [-c for c in pieces[0].a]
                b = 0
            elif mode == "span":
                a = [rng.randint(-2, 2) for _ in range(n)]
                a[k % n] = rng.choice((-2, -1, 1, 2))  # straddling axis k
                b = 0
            else:
                a = [rng.randint(-2, 2) for _ in range(n)]
                if mode == "descent":
                    a[0] = abs(a[0]) + 1
                b = 0 if j == 0 else rng.randint(-1, 1)
            pieces.append(af(a, b))
        if mode == "span":
            comps.append(maxfn(*pieces))
        else:
            comps.append(maxfn(*pieces) if rng.random() < 0.5
                         else minfn(*pieces))
    return tuple(comps)


def random_instance(rng, mode="generic", nmax=4, pmax=3):
    """Seeded piecewise-affine instance over a box with a feasible candidate.

    Span mode keeps n <= p and an orthant-containing cone so the convexity
    hypotheses can hold and certifications actually occur; the other modes
    draw dimensions and cones freely.
    """
    if mode == "span":
        n = 2
        p = rng.randint(2, min(3, pmax))
        cone = orthant_containing_cone(rng, p)
        xbar = tuple([Q(0)] * n)
    else:
        n = rng.randint(2, nmax)
        p = rng.randint(2, pmax)
        cone = random_cone(rng, p)
    omega, corner, _ = random_box(rng, n)
    if mode != "span":
        xbar = corner if rng.random() < 0.5 else tuple([Q(0)] * n)
    comps = random_pa_components(rng, n, p, mode)
    return VOPInstance(comps, omega, cone, n), xbar

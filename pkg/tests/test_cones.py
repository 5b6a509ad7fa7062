"""Cone triviality contract and double-description round trips."""

import random
from fractions import Fraction as Q

import pytest

from vopcert.cones import (
    ConeHRep, ConeVRep, cone_is_trivial, dd_generators_from_halfspaces,
    dd_halfspaces_from_generators, hrep_equal, hrep_subset,
)
from vopcert.errors import CapabilityError
from vopcert.linprog import le, lp_solve
from vopcert.rationals import unit, vdot


def test_opposing_halfspaces_trivial():
    ok, wit = cone_is_trivial(ConeHRep(1, ((Q(1),), (Q(-1),))))
    assert ok and wit is None


def test_single_halfspace_not_trivial():
    ok, wit = cone_is_trivial(ConeHRep(1, ((Q(1),),)))
    assert not ok
    assert wit is not None and wit[0] < 0


def test_empty_rows_whole_space():
    ok, wit = cone_is_trivial(ConeHRep(3, ()))
    assert not ok
    assert wit == unit(3, 0)


def test_free_coordinate_witness():
    # d1 <= 0 leaves d2 free
    ok, wit = cone_is_trivial(ConeHRep(2, ((Q(1), Q(0)),)))
    assert not ok
    assert vdot((Q(1), Q(0)), wit) <= 0 and wit != (Q(0), Q(0))


def test_dd_orthant_generators():
    h = ConeHRep(3, tuple(unit(3, k, -1) for k in range(3)))
    v = dd_generators_from_halfspaces(h)
    assert sorted(v.generators) == sorted(unit(3, k) for k in range(3))


def test_dd_empty_generators_is_origin():
    h = dd_halfspaces_from_generators(ConeVRep(2, ()))
    ok, _ = cone_is_trivial(h)
    assert ok
    assert sorted(h.rows) == sorted([unit(2, 0), unit(2, 0, -1), unit(2, 1), unit(2, 1, -1)])


def test_dd_halfplane_has_lineality():
    # {d : d1 <= 0} in R2 = halfplane; generators must span the d2 line
    v = dd_generators_from_halfspaces(ConeHRep(2, ((Q(1), Q(0)),)))
    gens = set(v.generators)
    assert (Q(0), Q(1)) in gens and (Q(0), Q(-1)) in gens
    assert all(g[0] <= 0 for g in gens)


def test_dd_dual_cone_of_ordering_cone():
    # K = {m1+m2 >= 0, m1 >= 0} as <=-rows; dual-negative generators are
    # the frozen pair (1,0), (1,1)
    k_rows = ((Q(-1), Q(-1)), (Q(-1), Q(0)))
    gens_k = dd_generators_from_halfspaces(ConeHRep(2, k_rows)).generators
    assert sorted(gens_k) == sorted([(Q(0), Q(1)), (Q(1), Q(-1))])
    # polar from the generators: {y : y.g <= 0 for g in gens}
    neg_dual = dd_generators_from_halfspaces(ConeHRep(2, gens_k))
    expected = sorted([(Q(-1), Q(0)), (Q(-1), Q(-1))])
    assert sorted(neg_dual.generators) == expected


def test_dd_dimension_cap():
    with pytest.raises(CapabilityError):
        dd_generators_from_halfspaces(ConeHRep(7, (tuple(Q(1) for _ in range(7)),)))


def test_dd_deterministic():
    h = ConeHRep(3, ((Q(1), Q(2), Q(-1)), (Q(-2), Q(1), Q(0)), (Q(0), Q(-1), Q(-1))))
    a = dd_generators_from_halfspaces(h)
    b = dd_generators_from_halfspaces(h)
    assert a == b


def _random_hrep(rng, dim, nrows):
    rows = tuple(tuple(Q(rng.randint(-3, 3)) for _ in range(dim)) for _ in range(nrows))
    return ConeHRep(dim, rows)


def test_roundtrip_100_random_cones():
    rng = random.Random(5150)
    for trial in range(100):
        dim = rng.randint(1, 5)
        h = _random_hrep(rng, dim, rng.randint(0, 6))
        v = dd_generators_from_halfspaces(h)
        for g in v.generators:
            assert all(vdot(r, g) <= 0 for r in h.rows), (trial, g)
        h2 = dd_halfspaces_from_generators(v)
        same, wit = hrep_equal(h, h2)
        assert same, (trial, wit)
        # generators -> halfspaces -> generators closes the loop too
        v2 = dd_generators_from_halfspaces(h2)
        for g in v2.generators:
            assert v.contains(g), (trial, g)
        for g in v.generators:
            assert v2.contains(g), (trial, g)


def test_hrep_subset_witness():
    narrow = ConeHRep(2, ((Q(1), Q(0)), (Q(0), Q(1))))
    wide = ConeHRep(2, ((Q(1), Q(1)),))
    ok, _ = hrep_subset(narrow, wide)
    assert ok
    ok, wit = hrep_subset(wide, narrow)
    assert not ok
    assert wide.contains(wit) and not narrow.contains(wit)


def test_lp_optimum_matches_vertex_enumeration():
    # independent route for LP optima: vertices of the homogenized feasible cone
    rng = random.Random(424242)
    for _ in range(30):
        n = rng.randint(1, 3)
        rows = []
        rhs = []
        for _ in range(rng.randint(1, 4)):
            rows.append(tuple(Q(rng.randint(-3, 3)) for _ in range(n)))
            rhs.append(Q(rng.randint(0, 5)))  # rhs >= 0 keeps 0 feasible
        for k in range(n):
            rows.append(unit(n, k)); rhs.append(Q(rng.randint(1, 4)))
            rows.append(unit(n, k, -1)); rhs.append(Q(rng.randint(1, 4)))
        hom_rows = tuple(tuple(r) + (-b,) for r, b in zip(rows, rhs)) + (unit(n + 1, n, -1),)
        gens = dd_generators_from_halfspaces(ConeHRep(n + 1, hom_rows)).generators
        verts = [tuple(g[j] / g[n] for j in range(n)) for g in gens if g[n] > 0]
        assert verts and all(g[n] != 0 for g in gens)  # bounded, nonempty
        c = tuple(Q(rng.randint(-3, 3)) for _ in range(n))
        res = lp_solve(c, [le(r, b) for r, b in zip(rows, rhs)])
        assert res.status == "optimal"
        assert res.value == max(vdot(c, v) for v in verts)

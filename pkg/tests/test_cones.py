import math
from fractions import Fraction

import numpy as np
import pytest

from slelong import (
    AngularCone,
    HullVerdict,
    HypothesisError,
    NonPointedConeError,
    PolyhedralCone,
    Polytope,
    cone_contains,
    halfspace_cone,
    hull_membership,
    hull_polygon_2d,
    hull_region,
    is_gamma_convex,
    lattice_gap,
    quarter_cone,
    theorem_cone,
    triangulate,
)
from conftest import random_lower_sets, random_polygons


# -- the cone --------------------------------------------------------------------

def test_theorem_cone_examples():
    assert theorem_cone(2, 1.0, 0.0).half_angle == pytest.approx(3 * math.pi / 4)
    assert theorem_cone(1, 1.0, 0.0).half_angle == pytest.approx(math.pi)
    c = theorem_cone(2, 0.5, 0.25)
    assert math.cos(c.half_angle) * math.sqrt(2) == pytest.approx(-0.25)
    assert c.half_angle == pytest.approx(1.7485, abs=1e-4)


def test_theorem_cone_hypothesis():
    with pytest.raises(HypothesisError, match="theorem hypothesis violated"):
        theorem_cone(2, 0.5, 0.5)
    with pytest.raises(HypothesisError):
        theorem_cone(2, 0.5, -0.1)


def test_theorem_cone_contains_the_half_space():
    c = theorem_cone(3, 0.3, 0.1)
    assert c.half_angle > math.pi / 2
    rng = np.random.default_rng(0)
    for xi in rng.normal(size=(500, 3)):
        if xi.sum() >= 0:
            assert cone_contains(c, xi)


def test_cone_contains_examples():
    c = theorem_cone(2, 1.0, 0.0)
    assert cone_contains(c, (1, 1))
    assert not cone_contains(c, (-1, -1))
    assert cone_contains(c, (1, -1))
    assert cone_contains(c, (0, 0))


def test_angle_and_inner_product_forms_agree():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4):
        c = AngularCone(n, float(rng.uniform(0.3, 3.0)))
        for xi in rng.normal(size=(300, n)):
            ang = math.acos(np.clip(xi.sum() / (math.sqrt(n) * np.linalg.norm(xi)), -1, 1))
            if abs(ang - c.half_angle) > 1e-9:
                assert cone_contains(c, xi) == (ang <= c.half_angle)


# -- hull membership ---------------------------------------------------------------

def test_vertices_are_inside(quad):
    cone = theorem_cone(2, lattice_gap(quad, 4).value)
    for v in quad.vertices:
        assert hull_membership(quad, cone, v).verdict is HullVerdict.INSIDE


def test_quad_hull_gains_quarter_point(quad):
    cone = theorem_cone(2, lattice_gap(quad, 4).value)
    assert not quad.contains((Fraction(1, 4), 0))
    assert hull_membership(quad, cone, (Fraction(1, 4), 0)).verdict is HullVerdict.INSIDE
    assert hull_membership(quad.scale(4), cone, (1, 0)).verdict is HullVerdict.INSIDE


def test_square_half_space_outside(square):
    mem = hull_membership(square, halfspace_cone(2), (3, 3))
    assert mem.verdict is HullVerdict.OUTSIDE
    assert mem.value > 0


def test_negative_coordinates_are_outside(square):
    assert hull_membership(square, halfspace_cone(2), (-0.1, 0.2)).verdict is HullVerdict.OUTSIDE


def test_polygon_square_quarter_cone(square, simplex2):
    for P in (square, simplex2):
        reg = hull_polygon_2d(P, quarter_cone(2))
        assert reg.polygon.shape == P.V.shape
        assert np.allclose(reg.polygon, P.V, atol=1e-12)


def test_quad_hull_polygon(quad):
    cone = theorem_cone(2, lattice_gap(quad, 4).value)
    reg = hull_polygon_2d(quad, cone)
    assert reg.polygon_contains((0.25, 0.0))
    for v in quad.V:
        assert reg.polygon_contains(v)
    for v in reg.polygon:
        assert reg.membership(v).verdict is not HullVerdict.OUTSIDE
    assert _area(reg.polygon) > _area(quad.V) + 1e-3


def _area(P):
    x, y = P[:, 0], P[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def _random_points(P, rng, k):
    hi = np.asarray(P).max(axis=0)
    return rng.uniform(0, 1, size=(k, 2)) * (hi + 0.5) * 1.2


@pytest.mark.parametrize("idx", range(4))
def test_polygon_and_membership_agree(idx, quad):
    rng = np.random.default_rng(idx)
    P = ([quad] + random_polygons(100 + idx, 3))[idx]
    cone = theorem_cone(2, lattice_gap(P, 1).value)
    reg = hull_polygon_2d(P, cone)
    for x in _random_points(reg.polygon, rng, 10_000):
        mem = reg.membership(x)
        if mem.verdict is HullVerdict.BOUNDARY:
            continue
        assert reg.polygon_contains(x, tol=1e-7) == (mem.verdict is HullVerdict.INSIDE), x


def test_extensivity_and_positivity():
    rng = np.random.default_rng(9)
    for P in random_polygons(9, 15):
        cone = AngularCone(2, float(rng.uniform(math.pi / 4 + 0.05, 2.0)))
        reg = hull_region(P, cone)
        for v in P.vertices:
            assert reg.membership(v).verdict is HullVerdict.INSIDE
        assert (reg.polygon >= -1e-12).all()


def test_antitone_in_the_cone():
    rng = np.random.default_rng(3)
    for P in random_polygons(3, 10):
        small = hull_region(P, AngularCone(2, 1.7))
        big = hull_region(P, AngularCone(2, 2.1))
        for x in _random_points(small.polygon, rng, 300):
            if big.membership(x).verdict is HullVerdict.INSIDE:
                assert small.membership(x).verdict is not HullVerdict.OUTSIDE


def test_half_space_floor(quad):
    for P in [quad] + random_polygons(21, 10):
        for m in (1, 3):
            g = lattice_gap(P, m).value
            mS = P.scale(m)
            gam = hull_region(mS, theorem_cone(2, g))
            half = hull_region(mS, halfspace_cone(2))
            for v in gam.polygon:
                assert half.membership(v).verdict is not HullVerdict.OUTSIDE


def test_three_dimensional_membership():
    cube = Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    cone = theorem_cone(3, 1.0)
    assert hull_membership(cube, cone, (1, 1, 1)).verdict is HullVerdict.INSIDE
    assert hull_membership(cube, cone, (2, 0.5, 0.5)).verdict is HullVerdict.OUTSIDE
    prism = Polytope([(0, 0, 0), ("1/10", 0, 0), ("4/5", "1/5", 0), (0, 1, 0),
                      (0, 0, 1), ("1/10", 0, 1), ("4/5", "1/5", 1), (0, 1, 1)])
    # the planar hull gain survives in the prism for the planar half-angle
    mem = hull_membership(prism, AngularCone(3, math.pi / 2), ("1/4", 0, "1/2"))
    assert mem.verdict is HullVerdict.INSIDE


def test_3d_grid_agrees_with_2d_exact_on_a_product():
    # S x {0} in R^3 versus S in R^2 is not a like-for-like comparison, so compare
    # a 3D lower set (hull = S for the orthant) with exact membership instead
    P = Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    rng = np.random.default_rng(2)
    reg = hull_region(P, quarter_cone(3))
    for x in rng.uniform(0, 1, size=(40, 3)):
        if abs(x.sum() - 1) < 0.05:
            continue
        mem = reg.membership(x)
        assert (mem.verdict is HullVerdict.INSIDE) == (x.sum() <= 1)


# -- triangulation -------------------------------------------------------------------

def test_triangulate_simplicial_cones():
    q = quarter_cone(2)
    pieces = triangulate(q)
    assert len(pieces) == 1
    assert triangulate(quarter_cone(3))[0].rays.shape == (3, 3)


def test_square_based_cone_splits_in_two():
    C = PolyhedralCone.from_rays([[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]])
    assert len(triangulate(C)) == 2


def test_non_pointed_cone_raises():
    C = PolyhedralCone.from_rays([[1, 0], [-1, 0], [0, 1]])
    with pytest.raises(NonPointedConeError, match="diverges structurally"):
        triangulate(C)


def test_lower_dimensional_cone_is_empty():
    C = PolyhedralCone.from_rays([[1, 0, 0], [0, 1, 0]])
    assert triangulate(C) == []


def _solid_angle(R):
    a, b, c = (r / np.linalg.norm(r) for r in R)
    num = abs(np.linalg.det(np.array([a, b, c])))
    den = 1 + a @ b + b @ c + c @ a
    return 2 * math.atan2(num, den)


@pytest.mark.parametrize("seed", range(4))
def test_triangulation_partition_volume(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(4, 7))
    ang = np.sort(rng.uniform(0, 2 * math.pi, k))
    base = np.stack([np.cos(ang), np.sin(ang), np.full(k, 1.5)], axis=1)
    C = PolyhedralCone.from_rays(base)
    pieces = triangulate(C)
    vol = sum(_solid_angle(p.rays) / 3 for p in pieces)   # volume of piece within the unit ball
    X = rng.uniform(-1, 1, size=(400_000, 3))
    X = X[np.linalg.norm(X, axis=1) <= 1]
    inside = np.array([C.contains(x) for x in X[:120_000]])
    mc = inside.mean() * (4 / 3 * math.pi)
    assert vol == pytest.approx(mc, rel=0.02)


# -- Gamma-convexity -------------------------------------------------------------------

def test_lower_sets_are_orthant_convex(square, simplex2):
    for P in [square, simplex2] + random_lower_sets(5, 10):
        assert is_gamma_convex(P, quarter_cone(2))


def test_quad_is_not_convex_for_theorem_cone(quad):
    cone = theorem_cone(2, lattice_gap(quad, 4).value)
    assert not is_gamma_convex(quad, cone)


def test_point_is_convex_for_orthant():
    assert is_gamma_convex(Polytope([(0, 0)]), quarter_cone(2))

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slelong import (
    EnumerationCapError,
    GeometryError,
    Polytope,
    is_lower_set,
    lattice_gap,
    lattice_points,
    log_weight,
    normal_fan,
    project_to_polytope,
    support_value,
)
from conftest import brute_force_gap, polygon_distance, random_lower_sets, random_polygons


# -- construction --------------------------------------------------------

def test_vertex_list_is_reduced(square):
    P = Polytope([(0, 0), (1, 0), (0, 1), (1, 1), ("1/2", "1/2"), (1, "1/2")])
    assert P == square
    assert P.n_vertices == 4


def test_rejects_negative_coordinates_and_missing_origin():
    with pytest.raises(GeometryError):
        Polytope([(0, 0), (-1, 1)])
    with pytest.raises(GeometryError):
        Polytope([(1, 0), (0, 1), (1, 1)])


def test_origin_only_polytope():
    P = Polytope([(0, 0)])
    assert support_value(P, [3.0, -2.0]) == 0
    fan = normal_fan(P)
    assert len(fan) == 1
    assert fan.cells[0][1].contains([-1.0, 5.0])


def test_rational_input_stays_exact(quad):
    assert quad.exact
    assert all(isinstance(c, Fraction) for v in quad.vertices for c in v)


def test_json_round_trip(quad):
    again = Polytope.from_json(quad.to_json())
    assert again == quad and again.exact
    fl = Polytope([(0.0, 0.0), (0.25, 0.0), (0.0, 0.5)])
    assert Polytope.from_json(fl.to_json()) == fl


# -- support function ------------------------------------------------------

def test_support_examples(square, quad):
    assert support_value(square, (1, 1)) == 2
    assert support_value(quad, (0, 0)) == 0
    assert support_value(quad, (1, 0)) == Fraction(4, 5)


def test_support_dimension_mismatch(square):
    with pytest.raises(GeometryError):
        support_value(square, (1, 1, 1))


vec2 = st.tuples(st.floats(-5, 5), st.floats(-5, 5))


@settings(max_examples=200, deadline=None)
@given(xi=vec2, t=st.floats(0, 50))
def test_support_homogeneity(xi, t):
    P = random_polygons(0, 1)[0]
    a = P.support(np.array(xi) * t)
    b = t * P.support(np.array(xi))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(xi=vec2, eta=vec2)
def test_support_subadditivity(xi, eta):
    P = random_polygons(1, 1)[0]
    xi, eta = np.array(xi), np.array(eta)
    assert P.support(xi + eta) <= P.support(xi) + P.support(eta) + 1e-12


# -- log weight -----------------------------------------------------------

def test_log_weight_examples(square):
    assert log_weight(square, 1, 0, (math.e, math.e)) == pytest.approx(4.0)
    assert log_weight(square, 3, 0, (1, 1)) == pytest.approx(0.0)
    seg = Polytope([(0,), (1,)])
    assert log_weight(seg, 2, 1, (0,)) == 0


def test_log_weight_on_coordinate_hyperplane_is_the_upper_limit(quad):
    # H_S(0, w) = lim sup over z1 -> 0 = phi_S(-inf, log|w|) = max over vertices with s1 = 0
    w = 3.0
    val = log_weight(quad, 1, 0, (0, w))
    approx = log_weight(quad, 1, 0, (1e-200, w))
    assert val == pytest.approx(2 * math.log(w))
    assert val == pytest.approx(approx, abs=1e-12)


# -- normal fan -------------------------------------------------------------

def test_square_fan_quadrants(square):
    fan = normal_fan(square)
    cells = dict((tuple(v), c) for v, c in fan)
    assert cells[(0, 0)].contains([-1, -2]) and not cells[(0, 0)].contains([1, -2])
    assert cells[(1, 1)].contains([1, 2]) and not cells[(1, 1)].contains([-1, 2])


def test_quad_fan_has_four_cells(quad):
    fan = normal_fan(quad)
    assert [tuple(v) for v, _ in fan] == [tuple(v) for v in quad.vertices]
    assert len(fan) == 4


def test_segment_fan_is_two_half_planes():
    seg = Polytope([(0, 0), (1, 1)])
    fan = normal_fan(seg)
    assert len(fan) == 2
    (v0, c0), (v1, c1) = fan
    assert c0.contains([-1, -1]) and c0.contains([1, -1]) and not c0.contains([1, 1])
    assert c1.contains([1, 1]) and c1.contains([1, -1])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fan_consistency(seed, quad):
    rng = np.random.default_rng(seed)
    for P in random_polygons(seed, 5) + [quad, Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])]:
        fan = normal_fan(P)
        X = rng.normal(size=(1000, P.dim))
        X /= np.linalg.norm(X, axis=1)[:, None]
        for xi in X:
            i = fan.cell_index(xi)
            s = np.array([float(c) for c in fan.cells[i][0]])
            assert abs(s @ xi - P.support(xi)) <= 1e-9


# -- projection -------------------------------------------------------------

def test_projection_examples(square, quad):
    p, d = project_to_polytope(square, (2, 0.5))
    assert np.allclose(p, (1, 0.5)) and d == pytest.approx(1.0)
    assert project_to_polytope(square, (0.3, 0.7))[1] == 0
    P4 = quad.scale(4)
    _, d = project_to_polytope(P4, (1, 0))
    t = np.linspace(0, 1, 200001)
    V = np.vstack([P4.V, P4.V[:1]])
    bd = np.concatenate([V[i] + t[:, None] * (V[i + 1] - V[i]) for i in range(4)])
    assert d == pytest.approx(np.linalg.norm(bd - [1, 0], axis=1).min(), abs=1e-9)


def test_projection_optimality():
    rng = np.random.default_rng(4)
    polys = random_polygons(4, 10) + [Polytope(np.vstack([[0, 0, 0], rng.uniform(0, 1, (6, 3))]).tolist())]
    for P in polys:
        for _ in range(50):
            x = rng.uniform(-2, 3, size=P.dim)
            p, d = project_to_polytope(P, x)
            lhs = (P.V - p) @ (x - p)
            assert lhs.max() <= 1e-9 * (1 + np.linalg.norm(x))
            assert d == pytest.approx(np.linalg.norm(x - p), abs=1e-12)
            if P.dim == 2:
                assert d == pytest.approx(polygon_distance(P, x), abs=1e-9)


# -- lattice gap -----------------------------------------------------------------

def test_lattice_gap_examples(square, quad):
    g = lattice_gap(square, 1)
    assert g.value == pytest.approx(1.0)
    assert lattice_gap(Polytope([(0,), ("1/2",)]), 1).value == pytest.approx(0.5)
    g4 = lattice_gap(quad, 4)
    assert 0 < g4.value <= 1
    assert g4.value == pytest.approx(brute_force_gap(quad, 4), abs=1e-9)


def test_lattice_gap_witness_is_outside(quad):
    for m in range(1, 6):
        g = lattice_gap(quad, m)
        assert not quad.scale(m).contains(g.witness)
        assert np.linalg.norm(np.subtract(g.witness, g.nearest)) == pytest.approx(g.value)


def test_lattice_gap_matches_brute_force_on_random_polygons():
    for P in random_polygons(8, 10) + random_lower_sets(8, 5):
        for m in (1, 3):
            assert lattice_gap(P, m).value == pytest.approx(brute_force_gap(P, m), abs=1e-9)


def test_lattice_gap_three_dimensional():
    P = Polytope([(0, 0, 0), ("1/2", 0, 0), (0, "2/3", 0), (0, 0, 1), ("1/3", "1/3", "1/3")])
    for m in (1, 2):
        assert lattice_gap(P, m).value == pytest.approx(brute_force_gap(P, m), abs=1e-9)


# -- lower sets and lattice points ------------------------------------------------

def test_lower_set_examples(square, quad, simplex2):
    assert is_lower_set(square)
    assert not is_lower_set(quad)
    assert is_lower_set(simplex2)


def test_staircase_hulls_are_lower():
    for P in random_lower_sets(3, 20):
        assert is_lower_set(P)


def test_lattice_points_examples(square, quad):
    pts = lattice_points(square, 2)
    assert len(pts) == 9 and all(inside for _, inside in pts)
    tags = dict(lattice_points(quad, 4))
    assert tags[(1, 0)] is False
    seg = dict(lattice_points(Polytope([(0,), ("3/2",)]), 1, margin=1))
    assert seg == {(0,): True, (1,): True, (2,): False}


def test_lattice_points_cap(square):
    with pytest.raises(EnumerationCapError):
        lattice_points(square, 1000, max_points=1000)


def test_exact_membership_on_boundary(quad):
    # (mb, m(1-b)) and points on edges between lattice-rational vertices
    P = quad.scale(5)
    assert P.contains((4, 1))
    assert P.contains((Fraction(1, 2), 0))
    assert not P.contains((Fraction(1, 2) + Fraction(1, 10**12), 0))

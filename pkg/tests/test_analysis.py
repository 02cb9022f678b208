import math
from fractions import Fraction

import numpy as np
import pytest

from slelong import Finiteness, HullVerdict, Polytope, WeightSpec, lattice_gap, quadrature_norm
from slelong.analysis import (
    CoefficientWindow,
    DecayPreconditionError,
    Example41Error,
    classify,
    coefficient_bound,
    decay_demo,
    example41,
    example41_polytope,
    formula_cone_terms,
    polynomial_function,
    polynomial_norm,
    prepare,
    taylor_coefficient,
    taylor_coefficients,
    verify_corollaries,
    verify_theorem,
)
from conftest import random_lower_sets


# -- classification ------------------------------------------------------------------------

def test_classify_square(square):
    rows = {r.alpha: r for r in classify(square, 1)}
    assert all(rows[a].in_mS for a in [(0, 0), (1, 0), (0, 1), (1, 1)])
    assert not rows[(2, 0)].in_mS
    assert not any(r.is_finite for r in rows.values())


def test_classify_origin_only():
    rows = classify(Polytope([(0, 0)]), 3)
    inside = [r.alpha for r in rows if r.in_mS]
    assert inside == [(0, 0)]
    assert all(r.finite.status is Finiteness.DIVERGENT for r in rows)


def test_classify_rows_sorted_and_deterministic(quad):
    a = [r.as_row() for r in classify(quad, 4)]
    b = [r.as_row() for r in classify(quad, 4)]
    assert a == b
    alphas = [tuple(int(x) for x in r["alpha"].split()) for r in a]
    assert alphas == sorted(alphas)


def test_classify_parallel_matches_serial(quad):
    serial = [r.as_row() for r in classify(quad, 5, workers=1, margin=6)]
    parallel = [r.as_row() for r in classify(quad, 5, workers=2, margin=6)]
    assert serial == parallel


def test_quad_exponent_outside_but_finite(quad):
    rows = {r.alpha: r for r in classify(quad, 4)}
    r = rows[(1, 0)]
    assert not r.in_mS and r.is_finite and r.hull is HullVerdict.INSIDE


# -- theorem harness ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_theorem_holds_on_quadrilaterals_at_gamma_zero(quad, quad5, m):
    for S in (quad, quad5):
        rep = verify_theorem(S, m, 0)
        assert rep.passed, [r.alpha for r in rep.violations]
        assert not rep.boundary and not rep.marginal


def test_theorem_report_dict(square):
    d = verify_theorem(square, 2).to_dict()
    assert d["result"] == "PASS" and d["schema_version"] == 1
    assert d["d_m"] == pytest.approx(1.0)
    assert d["theta_deg"] == pytest.approx(135.0)


def test_gamma_positive_failure_is_a_genuine_finite_norm(quad):
    """At m = 5, gamma = d_5 / 2 the exponent (3, 0) is outside the hull, yet the
    weighted norm converges: quadrature with a certified tail agrees."""
    d = lattice_gap(quad, 5).value
    rep = verify_theorem(quad, 5, d / 2)
    assert [r.alpha for r in rep.violations] == [(3, 0)]
    q = quadrature_norm(WeightSpec(quad, 5, d / 2), (3, 0), rtol=1e-6)
    assert math.isfinite(q.value) and q.value > 0
    assert q.tail_bound < 1e-10 * q.value


def test_gamma_zero_failure_on_random_heptagon():
    S = Polytope([(0, 0), (Fraction(1, 6), 0), (Fraction(5, 12), Fraction(1, 12)), (1, Fraction(7, 12)),
                  (1, Fraction(2, 3)), (Fraction(1, 2), Fraction(5, 6)), (Fraction(1, 6), Fraction(7, 12))])
    rep = verify_theorem(S, 3, 0)
    assert [r.alpha for r in rep.violations] == [(1, 0)]
    r = rep.violations[0]
    # closed-form criterion at gamma = 0: alpha + 1 = (2, 1) interior to 3S
    assert S.scale(3).contains((2, 1)) and not S.scale(3).contains((1, 0))
    assert 0 < r.hull_value < rep.d_m


# -- corollaries -------------------------------------------------------------------------------

def test_corollary_lower_sets():
    for S in random_lower_sets(11, 8):
        for m in (1, 3):
            rep = verify_corollaries(S, m)
            assert rep.cases["i"] and rep.applies and rep.passed


def test_corollary_notes(quad):
    rep = verify_corollaries(quad, 4)
    assert not rep.cases["i"]
    assert rep.notes["ii"] == "no cone supplied"
    # (1, 0) is in the hull but not in 4S, so case iii fails
    assert not rep.cases["iii"] and not rep.applies


# -- the quadrilateral counterexample ----------------------------------------------------------

@pytest.mark.parametrize("params", [(4, "0.1", "0.8", 1), (5, "0.15", "0.85", 1), (5, "0.15", "0.85", 2)])
def test_example_terms(params):
    ex = example41(*params)
    assert ex.max_rel_diff < 1e-12
    assert ex.quadrature_rel_error < 1e-4
    assert not ex.row.in_mS and ex.row.is_finite


def test_example_golden_values():
    t = formula_cone_terms(4, Fraction(1, 10), Fraction(4, 5), 1)
    assert t[(0, 0)] == pytest.approx(1 / 8)
    assert t[("b", "1-b")] == pytest.approx(0.5921052631578947, rel=1e-14)


@pytest.mark.xfail(strict=True, reason="the printed N_(b,1-b) term drops a sign")
def test_example_formula_as_printed():
    ex = example41(4, Fraction(1, 10), Fraction(4, 5), 1, quadrature=False)
    printed = ex.formula_terms_printed[("b", "1-b")]
    assert printed == pytest.approx(ex.fan_terms[("b", "1-b")], rel=1e-12)


@pytest.mark.parametrize("args, msg", [
    ((3, "0.1", "0.8", 1), "m >= 4"),
    ((4, "0.3", "0.8", 1), "0 < a < 1/m"),
    ((4, "0.1", "0.05", 1), "a < b < 1"),
    ((4, "0.1", "0.5", 1), "m\\(1-b\\) < 1"),
    ((4, "0.1", "0.8", 2), "1 <= k <= m-3"),
])
def test_example_parameter_errors(args, msg):
    with pytest.raises(Example41Error, match=msg):
        example41(*args, quadrature=False)


# -- coefficients ------------------------------------------------------------------------------

def test_taylor_single_coefficient():
    f = polynomial_function({(2, 1): 3 - 1j, (0, 0): 1})
    W = CoefficientWindow((-0.3, -0.2), (0.4, 0.1))
    assert abs(taylor_coefficient(f, (2, 1), W) - (3 - 1j)) < 1e-12
    assert abs(taylor_coefficient(f, (1, 1), W)) < 1e-12


def test_taylor_window_invariance():
    rng = np.random.default_rng(4)
    coeffs = {tuple(int(x) for x in rng.integers(0, 4, 3)): complex(*rng.normal(size=2)) for _ in range(12)}
    f = polynomial_function(coeffs)
    alphas = sorted(coeffs)
    results = []
    for sig, tau in [((-1, -1, -1), (0, 0, 0)), ((-0.2, 0.1, -0.5), (0.3, 0.4, 0.2)), ((0, 0, 0), (1, 0.5, 0.25))]:
        results.append(np.array(taylor_coefficients(f, alphas, CoefficientWindow(sig, tau))))
    for r in results:
        assert np.allclose(r, [coeffs[a] for a in alphas], atol=1e-9, rtol=0)


def test_window_validation():
    with pytest.raises(ValueError):
        CoefficientWindow((0, 0), (0, 1))
    with pytest.raises(ValueError):
        CoefficientWindow((0,), (1, 2))


def test_bound_limits(quad):
    W = WeightSpec(quad, 4, 0)
    win = CoefficientWindow((-0.2, -0.2), (0.3, 0.3))
    assert coefficient_bound(0.0, W, (2, 0), win) == 0.0
    assert coefficient_bound(1.0, W, (2, 0), win, t=1e-4) > 1e3


def test_bound_holds_for_a_polynomial(quad):
    coeffs = {(0, 0): 1.0, (1, 0): -2.0, (1, 1): 0.5j, (2, 0): 1.0}
    W = WeightSpec(quad, 5, 0)
    norm = polynomial_norm(coeffs, W, weight="exact")
    win = CoefficientWindow((0.1, 0.1), (0.4, 0.3))
    for t in (0.1, 1.0, 5.0, 30.0):
        for a, c in coeffs.items():
            assert abs(c) <= coefficient_bound(norm, W, a, win, t)


# -- decay -------------------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [(4, 0), (0, 5), (3, 2)])
def test_decay_quad(quad, alpha):
    c = decay_demo(quad, 4, 0, alpha)
    assert c.below and c.monotone_final_decade


def test_decay_square():
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    c = decay_demo(sq, 2, 0, (3, 0))
    assert c.below and c.monotone_final_decade


def test_decay_precondition(quad):
    with pytest.raises(DecayPreconditionError, match="in hull"):
        decay_demo(quad, 4, 0, (2, 1))


def test_decay_one_dimensional_hand_formula():
    # S = [0, 1], m = 1, alpha = 3: chi - alpha xi = -2 xi on the positive half-line
    c = decay_demo(Polytope([(0,), (1,)]), 1, 0, (3,))
    sig, tau = c.sigma[0], c.tau[0]
    assert 0 < sig < tau
    t = c.ts
    hand = (1 / (1 - np.exp(-2 * (tau - sig) * t)) * np.exp(-t * tau)
            * np.sqrt((np.exp(-4 * t * sig) - np.exp(-4 * t * tau)) / 4))
    assert np.allclose(c.bounds, hand, rtol=1e-10, atol=0)

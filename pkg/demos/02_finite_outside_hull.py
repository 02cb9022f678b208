"""Monomials with finite norm that sit outside the Gamma-hull.

The implication "finite norm => alpha in mS^_Gamma" is checked over a seeded
family of polygons and fails on a handful of them. Two failures are shown
here, each confirmed by an integrator independent of the LP classifier.

1. gamma = 0. The norm of z^alpha is finite exactly when alpha + 1 lies in
   the interior of mS, so an exact closed form and quadrature both apply.
2. gamma = d_m / 2 on the quadrilateral with m = 5. The weight term
   (1 + |z|^2)^(-gamma) is what makes the norm converge. Quadrature with a
   certified tail bound gives a finite value.

In both cases the largest violation <alpha, xi> - m phi_S(xi) over Gamma is
positive but smaller than d_m. A cone argument that bounds this violation
below by d_m therefore cannot hold for these inputs.

    python3 demos/02_finite_outside_hull.py
"""
from fractions import Fraction as F
import math

import numpy as np

from slelong import Polytope, WeightSpec, lattice_gap, monomial_norm_closed_form, quadrature_norm
from slelong.analysis import example41_polytope, verify_theorem


def sweep_violation(S, m, alpha, d, gamma):
    """Dense angular sweep of sup over Gamma of <alpha, xi> - m phi_S(xi)."""
    theta = math.acos(-(d - gamma) / math.sqrt(2))
    t = np.linspace(0, 2 * np.pi, 2_000_001)
    X = np.stack([np.cos(t), np.sin(t)], axis=1)
    keep = X @ np.array([1, 1]) / math.sqrt(2) >= math.cos(theta)
    g = X[keep] @ np.asarray(alpha, float) - m * S.support(X[keep])
    j = int(np.argmax(g))
    return float(g[j]), math.degrees(t[keep][j])


print("case 1: gamma = 0")
S = Polytope([(0, 0), (F(3, 4), F(1, 3)), (F(5, 6), F(3, 4)), (F(7, 12), 1), (0, F(2, 3))])
m, alpha = 3, (1, 0)
rep = verify_theorem(S, m, 0)
print(f"  vertices {[tuple(str(c) for c in v) for v in S.vertices]}, m = {m}")
print(f"  verdict {'PASS' if rep.passed else 'FAIL'}; violations {[r.alpha for r in rep.violations]}")
print(f"  (2, 1) = alpha + 1 in 3S: {S.scale(3).contains((2, 1))}; alpha in 3S: {S.scale(3).contains(alpha)}")
W = WeightSpec(S, m, 0)
print(f"  closed form {monomial_norm_closed_form(W, alpha).value:.10f}")
print(f"  quadrature  {quadrature_norm(W, alpha).value:.10f}")
v, deg = sweep_violation(S, m, alpha, rep.d_m, 0)
print(f"  hull violation {v:.5f} at {deg:.2f} deg; d_m = {rep.d_m:.5f}")

print("\ncase 2: gamma = d_m / 2")
Q = example41_polytope(F(1, 10), F(4, 5))
m, alpha = 5, (3, 0)
d = lattice_gap(Q, m).value
for g in (d / 2, 0.9 * d):
    rep = verify_theorem(Q, m, g)
    q = quadrature_norm(WeightSpec(Q, m, g), alpha, rtol=1e-7)
    v, deg = sweep_violation(Q, m, alpha, d, g)
    print(f"  gamma = {g:.5f}: violations {[r.alpha for r in rep.violations]}; "
          f"norm^2 = {q.value:.4f} (tail bound {q.tail_bound:.1e}, box radius {q.radius:.0f})")
    print(f"    hull violation {v:.5f} at {deg:.2f} deg = d_m - gamma = {d - g:.5f}")
print("  at gamma = 0 the same exponent diverges:",
      monomial_norm_closed_form(WeightSpec(Q, m, 0), alpha).value)

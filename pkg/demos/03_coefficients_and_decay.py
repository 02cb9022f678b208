"""Taylor coefficients from a polyannulus and the coefficient bound.

A coefficient a_alpha is recovered by averaging f(zeta) zeta^-alpha over the
product of annuli e^sigma <= |zeta_j| < e^tau. Bounding that average by the
weighted norm of f gives an upper bound for |a_alpha| that depends on the
window scale t. When alpha lies outside the Gamma-hull a suitable window
makes the bound decay to zero as t grows, which forces a_alpha = 0.

    python3 demos/03_coefficients_and_decay.py
"""
from fractions import Fraction as F

import numpy as np

from slelong import WeightSpec
from slelong.analysis import (
    CoefficientWindow,
    coefficient_bound,
    decay_demo,
    example41_polytope,
    polynomial_function,
    polynomial_norm,
    taylor_coefficients,
)

Q = example41_polytope(F(1, 10), F(4, 5))
W = WeightSpec(Q, 5, 0)      # every exponent below has alpha + 1 inside 5S

coeffs = {(0, 0): 1.0, (1, 0): 2 - 1j, (1, 1): 0.5j, (0, 1): -0.75}
f = polynomial_function(coeffs)
win = CoefficientWindow((0.1, 0.1), (0.5, 0.4))
alphas = sorted(coeffs) + [(2, 0), (3, 0)]
got = taylor_coefficients(f, alphas, win)
print("recovered coefficients")
for a, c in zip(alphas, got):
    print(f"  {a}: {c.real:+.12f} {c.imag:+.12f}i   (true {complex(coeffs.get(a, 0))})")

norm = polynomial_norm(coeffs, W, weight="supnorm")
print(f"\nweighted norm of f: {norm:.6f}")
print("bound / |a| for alpha = (1, 0) as the window scales:")
for t in (0.1, 0.5, 1, 2, 5, 10):
    b = coefficient_bound(norm, W, (1, 0), win, t)
    print(f"  t = {t:>4}: bound {b:.4e}, ratio |a|/bound {abs(coeffs[(1, 0)]) / b:.3f}")

print("\ndecay for exponents outside the Gamma-hull of 4S")
for alpha in [(4, 0), (0, 5), (3, 2)]:
    c = decay_demo(Q, 4, 0, alpha)
    idx = np.searchsorted(c.ts, [1, 10, 100])
    pts = ", ".join(f"t={c.ts[i]:.3g}: {c.bounds[i]:.2e}" for i in idx if i < len(c.ts))
    print(f"  alpha={alpha}: tau={np.round(c.tau, 4)}, eps={c.epsilon:.4f}; {pts}; "
          f"monotone on last decade: {c.monotone_final_decade}")
    for note in c.notes:
        print(f"    note: {note}")

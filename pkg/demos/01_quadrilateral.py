"""The quadrilateral with vertices (0,0), (a,0), (b,1-b), (0,1).

For m >= 4 and small a, the monomial z1^k (1 <= k <= m-3) has a finite
weighted norm although (k, 0) lies outside mS. This script rebuilds the norm
cell by cell from the normal fan, compares each cell against the closed-form
expressions, confirms the total by adaptive quadrature, and writes an SVG of
mS with its Gamma-hull.

    python3 demos/01_quadrilateral.py
"""
from fractions import Fraction
import math
from pathlib import Path

from slelong.analysis import example41, example41_polytope, prepare
from slelong.figures import FigureSpec, figure_svg

m, a, b, k = 4, Fraction(1, 10), Fraction(4, 5), 1
ex = example41(m, a, b, k)

print(f"m={m} a={a} b={b} k={k}")
print(f"lattice gap d_m = {ex.d_m:.6f}; cone half-angle {math.degrees(ex.half_angle):.3f} deg")
print("\nper-cell integrals (fan) vs closed form:")
for key, fan in ex.fan_terms.items():
    name = "N_(" + ",".join(str(c) for c in key) + ")"
    print(f"  {name:<11} {fan:.16f}   formula {ex.formula_terms[key]:.16f}")
print(f"max relative difference {ex.max_rel_diff:.2e}")

# the printed expression for the (b, 1-b) cell is missing a minus sign
print(f"\nN_(b,1-b) with the sign as printed: {ex.formula_terms_printed[('b', '1-b')]:.7f}")

print(f"\nsquared norm 4 pi^2 * sum = {ex.squared_norm:.12f}")
print(f"adaptive quadrature       = {ex.quadrature:.12f} (rel diff {ex.quadrature_rel_error:.1e})")

r = ex.row
print(f"\nalpha = {r.alpha}: in mS? {r.in_mS}; norm {r.finite.status}; Gamma-hull {r.hull}")
print(f"distance from alpha to mS = {r.distance:.4f}")

setup = prepare(example41_polytope(a, b), m)
labels = {(m * a, 0): "(ma, 0)", (m * b, m * (1 - b)): "(mb, m(1-b))", (0, m): "(0, m)"}
svg = figure_svg(setup.mS, setup.region, setup.cone, labels, FigureSpec(), title="mS and its Gamma-hull")
out = Path(__file__).with_name("quadrilateral.svg")
out.write_text(svg)
print(f"\nfigure written to {out}")

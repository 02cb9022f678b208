"""Exponent classification, the theorem/corollary harness, the quadrilateral
counterexample, Cauchy coefficient extraction and the coefficient bound.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math
import os

import numpy as np

from .cones import (
    AngularCone,
    HullRegion,
    HullVerdict,
    cone_contains,
    hull_region,
    is_gamma_convex,
    theorem_cone,
)
from .geometry import (
    GeometryError,
    LatticeGap,
    PolyhedralCone,
    Polytope,
    is_lower_set,
    lattice_gap,
    lattice_points,
    parse_coordinate,
    project_to_polytope,
)
from .integrals import (
    Finiteness,
    FinitenessVerdict,
    WeightSpec,
    finiteness_lp,
    monomial_norm_closed_form,
    quadrature_norm,
)

__all__ = [
    "ExponentClassification",
    "Setup",
    "TheoremReport",
    "CorollaryReport",
    "Example41",
    "Example41Error",
    "CoefficientWindow",
    "DecayCurve",
    "DecayPreconditionError",
    "prepare",
    "classify",
    "verify_theorem",
    "verify_corollaries",
    "example41",
    "example41_polytope",
    "formula_cone_terms",
    "polynomial_function",
    "taylor_coefficient",
    "taylor_coefficients",
    "coefficient_bound",
    "polynomial_norm",
    "select_tau",
    "decay_demo",
    "random_polytope_2d",
    "random_lower_set_2d",
]


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SLELONG_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentClassification:
    alpha: tuple
    in_mS: bool
    hull: HullVerdict
    finite: FinitenessVerdict
    distance: float       # d(alpha, mS)
    hull_value: float     # sup over Gamma of <alpha, xi> - m phi_S(xi)
    null_cone: bool = False   # hull maximiser lies in the normal cone of the origin

    @property
    def in_hull(self) -> bool:
        return self.hull is HullVerdict.INSIDE

    @property
    def is_finite(self) -> bool:
        return self.finite.status is Finiteness.FINITE

    def as_row(self) -> dict:
        return {
            "alpha": " ".join(str(a) for a in self.alpha),
            "in_mS": int(self.in_mS),
            "hull": str(self.hull),
            "finite": str(self.finite.status),
            "dist_mS": f"{self.distance:.12g}",
            "hull_value": f"{self.hull_value:.12g}",
            "max_face": f"{self.finite.max_face_value:.12g}",
        }


@dataclass
class Setup:
    """Everything a classification run shares across exponents."""

    S: Polytope
    m: int
    gamma: object
    gap: LatticeGap
    cone: object
    region: HullRegion
    exact: bool = True

    @property
    def mS(self) -> Polytope:
        return self.region.source


def prepare(S: Polytope, m: int, gamma=0, cone=None, exact=True) -> Setup:
    """Lattice gap, theorem cone (unless given) and the hull region of mS."""
    if not exact and S.exact:
        S = Polytope(S.V.tolist())
    gap = lattice_gap(S, m)
    if cone is None:
        cone = theorem_cone(S.dim, gap.value, float(gamma))
    region = hull_region(S.scale(m), cone)
    return Setup(S, m, gamma, gap, cone, region, exact and S.exact)


def default_margin(setup: Setup) -> float:
    _, hi = setup.mS.bounding_box()
    if setup.region.polygon is not None and len(setup.region.polygon):
        hull_hi = setup.region.polygon.max(axis=0)
        return float(max(hull_hi - hi)) + 2.0
    return setup.gap.value + 2.0


def _classify_one(setup: Setup, alpha, inside):
    S, m = setup.S, setup.m
    W = WeightSpec(S, m, setup.gamma)
    exact_lp = setup.exact and isinstance(setup.gamma, (int, Fraction))
    verdict = finiteness_lp(W, alpha, exact=exact_lp)
    if inside:
        hull, hval, dist = HullVerdict.INSIDE, 0.0, 0.0
        if setup.mS.dim == 2:
            hval = setup.region.sup_violation(alpha)[0]
    else:
        mem = setup.region.membership(alpha)
        hull, hval = mem.verdict, mem.value
        dist = project_to_polytope(setup.mS, alpha)[1]
        return ExponentClassification(tuple(alpha), False, hull, verdict, float(dist), float(hval),
                                      bool(mem.in_null_cone))
    return ExponentClassification(tuple(alpha), bool(inside), hull, verdict, float(dist), float(hval))


def _classify_chunk(args):
    setup, chunk = args
    return [_classify_one(setup, a, ins) for a, ins in chunk]


def classify(S: Polytope, m: int, gamma=0, margin=None, cone=None, exact=True,
             workers=None, setup: Setup | None = None):
    """Classify every lattice exponent near mS.

    For each alpha: exact membership in mS, membership in m S^_Gamma and the
    finiteness verdict for the monomial z^alpha. Rows are sorted
    lexicographically.
    """
    if setup is None:
        setup = prepare(S, m, gamma, cone, exact)
    if margin is None:
        margin = default_margin(setup)
    pts = lattice_points(setup.S, m, margin)
    workers = _default_workers() if workers is None else workers
    if workers <= 1 or len(pts) < 64:
        rows = [_classify_one(setup, a, ins) for a, ins in pts]
    else:
        size = math.ceil(len(pts) / workers)
        chunks = [(setup, pts[i:i + size]) for i in range(0, len(pts), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for part in pool.map(_classify_chunk, chunks) for r in part]
    return sorted(rows, key=lambda r: r.alpha)


# ---------------------------------------------------------------------------
# theorem and corollary harness
# ---------------------------------------------------------------------------

@dataclass
class TheoremReport:
    passed: bool
    m: int
    gamma: float
    d_m: float
    gap_witness: tuple
    half_angle: float
    rows: list
    violations: list
    boundary: list
    marginal: list

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "result": "PASS" if self.passed else "FAIL",
            "m": self.m,
            "gamma": float(self.gamma),
            "d_m": self.d_m,
            "d_m_witness": list(self.gap_witness),
            "theta": self.half_angle,
            "theta_deg": math.degrees(self.half_angle),
            "n_exponents": len(self.rows),
            "n_finite": sum(r.is_finite for r in self.rows),
            "n_finite_outside_mS": sum(r.is_finite and not r.in_mS for r in self.rows),
            "violations": [list(r.alpha) for r in self.violations],
            "boundary": [list(r.alpha) for r in self.boundary],
            "marginal": [list(r.alpha) for r in self.marginal],
            "maximiser_in_origin_cone": [list(r.alpha) for r in self.rows if r.null_cone],
            "witness_rows": [r.as_row() for r in self.rows if r.is_finite and not r.in_mS],
        }


def verify_theorem(S: Polytope, m: int, gamma=0, margin=None, cone=None, exact=True,
                   workers=None, setup=None) -> TheoremReport:
    """PASS iff no exponent has a finite norm while lying outside m S^_Gamma."""
    if setup is None:
        setup = prepare(S, m, gamma, cone, exact)
    rows = classify(setup.S, m, gamma, margin, exact=exact, workers=workers, setup=setup)
    violations = [r for r in rows if r.is_finite and r.hull is HullVerdict.OUTSIDE]
    boundary = [r for r in rows if r.hull is HullVerdict.BOUNDARY]
    marginal = [r for r in rows if r.finite.status is Finiteness.MARGINAL]
    theta = setup.cone.half_angle if isinstance(setup.cone, AngularCone) else float("nan")
    return TheoremReport(not violations, m, gamma, setup.gap.value, setup.gap.witness,
                         theta, rows, violations, boundary, marginal)


@dataclass
class CorollaryReport:
    cases: dict               # "i", "ii", "iii" -> bool
    notes: dict
    applies: bool
    passed: bool
    violations: list
    theorem: TheoremReport

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "cases": dict(self.cases),
            "notes": dict(self.notes),
            "applies": self.applies,
            "result": "PASS" if self.passed else "FAIL",
            "violations": [list(r.alpha) for r in self.violations],
            "theorem": self.theorem.to_dict(),
        }


def _lambda_in_halfspace(cone) -> bool:
    if isinstance(cone, AngularCone):
        return cone.half_angle <= math.pi / 2 + 1e-15
    R = np.asarray(cone.rays, dtype=float)
    return bool((R.sum(axis=1) >= -1e-12).all())


def verify_corollaries(S: Polytope, m: int, gamma=0, lam=None, margin=None, exact=True,
                       workers=None, setup=None) -> CorollaryReport:
    """Find which corollary cases apply and, if any does, check Finite => in mS."""
    if setup is None:
        setup = prepare(S, m, gamma, None, exact)
    theorem = verify_theorem(setup.S, m, gamma, margin, exact=exact, workers=workers, setup=setup)
    notes = {}
    cases = {"i": is_lower_set(setup.S)}
    if lam is None:
        cases["ii"] = False
        notes["ii"] = "no cone supplied"
    elif not _lambda_in_halfspace(lam):
        cases["ii"] = False
        notes["ii"] = "inapplicable: cone leaves {<1, xi> >= 0}"
    else:
        cases["ii"] = bool(is_gamma_convex(setup.S, lam))
    rows = theorem.rows
    if any(r.hull is HullVerdict.BOUNDARY for r in rows):
        cases["iii"] = False
        notes["iii"] = "undecided: boundary hull verdicts present"
    else:
        cases["iii"] = all(r.in_mS == r.in_hull for r in rows)
    applies = any(cases.values())
    violations = [r for r in rows if r.is_finite and not r.in_mS] if applies else []
    return CorollaryReport(cases, notes, applies, theorem.passed and not violations,
                           violations, theorem)


# ---------------------------------------------------------------------------
# the quadrilateral counterexample
# ---------------------------------------------------------------------------

class Example41Error(ValueError):
    pass


def _q(x):
    if isinstance(x, float):
        return Fraction(repr(x))
    return parse_coordinate(x)


def _check_example_params(m, a, b, k):
    if int(m) != m or m < 4:
        raise Example41Error("m >= 4 required")
    if not 0 < a < Fraction(1, m):
        raise Example41Error("0 < a < 1/m required")
    if not a < b < 1:
        raise Example41Error("a < b < 1 required")
    if not m * (1 - b) < 1:
        raise Example41Error("m(1-b) < 1 required")
    if not (b - a) / (1 - b) > m - 2 - a * m:
        raise Example41Error("(b-a)/(1-b) > m-2-am required")
    if k is not None and not (int(k) == k and 1 <= k <= m - 3):
        raise Example41Error("1 <= k <= m-3 required")


def example41_polytope(a, b) -> Polytope:
    a, b = _q(a), _q(b)
    return Polytope([(0, 0), (a, 0), (b, 1 - b), (0, 1)])


def formula_cone_terms(m, a, b, k, as_printed=False) -> dict:
    """The four normal-cone integrals of the counterexample, from the printed formulas.

    The printed closed form for the cone at (b, 1-b) carries a ``+`` between
    its two fractions; integrating the displayed iterated integral gives a
    ``-``. ``as_printed=True`` reproduces the printed sign.
    """
    m, k = int(m), int(k)
    a, b = float(a), float(b)
    q = (b - a) / (1 - b)
    sign = 1.0 if as_printed else -1.0
    return {
        (0, 0): 1 / (4 * (k + 1)),
        ("a", 0): 1 / (4 * (q + m * a - 1 - k)),
        ("b", "1-b"): 1 / (4 * (1 - m * (1 - b))) * (1 / (m - 2 - k) + sign / (q + m * a - 1 - k)),
        (0, 1): 1 / (4 * (k + 1) * (m - 2 - k)),
    }


@dataclass
class Example41:
    m: int
    a: Fraction
    b: Fraction
    k: int
    formula_terms: dict           # corrected sign
    formula_terms_printed: dict   # sign as printed
    fan_terms: dict
    squared_norm: float         # 4 pi^2 * sum of the fan terms
    quadrature: float
    quadrature_error: float
    row: ExponentClassification
    d_m: float
    half_angle: float

    @property
    def max_rel_diff(self) -> float:
        return max(abs(self.fan_terms[key] - self.formula_terms[key]) / abs(self.formula_terms[key])
                   for key in self.formula_terms)

    @property
    def quadrature_rel_error(self) -> float:
        return abs(self.quadrature - self.squared_norm) / self.squared_norm

    def to_dict(self) -> dict:
        def label(key):
            return "N_(" + ",".join(str(c) for c in key) + ")"
        return {
            "schema_version": 1,
            "params": {"m": self.m, "a": str(self.a), "b": str(self.b), "k": self.k},
            "cone_terms": {label(k): v for k, v in self.fan_terms.items()},
            "formula_terms": {label(k): v for k, v in self.formula_terms.items()},
            "formula_terms_as_printed": {label(k): v for k, v in self.formula_terms_printed.items()},
            "squared_norm": self.squared_norm,
            "quadrature": self.quadrature,
            "quadrature_error_estimate": self.quadrature_error,
            "quadrature_rel_diff": self.quadrature_rel_error,
            "max_rel_diff_fan_vs_formula": self.max_rel_diff,
            "alpha": list(self.row.alpha),
            "in_mS": self.row.in_mS,
            "finite": str(self.row.finite.status),
            "in_hull": str(self.row.hull),
            "d_m": self.d_m,
            "theta": self.half_angle,
        }


def example41(m, a, b, k, quadrature=True) -> Example41:
    """Reproduce the quadrilateral counterexample for z_1^k."""
    a, b = _q(a), _q(b)
    _check_example_params(m, a, b, k)
    m, k = int(m), int(k)
    S = example41_polytope(a, b)
    W = WeightSpec(S, m, 0)
    closed = monomial_norm_closed_form(W, (k, 0))
    by_vertex = dict(closed.per_cell)
    keymap = {(0, 0): (0, 0), ("a", 0): (a, 0), ("b", "1-b"): (b, 1 - b), (0, 1): (0, 1)}
    fan_terms = {key: float(by_vertex[tuple(Fraction(c) for c in v)]) for key, v in keymap.items()}
    if quadrature:
        qr = quadrature_norm(W, (k, 0))
        qv, qe = qr.value, qr.error
    else:
        qv, qe = math.nan, math.nan
    setup = prepare(S, m, 0)
    inside = setup.mS.contains((k, 0))
    row = _classify_one(setup, (k, 0), inside)
    return Example41(m, a, b, k, formula_cone_terms(m, a, b, k),
                     formula_cone_terms(m, a, b, k, as_printed=True), fan_terms,
                     closed.value, qv, qe, row, setup.gap.value, setup.cone.half_angle)


# ---------------------------------------------------------------------------
# Cauchy coefficients and the coefficient bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientWindow:
    """Log-radii sigma < tau: polyannulus e^sigma <= |zeta| < e^tau and box [sigma, tau]."""

    sigma: tuple
    tau: tuple

    def __post_init__(self):
        s = tuple(float(x) for x in np.atleast_1d(self.sigma))
        t = tuple(float(x) for x in np.atleast_1d(self.tau))
        if len(s) != len(t) or not s:
            raise ValueError("sigma and tau must have the same positive length")
        if any(a >= b for a, b in zip(s, t)):
            raise ValueError("need sigma_j < tau_j for every j")
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "tau", t)

    @property
    def dim(self) -> int:
        return len(self.sigma)

    @property
    def volume(self) -> float:
        """Lebesgue volume of the polyannulus A_{sigma,tau}."""
        return math.pi ** self.dim * math.prod(math.exp(2 * b) - math.exp(2 * a)
                                               for a, b in zip(self.sigma, self.tau))

    @property
    def box_volume(self) -> float:
        return math.prod(b - a for a, b in zip(self.sigma, self.tau))

    def scaled(self, t: float) -> "CoefficientWindow":
        return CoefficientWindow(tuple(t * a for a in self.sigma), tuple(t * b for b in self.tau))


def polynomial_function(coeffs: dict):
    """Vectorised evaluator for {exponent tuple: coefficient}."""
    items = [(np.asarray(e, dtype=int), complex(c)) for e, c in coeffs.items()]

    def f(Z):
        Z = np.asarray(Z, dtype=complex)
        out = np.zeros(Z.shape[:-1], dtype=complex)
        for e, c in items:
            out += c * np.prod(Z ** e, axis=-1)
        return out

    f.degrees = np.max([e for e, _ in items], axis=0) if items else None
    return f


def _cauchy_grid(window: CoefficientWindow, n_r: int, n_t: int):
    """Per-coordinate nodes and r dr dtheta weights on the polyannulus."""
    gx, gw = np.polynomial.legendre.leggauss(n_r)
    theta = 2 * math.pi * np.arange(n_t) / n_t
    pts1, w1 = [], []
    for s, t in zip(window.sigma, window.tau):
        lo, hi = math.exp(s), math.exp(t)
        r = 0.5 * (hi - lo) * gx + 0.5 * (hi + lo)
        wr = 0.5 * (hi - lo) * gw * r
        pts1.append((r[:, None] * np.exp(1j * theta)[None, :]).ravel())
        w1.append((wr[:, None] * np.full(n_t, 2 * math.pi / n_t)[None, :]).ravel())
    return pts1, w1


def taylor_coefficients(f, alphas, window: CoefficientWindow, nodes=None) -> list:
    """a_alpha for several alpha as averages of f(zeta)/zeta^alpha over the polyannulus.

    Angles use the trapezoid rule, radii Gauss-Legendre in r dr. For a
    polynomial the angular sum kills every other monomial exactly once the
    angle count exceeds the largest exponent difference, and the surviving
    radial integrand is r, so two radial nodes already suffice. ``f`` is a
    callable on arrays of shape (..., n) or an exponent->coefficient dict;
    ``nodes`` is ``(n_radius, n_angle)``. f is evaluated once.
    """
    if isinstance(f, dict):
        f = polynomial_function(f)
    alphas = [np.asarray(a, dtype=int) for a in alphas]
    n = window.dim
    if any(a.shape != (n,) for a in alphas):
        raise GeometryError("dimension mismatch")
    if nodes is None:
        deg = getattr(f, "degrees", None)
        top = int(max(np.max(deg) if deg is not None else 15,
                      max((int(a.max()) for a in alphas), default=0)))
        nodes = (4, max(8, 2 * top + 1))
    pts1, w1 = _cauchy_grid(window, *nodes)
    grids = np.meshgrid(*pts1, indexing="ij")
    Z = np.stack([g.ravel() for g in grids], axis=-1)
    vals = np.asarray(f(Z), dtype=complex).reshape(grids[0].shape)
    vol = window.volume
    out = []
    for a in alphas:
        acc = vals
        # contract one axis at a time: sum_k w_k zeta_k^{-a_j} acc[..., k, ...]
        for j in range(n):
            vec = w1[j] * pts1[j] ** (-int(a[j]))
            acc = np.tensordot(vec, acc, axes=([0], [0]))
        out.append(complex(acc) / vol)
    return out


def taylor_coefficient(f, alpha, window: CoefficientWindow, nodes=None) -> complex:
    """a_alpha = v(A)^{-1} * integral over A of f(zeta) / zeta^alpha."""
    return taylor_coefficients(f, [alpha], window, nodes)[0]


def _box_log_integral(logf, lo, hi, panels=24, order=8):
    """log of the integral of exp(logf) over the box [lo, hi] (composite Gauss-Legendre)."""
    n = len(lo)
    gx, gw = np.polynomial.legendre.leggauss(order)
    axes, weights = [], []
    for a, b in zip(lo, hi):
        edges = np.linspace(a, b, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        axes.append((mid[:, None] + half[:, None] * gx[None, :]).ravel())
        weights.append((half[:, None] * gw[None, :]).ravel())
    grids = np.meshgrid(*axes, indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=-1)
    logw = np.log(weights[0])
    for j in range(1, n):
        logw = np.add.outer(logw, np.log(weights[j]))
    L = logf(X) + logw.ravel()
    top = float(L.max())
    return top + math.log(float(np.exp(L - top).sum()))


def log_coefficient_bound(norm, W: WeightSpec, alpha, window: CoefficientWindow, t=1.0,
                          panels=None) -> float:
    if norm < 0:
        raise ValueError("norm must be >= 0")
    if norm == 0:
        return -math.inf
    if t <= 0:
        raise ValueError("t must be > 0")
    alpha = np.asarray(alpha, dtype=float)
    n = W.dim
    tau = np.asarray(window.tau)
    sigma = np.asarray(window.sigma)
    with np.errstate(divide="ignore"):
        pref = -sum(math.log(-math.expm1(-2 * (b - a) * t)) for a, b in zip(sigma, tau))
    if panels is None:
        panels = {1: 400, 2: 60}.get(n, 14)
    logI = _box_log_integral(lambda X: 2 * (W.chi(X) - X @ alpha), t * sigma, t * tau, panels=panels)
    return math.log(norm) + pref - t * float(tau.sum()) + 0.5 * logI


def coefficient_bound(norm, W: WeightSpec, alpha, window: CoefficientWindow, t=1.0) -> float:
    """Upper bound for |a_alpha| from ||f||_psi over the window scaled by t.

    norm * prod_j (1 - e^{-2 (tau_j - sigma_j) t})^{-1} * e^{-t <1, tau>}
         * (integral over t K of e^{2 (chi(xi) - <alpha, xi>)})^{1/2},
    with chi(xi) = gamma ||xi||_inf + m phi_S(xi).
    """
    val = log_coefficient_bound(norm, W, alpha, window, t)
    return 0.0 if val == -math.inf else math.exp(val) if val < 700 else math.inf


def polynomial_norm(coeffs: dict, W: WeightSpec, weight="supnorm", rtol=1e-8) -> float:
    """||f||_psi for a polynomial; monomials are orthogonal for rotation-invariant psi."""
    total = 0.0
    for e, c in coeffs.items():
        if abs(c) == 0:
            continue
        q = quadrature_norm(W, e, rtol=rtol, weight=weight)
        total += abs(complex(c)) ** 2 * q.value
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# decay demonstration
# ---------------------------------------------------------------------------

class DecayPreconditionError(ValueError):
    pass


@dataclass
class DecayCurve:
    alpha: tuple
    tau: tuple
    sigma: tuple
    epsilon: float
    ts: np.ndarray
    bounds: np.ndarray
    notes: list = field(default_factory=list)

    @property
    def final(self) -> float:
        return float(self.bounds[-1])

    @property
    def below(self) -> bool:
        return self.final < 1e-6

    @property
    def monotone_final_decade(self) -> bool:
        mask = self.ts >= self.ts[-1] / 10
        b = self.bounds[mask]
        return bool((np.diff(b) < 0).all())

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "alpha": list(self.alpha),
            "tau": list(self.tau),
            "sigma": list(self.sigma),
            "epsilon": self.epsilon,
            "t": [float(x) for x in self.ts],
            "bound": [float(x) for x in self.bounds],
            "below_1e-6": self.below,
            "monotone_final_decade": self.monotone_final_decade,
            "notes": list(self.notes),
        }


def _nudge_toward_axis(tau, angle=1e-3):
    n = len(tau)
    axis = np.ones(n) / math.sqrt(n)
    c = float(np.clip(tau @ axis, -1, 1))
    beta = math.acos(c)
    perp = tau - c * axis
    pn = np.linalg.norm(perp)
    if pn < 1e-15 or beta <= angle:
        return axis if beta <= angle else tau
    perp /= pn
    beta -= angle
    return math.cos(beta) * axis + math.sin(beta) * perp


def _cone_directions(cone, n, count=4001):
    if n == 1:
        return np.array([[d] for d in (1.0, -1.0) if cone_contains(cone, [d])])
    if n == 2:
        t = np.linspace(0, 2 * math.pi, count, endpoint=False)
        X = np.stack([np.cos(t), np.sin(t)], axis=1)
    else:
        from .cones import _sphere_grid
        X = _sphere_grid(n, 61)
    keep = np.array([cone_contains(cone, x) for x in X])
    return X[keep]


def select_tau(setup: Setup, alpha):
    """Unit tau in Gamma with <alpha, tau> > m phi_S(tau), nudged into the interior."""
    S, m = setup.S, setup.m
    alpha = np.asarray(alpha, dtype=float)
    notes = []
    n = S.dim
    if n == 2:
        _, d = setup.region.sup_violation(alpha)
        tau = np.array(d)
    else:
        X = _cone_directions(setup.cone, n)
        g = X @ alpha - m * S.support(X)
        tau = X[int(np.argmax(g))]
    if n > 1:
        tau = _nudge_toward_axis(tau)
    return tau, notes


def _decay_margin(W, alpha, tau):
    """D(tau) = <alpha + 1, tau> - m phi_S(tau) - gamma ||tau||_inf."""
    return float((alpha + 1) @ tau - W.m * W.S.support(tau) - float(W.gamma) * np.abs(tau).max())


def decay_demo(S: Polytope, m: int, gamma, alpha, t_max=1e5, growth=10 ** 0.05,
               norm=1.0, setup=None) -> DecayCurve:
    """Coefficient bound along t K_{sigma,tau} for an exponent outside m S^_Gamma."""
    if setup is None:
        setup = prepare(S, m, gamma)
    S = setup.S
    alpha = np.asarray(alpha, dtype=float)
    mem = setup.region.membership(tuple(int(a) for a in alpha))
    if mem.verdict is not HullVerdict.OUTSIDE:
        raise DecayPreconditionError(f"alpha={tuple(int(a) for a in alpha)} is in hull ({mem.verdict})")
    W = WeightSpec(S, m, gamma)
    tau, notes = select_tau(setup, alpha)
    D = _decay_margin(W, alpha, tau)
    if D <= 0:
        X = _cone_directions(setup.cone, S.dim)
        vals = np.array([_decay_margin(W, alpha, x) for x in X])
        j = int(np.argmax(vals))
        notes.append("violation-maximising tau gave no decay margin; maximised the margin instead")
        tau, D = X[j], float(vals[j])
        if D <= 0:
            raise DecayPreconditionError("no valid tau found")
    lhs_axis = -float(tau.sum())
    if not lhs_axis < setup.gap.value - float(gamma):
        notes.append("tau is not interior in the sense -<1,tau> < d_m - gamma")
    notes.append("interiority uses gamma itself, not gamma_0 (the infimum of admissible gammas)")
    eps = D / 2
    n = S.dim

    def worst_corner(sig):
        worst = -math.inf
        for corner in itertools.product(*zip(sig, tau)):
            xi = np.array(corner)
            v = (lhs_axis + m * S.support(xi) - alpha @ xi
                 + float(gamma) * np.abs(xi).max() + eps * np.linalg.norm(xi))
            worst = max(worst, float(v))
        return worst

    delta = 0.5
    while True:
        sigma = tau - delta
        if worst_corner(sigma) < 0 and np.linalg.norm(sigma) > 0:
            break
        delta /= 2
        if delta < 1e-8:
            raise DecayPreconditionError("could not find sigma")
    window = CoefficientWindow(tuple(sigma), tuple(tau))
    ts, bounds = [], []
    t = 0.1
    hit = None
    while t <= t_max:
        ts.append(t)
        bounds.append(math.exp(log_coefficient_bound(norm, W, alpha, window, t)))
        if hit is None and bounds[-1] < 1e-6:
            hit = t
        if hit is not None and t >= 10 * hit:
            break
        t *= growth
    return DecayCurve(tuple(int(a) for a in alpha), tuple(map(float, tau)), tuple(map(float, sigma)),
                      eps, np.array(ts), np.array(bounds), notes)


# ---------------------------------------------------------------------------
# random suites
# ---------------------------------------------------------------------------

def random_polytope_2d(rng, n_min=4, n_max=8, denominator=12, max_tries=1000) -> Polytope:
    """Random rational polygon in [0,1]^2 with the origin as a vertex."""
    for _ in range(max_tries):
        k = int(rng.integers(n_min + 2, n_max + 6))
        pts = [(0, 0)] + [(Fraction(int(rng.integers(0, denominator + 1)), denominator),
                           Fraction(int(rng.integers(0, denominator + 1)), denominator))
                          for _ in range(k)]
        P = Polytope(pts)
        if n_min <= P.n_vertices <= n_max:
            return P
    raise RuntimeError("could not draw a polygon with the requested vertex count")


def random_lower_set_2d(rng, steps=(2, 5), denominator=12) -> Polytope:
    """Convex hull of a random staircase (a union of boxes [0, p])."""
    k = int(rng.integers(steps[0], steps[1] + 1))
    xs = sorted(rng.choice(np.arange(1, denominator + 1), size=k, replace=False))
    ys = sorted(rng.choice(np.arange(1, denominator + 1), size=k, replace=False), reverse=True)
    pts = [(0, 0)]
    for x, y in zip(xs, ys):
        x, y = Fraction(int(x), denominator), Fraction(int(y), denominator)
        pts += [(x, y), (x, 0), (0, y)]
    return Polytope(pts)

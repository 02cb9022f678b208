"""Weighted L^2 norms of monomials.

In logarithmic coordinates xi_j = log|z_j| the squared norm of z^alpha with
weight psi = 2m H_S + gamma log(1 + |z|^2) is

    (2 pi)^n  \\int_{R^n} exp(2<alpha + 1, xi> - 2m phi_S(xi) - gamma log(1 + sum e^{2 xi_j})) dxi.

Replacing the log term by 2 gamma max(0, xi_1, ..., xi_n) changes the
integrand by a factor in [(n+1)^-gamma, 1], so finiteness is decided by the
concave, positively homogeneous exponent

    E_alpha(xi) = 2<alpha + 1, xi> - 2m phi_S(xi) - 2 gamma max(0, xi_j).
"""
from __future__ import annotations

from dataclasses import dataclass, field
import enum
from fractions import Fraction
import math

import numpy as np
from scipy import integrate, special

from .cones import NonPointedConeError, triangulate
from .geometry import GeometryError, Polytope, normal_fan
from .lp import lp_solve

__all__ = [
    "WeightSpec",
    "Finiteness",
    "FinitenessVerdict",
    "ClosedFormNorm",
    "QuadratureResult",
    "DivergentIntegralError",
    "simplicial_exp_integral",
    "monomial_norm_closed_form",
    "finiteness_lp",
    "quadrature_norm",
    "lp_solve",
]


class DivergentIntegralError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """Weight psi = 2m H_S + gamma log(1 + |z|^2)."""

    S: Polytope
    m: int
    gamma: float = 0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    @property
    def dim(self) -> int:
        return self.S.dim

    def exponent(self, alpha, xi):
        """E_alpha(xi) (max-term form), vectorised over leading axes of xi."""
        xi = np.asarray(xi, dtype=float)
        a1 = np.asarray(alpha, dtype=float) + 1.0
        val = 2 * xi @ a1 - 2 * self.m * self.S.support(xi)
        if self.gamma:
            val = val - 2 * float(self.gamma) * np.maximum(0.0, xi.max(axis=-1))
        return val

    def log_integrand(self, alpha, xi, weight="exact"):
        """Log of the integrand in logarithmic coordinates (without (2 pi)^n).

        ``weight`` picks the gamma term: ``"exact"`` uses gamma log(1 + |z|^2),
        ``"maxterm"`` uses 2 gamma max(0, xi_j) and ``"supnorm"`` uses the
        comparison weight 2 gamma ||xi||_inf.
        """
        xi = np.asarray(xi, dtype=float)
        a1 = np.asarray(alpha, dtype=float) + 1.0
        val = 2 * xi @ a1 - 2 * self.m * self.S.support(xi)
        g = float(self.gamma)
        if g:
            if weight == "exact":
                zeros = np.zeros(xi.shape[:-1] + (1,))
                val = val - g * np.logaddexp.reduce(np.concatenate([zeros, 2 * xi], axis=-1), axis=-1)
            elif weight == "maxterm":
                val = val - 2 * g * np.maximum(0.0, xi.max(axis=-1))
            elif weight == "supnorm":
                val = val - 2 * g * np.abs(xi).max(axis=-1)
            else:
                raise ValueError(f"unknown weight {weight!r}")
        return val

    def chi(self, xi):
        """Comparison weight chi(xi) = gamma ||xi||_inf + m phi_S(xi)."""
        xi = np.asarray(xi, dtype=float)
        return float(self.gamma) * np.abs(xi).max(axis=-1) + self.m * self.S.support(xi)

    def epsilon_margin(self, alpha) -> float:
        return 1e-9 * (1 + float(np.linalg.norm(alpha))
                       + self.m * float(np.linalg.norm(self.S.V, axis=1).max()))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def simplicial_exp_integral(rays, c) -> float:
    """Integral of exp(<c, xi>) over the cone spanned by linearly independent rays.

    Equals |det(v_1..v_n)| / prod(-<c, v_i>) when every <c, v_i> < 0, else +inf.
    """
    R = np.atleast_2d(np.asarray(getattr(rays, "rays", rays), dtype=float))
    c = np.asarray(c, dtype=float)
    if R.shape[0] != R.shape[1] or R.shape[1] != c.shape[0]:
        raise GeometryError("need n rays in R^n")
    det = abs(float(np.linalg.det(R)))
    if det <= 1e-14 * float(np.prod(np.linalg.norm(R, axis=1))):
        raise GeometryError("singular ray matrix")
    dots = R @ c
    if (dots >= 0).any():
        return math.inf
    return det / float(np.prod(-dots))


@dataclass(frozen=True)
class ClosedFormNorm:
    """Squared norm of z^alpha for gamma = 0.

    ``per_cell`` lists (vertex, integral over its normal cone in logarithmic
    coordinates, without the (2 pi)^n factor); ``value`` includes it.
    """

    value: float
    per_cell: tuple
    divergent_vertex: tuple | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def monomial_norm_closed_form(W: WeightSpec, alpha) -> ClosedFormNorm:
    """Sum of simplicial closed forms over the triangulated normal fan."""
    if W.gamma != 0:
        raise ValueError("closed form requires gamma = 0")
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (W.dim,):
        raise GeometryError("dimension mismatch")
    n = W.dim
    per_cell = []
    for vertex, cone in normal_fan(W.S):
        s = np.array([float(c) for c in vertex])
        coef = 2 * (alpha + 1 - W.m * s)
        try:
            pieces = triangulate(cone)
        except NonPointedConeError:
            # e^{linear} over a cone containing a line never integrates
            return ClosedFormNorm(math.inf, tuple(per_cell) + ((vertex, math.inf),), vertex)
        total = 0.0
        for piece in pieces:
            total += simplicial_exp_integral(piece.rays, coef)
            if math.isinf(total):
                break
        per_cell.append((vertex, total))
        if math.isinf(total):
            return ClosedFormNorm(math.inf, tuple(per_cell), vertex)
    value = (2 * math.pi) ** n * sum(v for _, v in per_cell)
    return ClosedFormNorm(value, tuple(per_cell))


# ---------------------------------------------------------------------------
# LP finiteness criterion
# ---------------------------------------------------------------------------

class Finiteness(enum.Enum):
    FINITE = "Finite"
    DIVERGENT = "Divergent"
    MARGINAL = "Marginal"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FinitenessVerdict:
    status: Finiteness
    face_maxima: tuple           # (face label, max of E_alpha on that face)
    witness: tuple | None = None  # direction with E_alpha >= 0 (Divergent)
    tolerance: float = 0.0
    exact: bool = False

    @property
    def max_face_value(self) -> float:
        return max(float(v) for _, v in self.face_maxima)

    @property
    def finite(self) -> bool:
        return self.status is Finiteness.FINITE


def _face_lp(W, alpha, face_axis, face_sign, exact):
    """max E_alpha over {||xi||_inf <= 1, xi_j = face_sign}."""
    n = W.dim
    conv = Fraction if exact else float
    verts = W.S.vertices if exact else [tuple(float(c) for c in v) for v in W.S.vertices]
    gamma = conv(W.gamma)
    use_w = gamma != 0
    # variables: xi_1..xi_n, u, [w]
    nv = n + 1 + (1 if use_w else 0)
    c = [conv(2) * (conv(a) + 1) for a in alpha] + [conv(-2) * W.m]
    if use_w:
        c.append(conv(-2) * gamma)
    A, b = [], []
    for s in verts:
        if all(x == 0 for x in s):
            continue
        A.append([conv(x) for x in s] + [conv(-1)] + ([conv(0)] if use_w else []))
        b.append(conv(0))
    if use_w:
        for j in range(n):
            row = [conv(0)] * nv
            row[j] = conv(1)
            row[-1] = conv(-1)
            A.append(row)
            b.append(conv(0))
    bounds = [(conv(-1), conv(1))] * n + [(conv(0), None)] + ([(conv(0), None)] if use_w else [])
    bounds[face_axis] = (conv(face_sign), conv(face_sign))
    res = lp_solve(c, A_ub=A or None, b_ub=b or None, bounds=bounds, exact=exact)
    return res.optimum, res.argmax[:n]


def finiteness_lp(W: WeightSpec, alpha, exact=None, early_exit=True) -> FinitenessVerdict:
    """Decide finiteness of the weighted norm of z^alpha.

    E_alpha is maximised on each face of the box ||xi||_inf <= 1 by linear
    programming; by homogeneity negativity there is negativity on R^n \\ {0}.
    Exact mode (rational S and gamma) resolves near-zero optima in rational
    arithmetic and never returns Marginal. With ``early_exit`` off every face
    is solved even after a divergence witness turns up.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != W.dim:
        raise GeometryError("dimension mismatch")
    rational_gamma = isinstance(W.gamma, (int, Fraction))
    if exact is None:
        exact = W.S.exact and rational_gamma
    elif exact and not (W.S.exact and rational_gamma):
        raise ValueError("exact mode needs rational S and gamma")
    eps = W.epsilon_margin(alpha)
    faces = []
    witness = None
    for j in range(W.dim):
        for sign in (1, -1):
            label = f"{'+' if sign > 0 else '-'}xi{j + 1}"
            try:
                opt, arg = _face_lp(W, alpha, j, sign, exact=False)
            except Exception as exc:
                raise RuntimeError(f"LP failure on face {label}: {exc}") from exc
            if exact and abs(opt) <= 1e3 * eps:
                opt, arg = _face_lp(W, alpha, j, sign, exact=True)
            faces.append((label, opt))
            positive = opt >= 0 if exact and isinstance(opt, Fraction) else opt >= eps
            if positive and witness is None:
                witness = tuple(float(a) for a in arg)
                if early_exit:
                    break
        if witness is not None and early_exit:
            break
    if witness is not None:
        faces = tuple((lab, v if isinstance(v, Fraction) else float(v)) for lab, v in faces)
        return FinitenessVerdict(Finiteness.DIVERGENT, faces, witness, 0.0 if exact else eps, exact)
    values = [v for _, v in faces]
    # exact: every optimum is negative here, else the loop would have returned
    if exact or all(v <= -eps for v in values):
        status = Finiteness.FINITE
    else:
        status = Finiteness.MARGINAL
    faces = tuple((lab, v if isinstance(v, Fraction) else float(v)) for lab, v in faces)
    return FinitenessVerdict(status, faces, witness, 0.0 if exact else eps, exact)


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    radius: float
    tail_bound: float


def _kinks(W, alpha, fixed, weight):
    """Breakpoints of the integrand along the last free coordinate."""
    V = W.S.V
    k = len(V)
    j = len(fixed)
    n = W.dim
    pts = [0.0]
    # vertex pairs: <s - t, xi> = 0 with xi_{j+1..n-1} unknown is only usable
    # on the innermost line
    if j == n - 1:
        f = np.asarray(fixed, dtype=float)
        for a in range(k):
            for b in range(a + 1, k):
                d = V[a] - V[b]
                if abs(d[j]) > 1e-15:
                    pts.append(-float(d[:j] @ f) / d[j])
        if W.gamma and weight in ("maxterm", "supnorm"):
            pts.extend([float(v) for v in f] + [-float(v) for v in f])
    return pts


def _scalar_integrand(W, alpha, weight):
    """Plain-Python integrand; quad calls it one point at a time."""
    verts = [tuple(float(c) for c in v) for v in W.S.vertices]
    a1 = [float(a) + 1.0 for a in alpha]
    m2 = 2.0 * W.m
    g = float(W.gamma)
    exp = math.exp

    def f(*xs):
        lin = 2.0 * sum(a * x for a, x in zip(a1, xs))
        phi = max(sum(s * x for s, x in zip(v, xs)) for v in verts)
        val = lin - m2 * phi
        if g:
            if weight == "exact":
                top = max(0.0, max(xs))
                rest = exp(-2 * top) + sum(exp(2 * x - 2 * top) for x in xs)
                val -= g * (2 * top + math.log(rest))
            elif weight == "maxterm":
                val -= 2 * g * max(0.0, max(xs))
            elif weight == "supnorm":
                val -= 2 * g * max(abs(x) for x in xs)
            else:
                raise ValueError(f"unknown weight {weight!r}")
        return exp(val)

    return f


def quadrature_norm(W: WeightSpec, alpha, rtol=1e-9, weight="exact", limit=200) -> QuadratureResult:
    """Squared norm of z^alpha by nested adaptive quadrature on a truncated box.

    The box half-width R is chosen so that the tail beyond ||xi||_inf = R,
    bounded through the face maxima of E_alpha, is below rtol times a lower
    bound for the integral. Raises :class:`DivergentIntegralError` when no
    tail bound exists.
    """
    alpha = np.asarray(alpha, dtype=float)
    n = W.dim
    verdict = finiteness_lp(W, tuple(int(a) for a in alpha), exact=False)
    face_max = verdict.max_face_value
    if not face_max < 0:
        raise DivergentIntegralError("divergent or marginal: no tail bound")
    mu = -face_max
    # crude lower bound from the corners of [-1, 1]^n
    corners = np.array(np.meshgrid(*([[-1.0, 1.0]] * n), indexing="ij")).reshape(n, -1).T
    low = 2.0 ** n * math.exp(float(W.log_integrand(alpha, corners, weight).min()))

    def tail(R):
        return 2.0 ** n * n * special.gamma(n) * special.gammaincc(n, mu * R) / mu ** n

    R = 1.0
    while tail(R) > 0.1 * rtol * low:
        R *= 1.5
        if R > 1e7:
            raise DivergentIntegralError("tail decays too slowly for quadrature")

    f = _scalar_integrand(W, alpha, weight)

    def inner(level, fixed):
        lo, hi = -R, R
        pts = sorted(p for p in set(_kinks(W, alpha, fixed, weight)) if lo < p < hi)
        if level == n - 1:
            g = lambda t: f(*fixed, t)
        else:
            g = lambda t: inner(level + 1, fixed + [t])[0]
        val, err = integrate.quad(g, lo, hi, points=pts or None, limit=limit,
                                  epsabs=0.0, epsrel=rtol * 0.1)
        return val, err

    val, err = inner(0, [])
    scale = (2 * math.pi) ** n
    tb = tail(R)
    return QuadratureResult(scale * val, float(scale * (err + tb)), R, float(scale * tb))

"""Vertex-listed polytopes in the positive orthant.

Coordinates given as ints, Fractions or strings (``"3/10"``, ``"0.1"``) are
kept as exact rationals and every inside/outside decision on such a polytope
is made in exact arithmetic. Floats switch the polytope to floating point
with small absolute tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import itertools
import math
from numbers import Rational

import numpy as np

from .lp import lp_solve

__all__ = [
    "GeometryError",
    "ProjectionError",
    "EnumerationCapError",
    "Polytope",
    "PolyhedralCone",
    "NormalFan",
    "LatticeGap",
    "parse_coordinate",
    "support_value",
    "log_weight",
    "normal_fan",
    "project_to_polytope",
    "lattice_gap",
    "is_lower_set",
    "lattice_points",
]

FLOAT_TOL = 1e-12


class GeometryError(ValueError):
    pass


class ProjectionError(RuntimeError):
    """Wolfe iteration did not certify; carries the best iterate."""

    def __init__(self, message, best, residual):
        super().__init__(message)
        self.best = best
        self.residual = residual


class EnumerationCapError(RuntimeError):
    pass


def parse_coordinate(value):
    """Return a Fraction for exact input and a float for float input."""
    if isinstance(value, bool):
        raise GeometryError("booleans are not coordinates")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GeometryError(f"cannot parse coordinate {value!r}") from exc
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise GeometryError("coordinates must be finite")
        return float(value)
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise GeometryError(f"unsupported coordinate type {type(value).__name__}")


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points, tol):
    """Andrew's monotone chain; CCW, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return hull


def _in_hull_lp(point, others, exact):
    """Feasibility of point = sum(lam_i * others_i), lam in the simplex."""
    k = len(others)
    n = len(point)
    A_eq = [[others[i][j] for i in range(k)] for j in range(n)] + [[1] * k]
    b_eq = list(point) + [1]
    c = [0] * k
    try:
        lp_solve(c, A_eq=A_eq, b_eq=b_eq, exact=exact, tol=1e-10)
    except Exception:
        return False
    return True


class Polytope:
    """Compact convex polytope S in the nonnegative orthant with 0 in S.

    ``vertices`` is reduced to the extreme points on construction. In two
    dimensions they are stored counter-clockwise starting at the origin.
    Treat instances as immutable.
    """

    def __init__(self, vertices, exact=None):
        raw = [tuple(parse_coordinate(c) for c in v) for v in vertices]
        if not raw:
            raise GeometryError("a polytope needs at least one vertex")
        dim = len(raw[0])
        if dim < 1 or any(len(v) != dim for v in raw):
            raise GeometryError("inconsistent vertex dimensions")
        is_exact = all(isinstance(c, Fraction) for v in raw for c in v)
        if exact is True and not is_exact:
            raise GeometryError("exact=True requires rational coordinates")
        if exact is False or not is_exact:
            is_exact = False
            raw = [tuple(float(c) for c in v) for v in raw]
        if any(c < 0 for v in raw for c in v):
            raise GeometryError("all coordinates must be >= 0")
        if not any(all(c == 0 for c in v) for v in raw):
            raise GeometryError("the origin must be a vertex (0 in S)")
        verts = self._reduce(raw, dim, is_exact)
        self.vertices = tuple(verts)
        self.dim = dim
        self.exact = is_exact

    @staticmethod
    def _reduce(points, dim, exact):
        pts = list(dict.fromkeys(points))
        if dim == 1:
            return [min(pts), max(pts)] if len(pts) > 1 and min(pts) != max(pts) else [min(pts)]
        if dim == 2:
            scale = max(1.0, max(float(abs(c)) for p in pts for c in p))
            hull = _hull_2d(pts, 0 if exact else FLOAT_TOL * scale * scale)
            i0 = next(i for i, p in enumerate(hull) if p[0] == 0 and p[1] == 0)
            return hull[i0:] + hull[:i0]
        keep = []
        for i, p in enumerate(pts):
            others = [q for j, q in enumerate(pts) if j != i]
            if not others or not _in_hull_lp(p, others, exact):
                keep.append(p)
        keep.sort(key=lambda v: (any(c != 0 for c in v), v))
        return keep

    # -- basic data -----------------------------------------------------
    @cached_property
    def V(self) -> np.ndarray:
        """Vertices as a float array of shape (k, n)."""
        return np.array([[float(c) for c in v] for v in self.vertices], dtype=float)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def scale_hint(self) -> float:
        return max(1.0, float(np.abs(self.V).max()))

    @cached_property
    def affine_dim(self) -> int:
        if self.n_vertices == 1:
            return 0
        return int(np.linalg.matrix_rank(self.V[1:] - self.V[0], tol=1e-12 * self.scale_hint))

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.dim == other.dim and sorted(self.vertices) == sorted(other.vertices)

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.vertices))))

    def __repr__(self):
        def fmt(c):
            return str(c) if isinstance(c, Fraction) else repr(c)
        inner = ", ".join("(" + ", ".join(fmt(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope([{inner}])"

    def scale(self, m) -> "Polytope":
        if self.exact and isinstance(m, (int, Fraction)):
            factor = Fraction(m)
        else:
            factor = float(m)
        return Polytope([tuple(factor * c for c in v) for v in self.vertices])

    def bounding_box(self):
        return self.V.min(axis=0), self.V.max(axis=0)

    # -- JSON ------------------------------------------------------------
    def to_json(self) -> dict:
        def enc(c):
            if isinstance(c, Fraction):
                return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            return repr(float(c))
        return {"dim": self.dim, "vertices": [[enc(c) for c in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        if "vertices" not in data:
            raise GeometryError("polytope JSON: missing field 'vertices'")
        verts = data["vertices"]
        if "dim" in data:
            dim = data["dim"]
            if not isinstance(dim, int) or any(len(v) != dim for v in verts):
                raise GeometryError("polytope JSON: field 'dim' does not match vertices")
        coords = []
        for v in verts:
            coords.append([parse_coordinate(c) if isinstance(c, str) else c for c in v])
        return cls(coords)

    # -- support function and membership -------------------------------
    def support(self, xi):
        """phi_S(xi) = max over vertices of <s, xi>; vectorised over leading axes."""
        if isinstance(xi, np.ndarray) and xi.dtype != object:
            if xi.shape[-1] != self.dim:
                raise GeometryError("dimension mismatch")
            return (xi @ self.V.T).max(axis=-1)
        xi = tuple(xi)
        if len(xi) != self.dim:
            raise GeometryError("dimension mismatch")
        if self.exact and all(isinstance(c, (int, Fraction)) for c in xi):
            return max(sum(s_j * x_j for s_j, x_j in zip(s, xi)) for s in self.vertices)
        return float((self.V @ np.asarray(xi, dtype=float)).max())

    @cached_property
    def _edges_2d(self):
        verts = self.vertices
        k = len(verts)
        return [(verts[i], verts[(i + 1) % k]) for i in range(k)]

    def _coerce_point(self, x):
        x = tuple(x)
        if len(x) != self.dim:
            raise GeometryError("dimension mismatch")
        if self.exact and all(isinstance(c, (int, Fraction)) for c in x):
            return tuple(Fraction(c) for c in x), True
        return tuple(float(c) for c in x), False

    def contains(self, x, tol=None) -> bool:
        """Membership test; exact when the polytope and x are rational."""
        x, exact = self._coerce_point(x)
        if tol is None:
            tol = 0 if exact else 1e-12 * self.scale_hint
        verts = self.vertices if exact else [tuple(map(float, v)) for v in self.vertices]
        k = len(verts)
        if k == 1:
            return all(abs(a - b) <= tol for a, b in zip(x, verts[0]))
        if self.dim == 1:
            lo, hi = verts[0][0], verts[-1][0]
            return lo - tol <= x[0] <= hi + tol
        if self.dim == 2:
            if k == 2:
                p, q = verts
                d = (q[0] - p[0], q[1] - p[1])
                length2 = d[0] * d[0] + d[1] * d[1]
                cr = _cross(p, q, x)
                if exact:
                    if cr != 0:
                        return False
                elif abs(cr) > tol * math.sqrt(length2):
                    return False
                t = (x[0] - p[0]) * d[0] + (x[1] - p[1]) * d[1]
                slack = 0 if exact else tol * math.sqrt(length2)
                return -slack <= t <= length2 + slack
            for p, q in zip(verts, verts[1:] + verts[:1]):
                cr = _cross(p, q, x)
                if exact:
                    if cr < 0:
                        return False
                else:
                    length = math.hypot(q[0] - p[0], q[1] - p[1])
                    if cr < -tol * length:
                        return False
            return True
        if not exact:
            # cheap rejection before the LP
            if any(c < -tol for c in x):
                return False
            p, dist = project_to_polytope(self, x)
            return dist <= max(tol, 1e-9 * self.scale_hint)
        return _in_hull_lp(x, list(verts), True)


def support_value(S: Polytope, xi):
    """Supporting function phi_S(xi) = max_{s in S} <s, xi>."""
    return S.support(xi)


def log_weight(S: Polytope, m, gamma, z):
    """psi(z) = 2 m H_S(z) + gamma log(1 + |z|^2).

    On coordinate hyperplanes the upper-limit extension is used: a vertex
    term s_j log|z_j| with z_j = 0 is -inf when s_j > 0 and 0 when s_j = 0.
    Vectorised over leading axes of ``z``.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != S.dim:
        raise GeometryError("dimension mismatch")
    r = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(r)
        # (k, points, n): a zero vertex coordinate kills the term even if log is -inf
        V = S.V
        terms = np.where(V[:, None, :] == 0, 0.0, V[:, None, :] * logr.reshape(1, -1, S.dim))
    H = terms.sum(axis=-1).max(axis=0).reshape(r.shape[:-1])
    psi = 2 * m * H + gamma * np.log1p((r ** 2).sum(axis=-1))
    return float(psi) if np.ndim(psi) == 0 else psi


# ---------------------------------------------------------------------------
# polyhedral cones and the normal fan
# ---------------------------------------------------------------------------

def _null_space(A, tol=1e-10):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n)
    u, s, vt = np.linalg.svd(A)
    rank = int((s > tol * max(1.0, s.max() if s.size else 1.0)).sum())
    return vt[rank:].T


def _extreme_rays(normals, dim, tol=1e-10):
    """Extreme rays and lineality basis of {xi : <h, xi> >= 0 for h in normals}."""
    H = np.asarray(normals, dtype=float).reshape(-1, dim)
    if H.shape[0]:
        H = H / np.linalg.norm(H, axis=1, keepdims=True)
    L = _null_space(H) if H.shape[0] else np.eye(dim)
    lin_dim = L.shape[1]
    rays = []
    need = dim - 1 - lin_dim
    if need >= 0 and H.shape[0] >= need:
        for rows in itertools.combinations(range(H.shape[0]), need):
            M = np.vstack([H[list(rows)], L.T]) if lin_dim else H[list(rows)]
            if M.shape[0] == 0:
                N = np.eye(dim)
            else:
                N = _null_space(M)
            if N.shape[1] != 1:
                continue
            r = N[:, 0]
            for cand in (r, -r):
                if H.shape[0] == 0 or (H @ cand >= -tol).all():
                    if not any(np.allclose(cand, q, atol=1e-9) for q in rays):
                        rays.append(cand)
    return rays, L


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """Cone = nonnegative combinations of ``rays``.

    ``normals`` (optional) are inward normals h with <h, xi> >= 0 on the cone.
    ``lineality`` holds an orthonormal basis of the largest contained subspace;
    its +/- directions are included among ``rays``.
    """

    dim: int
    rays: np.ndarray
    normals: np.ndarray | None = None
    lineality: np.ndarray | None = None

    @classmethod
    def from_rays(cls, rays):
        R = np.atleast_2d(np.asarray(rays, dtype=float))
        if (np.linalg.norm(R, axis=1) == 0).any():
            raise GeometryError("rays must be nonzero")
        dim = R.shape[1]
        normals = None
        if np.linalg.matrix_rank(R) == dim:
            # facet normals via the dual rays, when the cone is pointed
            dual_rays, L = _extreme_rays(R, dim)
            if L.shape[1] == 0 and dual_rays:
                normals = np.array(dual_rays)
        return cls(dim, R, normals, np.zeros((dim, 0)))

    @classmethod
    def from_normals(cls, normals, dim):
        H = np.asarray(normals, dtype=float).reshape(-1, dim)
        rays, L = _extreme_rays(H, dim)
        R = list(rays)
        for j in range(L.shape[1]):
            R.append(L[:, j])
            R.append(-L[:, j])
        R = np.array(R) if R else np.zeros((0, dim))
        return cls(dim, R, H, L)

    @property
    def is_pointed(self) -> bool:
        return self.lineality is None or self.lineality.shape[1] == 0

    def contains(self, xi, tol=1e-9) -> bool:
        xi = np.asarray(xi, dtype=float)
        nrm = np.linalg.norm(xi)
        if nrm == 0:
            return True
        if self.normals is not None:
            Hn = self.normals / np.linalg.norm(self.normals, axis=1, keepdims=True)
            return bool((Hn @ xi >= -tol * nrm).all())
        from scipy.optimize import nnls
        _, resid = nnls(self.rays.T, xi)
        return resid <= tol * nrm


@dataclass(frozen=True, eq=False)
class NormalFan:
    owner: Polytope
    cells: tuple  # ((vertex, PolyhedralCone), ...)

    def cell_index(self, xi) -> int:
        """Index of the cell owning xi; ties go to the lower vertex index."""
        vals = self.owner.V @ np.asarray(xi, dtype=float)
        return int(np.argmax(vals))

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)


def normal_fan(S: Polytope) -> NormalFan:
    """Normal cone N_s = {xi : <s, xi> = phi_S(xi)} for each vertex s."""
    if S.n_vertices == 1:
        cone = PolyhedralCone.from_normals(np.zeros((0, S.dim)), S.dim)
        return NormalFan(S, ((S.vertices[0], cone),))
    V = S.V
    cells = []
    k = S.n_vertices
    for i, s in enumerate(S.vertices):
        if S.dim == 2 and k >= 3:
            prev, nxt = V[i - 1], V[(i + 1) % k]
            H = np.array([V[i] - prev, V[i] - nxt])
        else:
            H = np.array([V[i] - V[j] for j in range(k) if j != i])
        cells.append((s, PolyhedralCone.from_normals(H, S.dim)))
    return NormalFan(S, tuple(cells))


# ---------------------------------------------------------------------------
# nearest point (Wolfe) and the lattice gap
# ---------------------------------------------------------------------------

def _affine_min_norm(P):
    """Weights mu (sum 1) of the min-norm point of the affine hull of rows of P."""
    k = P.shape[0]
    if k == 1:
        return np.ones(1)
    G = P @ P.T
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = G
    M[:k, k] = 1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:k]


def _wolfe(P, max_iter, tol):
    k = P.shape[0]
    start = int(np.argmin((P * P).sum(axis=1)))
    active = [start]
    lam = np.ones(1)
    x = P[start].copy()
    scale = max(1.0, float((P * P).sum(axis=1).max()))
    it = 0
    while it < max_iter:
        it += 1
        dots = P @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= tol * scale or j in active:
            return x, active, lam, True
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            it += 1
            mu = _affine_min_norm(P[active])
            if (mu > 1e-14).all():
                lam = mu
                break
            mask = mu <= 1e-14
            ratios = lam[mask] / (lam[mask] - mu[mask])
            theta = float(np.clip(ratios.min(), 0.0, 1.0))
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-14
            keep[np.argmax(lam)] = True
            active = [a for a, kp in zip(active, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            if it >= max_iter:
                break
        x = lam @ P[active]
    return x, active, lam, False


def project_to_polytope(S: Polytope, x):
    """Euclidean nearest point of S to x and the distance, by Wolfe's method.

    The result is certified by <x - p, s - p> <= 1e-9 (1 + |x|) for every
    vertex s; otherwise :class:`ProjectionError` is raised.
    """
    if len(x) != S.dim:
        raise GeometryError("dimension mismatch")
    if S.dim <= 2 and S.contains(x):
        # exact in 1D/2D for rational data; avoids a round-off distance of ~1e-16
        return np.asarray([float(c) for c in x], dtype=float), 0.0
    x = np.asarray([float(c) for c in x], dtype=float)
    V = S.V
    k = V.shape[0]
    P = V - x
    cap = 10 * k * k + 10
    cert = 1e-9 * (1.0 + float(np.linalg.norm(x)))
    best, best_res = None, math.inf
    for attempt in range(2):
        y, active, lam, _ = _wolfe(P, cap, 1e-15)
        p = x + y
        res = float(((x - p) @ (V - p).T).max()) if k else 0.0
        if res < best_res:
            best, best_res = p, res
        if res <= cert:
            return p, float(np.linalg.norm(x - p))
        # restart from the best vertex by pushing it to the front
        order = np.argsort(np.linalg.norm(P, axis=1))
        P = P[order]
        V = V[order]
    raise ProjectionError("Wolfe iteration did not certify", best, best_res)


@dataclass(frozen=True)
class LatticeGap:
    value: float
    witness: tuple
    nearest: tuple
    candidates_checked: int


def _int_box(lo, hi):
    ranges = [range(int(a), int(b) + 1) for a, b in zip(lo, hi)]
    return itertools.product(*ranges)


def lattice_gap(S: Polytope, m) -> LatticeGap:
    """d_m = dist(mS, N^n \\ mS) together with the witnessing lattice point."""
    mS = S.scale(m)
    lo, hi = mS.bounding_box()
    start = tuple([int(math.floor(hi[0])) + 1] + [0] * (S.dim - 1))
    p, best = project_to_polytope(mS, start)
    witness, nearest = start, tuple(p)
    checked = 1
    box_hi = [math.floor(h + best) for h in hi]
    for alpha in _int_box([0] * S.dim, box_hi):
        a = np.asarray(alpha, dtype=float)
        box_dist = float(np.linalg.norm(np.maximum(a - hi, 0) + np.maximum(lo - a, 0)))
        if box_dist > best + 1e-12:
            continue
        if mS.contains(alpha):
            continue
        checked += 1
        p, d = project_to_polytope(mS, alpha)
        if d < best - 1e-12 or (abs(d - best) <= 1e-12 and alpha < witness):
            best, witness, nearest = d, alpha, tuple(p)
    return LatticeGap(float(best), tuple(int(c) for c in witness),
                      tuple(float(c) for c in nearest), checked)


def is_lower_set(S: Polytope) -> bool:
    """True iff the box [0, s] lies in S for every vertex s."""
    for s in S.vertices:
        for mask in itertools.product((0, 1), repeat=S.dim):
            corner = tuple(c if b else type(c)(0) for c, b in zip(s, mask))
            if not S.contains(corner):
                return False
    return True


def lattice_points(S: Polytope, m, margin=0, max_points=1_000_000):
    """Lattice points of N^n in the bounding box of mS inflated by margin.

    Returns a list of ``(alpha, inside)`` pairs in lexicographic order.
    """
    if margin < 0 or not math.isfinite(margin):
        raise GeometryError("margin must be finite and >= 0")
    mS = S.scale(m)
    _, hi = mS.bounding_box()
    upper = [int(math.floor(h + margin + 1e-12)) for h in hi]
    count = 1
    for u in upper:
        count *= u + 1
    if count > max_points:
        raise EnumerationCapError(f"lattice box has {count} points > cap {max_points}")
    return [(alpha, mS.contains(alpha)) for alpha in _int_box([0] * S.dim, upper)]

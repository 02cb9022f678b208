"""The angular cone of the main theorem, Gamma-hulls and cone triangulation.

An :class:`AngularCone` is kept as axis (1,...,1) plus half-angle and is
never converted to rays: for half-angles above pi/2 it is not convex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import enum
import itertools
import math

import numpy as np

from .geometry import (
    parse_coordinate,
    GeometryError,
    PolyhedralCone,
    Polytope,
    project_to_polytope,
)
from .lp import lp_solve

__all__ = [
    "HypothesisError",
    "NonPointedConeError",
    "UnboundedHullError",
    "UncertifiedError",
    "AngularCone",
    "HullVerdict",
    "Membership",
    "HullRegion",
    "theorem_cone",
    "quarter_cone",
    "halfspace_cone",
    "cone_contains",
    "cone_arc",
    "hull_region",
    "hull_membership",
    "hull_polygon_2d",
    "triangulate",
    "is_gamma_convex",
]

TWO_PI = 2 * math.pi
ARC_SPLIT = math.pi - 1e-9


class HypothesisError(ValueError):
    pass


class NonPointedConeError(ValueError):
    pass


class UnboundedHullError(ValueError):
    pass


class UncertifiedError(RuntimeError):
    pass


@dataclass(frozen=True)
class AngularCone:
    """{xi : angle(1, xi) <= half_angle}."""

    dim: int
    half_angle: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not 0 < self.half_angle <= math.pi + 1e-15:
            raise ValueError("half_angle must lie in (0, pi]")

    @property
    def axis(self) -> np.ndarray:
        return np.ones(self.dim)

    @property
    def cos_threshold(self) -> float:
        return math.cos(self.half_angle)

    def contains(self, xi, tol=1e-12) -> bool:
        return cone_contains(self, xi, tol)


def theorem_cone(n: int, d_m: float, gamma: float = 0.0) -> AngularCone:
    """Cone of directions within arccos(-(d_m - gamma)/sqrt(n)) of (1,...,1)."""
    if gamma < 0:
        raise HypothesisError("theorem hypothesis violated: gamma must be >= 0")
    if not gamma < d_m:
        raise HypothesisError("theorem hypothesis violated: need 0 <= gamma < d_m")
    arg = -(d_m - gamma) / math.sqrt(n)
    return AngularCone(n, math.acos(max(-1.0, min(1.0, arg))))


def quarter_cone(n: int) -> PolyhedralCone:
    """The closed orthant R^n_+."""
    return PolyhedralCone.from_rays(np.eye(n))


def halfspace_cone(n: int) -> AngularCone:
    """{xi : <1, xi> >= 0}."""
    return AngularCone(n, math.pi / 2)


def cone_contains(cone, xi, tol=1e-12) -> bool:
    xi = np.asarray(xi, dtype=float)
    nrm = float(np.linalg.norm(xi))
    if nrm == 0:
        return True
    if isinstance(cone, AngularCone):
        if xi.shape != (cone.dim,):
            raise GeometryError("dimension mismatch")
        return xi.sum() >= cone.cos_threshold * math.sqrt(cone.dim) * nrm - tol * nrm
    return cone.contains(xi, tol=max(tol, 1e-9))


def _unit_mask(cone, X, slack=0.0):
    """Vectorised membership of unit rows X; slack widens the cone by a chord."""
    if isinstance(cone, AngularCone):
        ang = np.arccos(np.clip(X.sum(axis=1) / math.sqrt(cone.dim), -1, 1))
        widen = 2 * math.asin(min(1.0, slack / 2)) if slack else 0.0
        return ang <= cone.half_angle + widen + 1e-12
    H = cone.normals
    if H is None:
        H = PolyhedralCone.from_rays(cone.rays).normals
    if H is None or len(H) == 0:
        return np.ones(len(X), dtype=bool)
    Hn = H / np.linalg.norm(H, axis=1, keepdims=True)
    return ((X @ Hn.T) >= -slack - 1e-12).all(axis=1)


# ---------------------------------------------------------------------------
# two-dimensional arcs
# ---------------------------------------------------------------------------

def cone_arc(cone):
    """Gamma ∩ S^1 as ``(start, width)``; width 2*pi for the whole circle."""
    if cone.dim != 2:
        raise GeometryError("arcs exist only in dimension 2")
    if isinstance(cone, AngularCone):
        width = 2 * cone.half_angle
        if width >= TWO_PI - 1e-15:
            return 0.0, TWO_PI
        return (math.pi / 4 - cone.half_angle) % TWO_PI, width
    rays = np.asarray(cone.rays, dtype=float)
    if len(rays) == 0:
        raise GeometryError("empty cone")
    ang = np.sort(np.mod(np.arctan2(rays[:, 1], rays[:, 0]), TWO_PI))
    ang = np.unique(np.round(ang, 15))
    if len(ang) == 1:
        return float(ang[0]), 0.0
    gaps = np.diff(np.append(ang, ang[0] + TWO_PI))
    g = int(np.argmax(gaps))
    if gaps[g] < math.pi - 1e-12:
        return 0.0, TWO_PI
    start = ang[(g + 1) % len(ang)]
    return float(start), float(TWO_PI - gaps[g])


def _dir(t):
    return np.array([math.cos(t), math.sin(t)])


def _arc_pieces(V, start, width):
    """Split the arc where the maximising vertex changes.

    Returns arrays (u, v, idx): on [u, v] the vertex idx attains phi_S, and
    every piece is narrower than pi.
    """
    k = len(V)
    cuts = [0.0, width]
    for i, j in itertools.combinations(range(k), 2):
        d = V[i] - V[j]
        if np.allclose(d, 0):
            continue
        base = math.atan2(d[1], d[0])
        for t in (base + math.pi / 2, base - math.pi / 2):
            off = (t - start) % TWO_PI
            if 0 < off < width:
                cuts.append(off)
    cuts = sorted(set(cuts))
    U, W, I = [], [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 1e-15:
            continue
        mid = start + (a + b) / 2
        idx = int(np.argmax(V @ _dir(mid)))
        nseg = max(1, math.ceil((b - a) / ARC_SPLIT))
        for q in range(nseg):
            U.append(start + a + (b - a) * q / nseg)
            W.append(start + a + (b - a) * (q + 1) / nseg)
            I.append(idx)
    # merge nothing: keeping pieces separate keeps each one < pi wide
    return np.array(U), np.array(W), np.array(I, dtype=int)


def _max_on_pieces(x, V, U, W, I):
    """max over the arc of <x, xi> - phi_S(xi) and the maximising angle."""
    w = x[None, :] - V[I]
    A = np.hypot(w[:, 0], w[:, 1])
    phi = np.arctan2(w[:, 1], w[:, 0])
    off = np.mod(phi - U, TWO_PI)
    inside = (off <= W - U) & (A > 0)
    vu = w[:, 0] * np.cos(U) + w[:, 1] * np.sin(U)
    vv = w[:, 0] * np.cos(W) + w[:, 1] * np.sin(W)
    best_t = np.where(inside, phi, np.where(vu >= vv, U, W))
    vals = np.where(inside, A, np.maximum(vu, vv))
    j = int(np.argmax(vals))
    return float(vals[j]), float(best_t[j])


# ---------------------------------------------------------------------------
# hull regions
# ---------------------------------------------------------------------------

class HullVerdict(enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    BOUNDARY = "Boundary"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Membership:
    verdict: HullVerdict
    value: float          # best estimate of sup{<x,xi> - phi_S(xi)} over unit xi in Gamma
    tol: float
    direction: tuple | None = None
    in_null_cone: bool = False  # maximiser lies in N^S_0 (reported, not enforced)

    @property
    def inside(self) -> bool:
        return self.verdict is HullVerdict.INSIDE


@dataclass(eq=False)
class HullRegion:
    """Gamma-hull of S. Two-dimensional regions carry an explicit polygon."""

    source: Polytope
    cone: object
    polygon: np.ndarray | None = None
    tol: float = 1e-9
    resolution: tuple = (21, 61, 201)
    boundary_tol: float = 1e-6
    _pieces: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.source.dim != self.cone.dim:
            raise GeometryError("cone and polytope dimensions differ")
        if self.source.dim == 2 and self._pieces is None:
            start, width = cone_arc(self.cone)
            self._pieces = _arc_pieces(self.source.V, start, width)

    @property
    def dim(self):
        return self.source.dim

    def sup_violation(self, x):
        """(value, direction) of max over unit xi in Gamma of <x, xi> - phi_S(xi), 2D only."""
        U, W, I = self._pieces
        val, t = _max_on_pieces(np.asarray(x, dtype=float), self.source.V, U, W, I)
        return val, (math.cos(t), math.sin(t))

    def membership(self, x) -> Membership:
        S = self.source
        x = tuple(parse_coordinate(c) if isinstance(c, str) else c for c in x)
        xf = np.asarray([float(c) for c in x], dtype=float)
        if xf.shape != (S.dim,):
            raise GeometryError("dimension mismatch")
        scale = 1.0 + float(np.linalg.norm(xf))
        if (xf < 0).any():
            return Membership(HullVerdict.OUTSIDE, math.inf, 0.0)
        if S.contains(x):
            return Membership(HullVerdict.INSIDE, 0.0, 0.0)
        tol = self.tol * scale
        if S.dim == 1:
            return self._membership_1d(xf, tol)
        if S.dim == 2:
            val, d = self.sup_violation(xf)
            null = bool(S.support(np.array(d)) <= 1e-12)
            if val > tol:
                verdict = HullVerdict.OUTSIDE
            elif val < -tol:
                verdict = HullVerdict.INSIDE
            else:
                verdict = HullVerdict.BOUNDARY
            return Membership(verdict, val, tol, d, null)
        return self._membership_grid(xf, tol)

    def _membership_1d(self, x, tol):
        S = self.source
        best, bd = -math.inf, None
        for d in (1.0, -1.0):
            if cone_contains(self.cone, [d]):
                v = x[0] * d - S.support(np.array([d]))
                if v > best:
                    best, bd = v, (d,)
        if best > tol:
            verdict = HullVerdict.OUTSIDE
        elif best < -tol:
            verdict = HullVerdict.INSIDE
        else:
            verdict = HullVerdict.BOUNDARY
        return Membership(verdict, best, tol, bd)

    def _membership_grid(self, x, tol):
        S = self.source
        L = float(np.linalg.norm(S.V - x, axis=1).max())
        n = S.dim
        lo_best = -math.inf
        for per_face in self.resolution:
            X = _sphere_grid(n, per_face)
            r = math.sqrt(n - 1) * (2.0 / (per_face - 1)) / 2
            g = X @ x - (X @ S.V.T).max(axis=1)
            strict = _unit_mask(self.cone, X)
            infl = _unit_mask(self.cone, X, slack=r)
            if strict.any():
                j = int(np.argmax(np.where(strict, g, -np.inf)))
                lo = float(g[j])
                if lo > lo_best:
                    lo_best, d = lo, tuple(X[j])
            hi = float(g[infl].max()) + L * r if infl.any() else -math.inf
            if lo_best > tol:
                return Membership(HullVerdict.OUTSIDE, lo_best, L * r, d,
                                  bool(S.support(np.array(d)) <= 1e-12))
            if hi < 0:
                return Membership(HullVerdict.INSIDE, hi, L * r)
        width = hi - lo_best
        if width <= self.boundary_tol * (1 + float(np.linalg.norm(x))):
            return Membership(HullVerdict.BOUNDARY, lo_best, width)
        raise UncertifiedError(
            f"hull membership uncertified at resolution {self.resolution[-1]} "
            f"(bracket [{lo_best:.3g}, {hi:.3g}]); use a finer grid")

    def contains(self, x) -> bool:
        return self.membership(x).verdict is not HullVerdict.OUTSIDE

    def polygon_contains(self, x, tol=1e-9) -> bool:
        if self.polygon is None:
            raise GeometryError("no explicit polygon for this region")
        P = self.polygon
        x = np.asarray(x, dtype=float)
        if len(P) == 1:
            return bool(np.linalg.norm(x - P[0]) <= tol)
        if len(P) == 2:
            _, d = _seg_dist(x, P[0], P[1])
            return d <= tol
        e = np.roll(P, -1, axis=0) - P
        rel = x - P
        cr = e[:, 0] * rel[:, 1] - e[:, 1] * rel[:, 0]
        return bool((cr >= -tol * np.linalg.norm(e, axis=1)).all())


def _seg_dist(x, p, q):
    d = q - p
    den = float(d @ d)
    t = 0.0 if den == 0 else float(np.clip((x - p) @ d / den, 0, 1))
    c = p + t * d
    return c, float(np.linalg.norm(x - c))


def _sphere_grid(n, per_face):
    """Grid on the faces of [-1,1]^n pushed to the unit sphere."""
    g = np.linspace(-1, 1, per_face)
    blocks = []
    for j in range(n):
        mesh = np.stack(np.meshgrid(*([g] * (n - 1)), indexing="ij"), -1).reshape(-1, n - 1)
        for sgn in (-1.0, 1.0):
            B = np.insert(mesh, j, sgn, axis=1)
            blocks.append(B)
    X = np.vstack(blocks)
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _halfplane_vertices(A, b, tol):
    """Vertices of {x : A x <= b} in the plane, CCW."""
    pts = []
    for i, j in itertools.combinations(range(len(A)), 2):
        M = np.array([A[i], A[j]])
        det = np.linalg.det(M)
        if abs(det) < 1e-14:
            continue
        p = np.linalg.solve(M, [b[i], b[j]])
        if (A @ p <= b + tol * (1 + np.abs(b))).all():
            if not any(np.linalg.norm(p - q) <= 1e-10 for q in pts):
                pts.append(p)
    if not pts:
        return np.zeros((0, 2))
    P = np.array(pts)
    if len(P) <= 2:
        return P
    c = P.mean(axis=0)
    order = np.argsort(np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0]))
    P = P[order]
    # drop collinear points
    keep = []
    k = len(P)
    for i in range(k):
        a, o, bb = P[i - 1], P[i], P[(i + 1) % k]
        cr = (o[0] - a[0]) * (bb[1] - a[1]) - (o[1] - a[1]) * (bb[0] - a[0])
        if abs(cr) > 1e-12 * (1 + np.abs(P).max()) ** 2:
            keep.append(i)
    return P[keep] if len(keep) >= 3 else P


def hull_polygon_2d(S: Polytope, cone) -> HullRegion:
    """Explicit polygon of the Gamma-hull of a planar S."""
    if S.dim != 2:
        raise GeometryError("hull_polygon_2d needs dimension 2")
    start, width = cone_arc(cone)
    # boundedness needs a strictly positive direction in Gamma
    probe = [(math.pi / 4) + s for s in np.linspace(-math.pi / 4, math.pi / 4, 181)[1:-1]]
    if not any(((t - start) % TWO_PI) <= width for t in probe):
        raise UnboundedHullError("cone has no direction with both components positive")
    U, W, I = _arc_pieces(S.V, start, width)
    rows, rhs = [[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]
    for u, v, i in zip(U, W, I):
        for t in (u, v):
            d = _dir(t)
            rows.append(d)
            rhs.append(float(S.V[i] @ d))
    A, b = np.array(rows), np.array(rhs)
    P = _halfplane_vertices(A, b, 1e-10) + 0.0   # drop negative zeros
    return HullRegion(S, cone, polygon=P, _pieces=(U, W, I))


def hull_region(S: Polytope, cone, **kw) -> HullRegion:
    if S.dim == 2:
        region = hull_polygon_2d(S, cone)
        for key, val in kw.items():
            setattr(region, key, val)
        return region
    return HullRegion(S, cone, **kw)


def hull_membership(S: Polytope, cone, x, resolution=None) -> Membership:
    """Decide x in S^_Gamma = {x >= 0 : <x, xi> <= phi_S(xi) for xi in Gamma}."""
    kw = {} if resolution is None else {"resolution": tuple(resolution)}
    region = HullRegion(S, cone, **kw)
    return region.membership(x)


# ---------------------------------------------------------------------------
# triangulation of polyhedral cones
# ---------------------------------------------------------------------------

def _interior_functional(R):
    """c with <c, r> > 0 for every row r, maximising the worst margin."""
    n = R.shape[1]
    Rn = R / np.linalg.norm(R, axis=1, keepdims=True)
    # variables c (n, in [-1,1]) and z; maximise z s.t. z - <c, r> <= 0
    A = np.hstack([-Rn, np.ones((len(Rn), 1))])
    res = lp_solve([0.0] * n + [1.0], A_ub=A, b_ub=np.zeros(len(Rn)),
                   bounds=[(-1.0, 1.0)] * n + [(None, 1.0)], exact=False)
    return np.array(res.argmax[:n]), res.optimum


def triangulate(C: PolyhedralCone):
    """Split a pointed cone into simplicial cones with disjoint interiors.

    Lower-dimensional cones return ``[]`` (they carry no volume).
    """
    if not C.is_pointed:
        raise NonPointedConeError("integral diverges structurally; handle at caller")
    R = np.asarray(C.rays, dtype=float)
    n = C.dim
    if len(R) == 0 or np.linalg.matrix_rank(R) < n:
        return []
    c, margin = _interior_functional(R)
    if margin <= 1e-12:
        raise NonPointedConeError("integral diverges structurally; handle at caller")
    P = R / (R @ c)[:, None]
    if n == 1:
        return [PolyhedralCone.from_rays(R[:1])]
    # coordinates on the slice <c, x> = 1
    basis = np.linalg.svd(c[None, :])[2][1:]
    Q = P @ basis.T
    if n == 2:
        lo, hi = int(np.argmin(Q[:, 0])), int(np.argmax(Q[:, 0]))
        return [PolyhedralCone.from_rays(R[[lo, hi]])]
    if len(R) == n:
        return [PolyhedralCone.from_rays(R)]
    from scipy.spatial import Delaunay

    tri = Delaunay(Q)
    pieces = []
    for simplex in tri.simplices:
        rays = R[simplex]
        if abs(np.linalg.det(rays)) > 1e-12 * np.prod(np.linalg.norm(rays, axis=1)):
            pieces.append(PolyhedralCone.from_rays(rays))
    return pieces


# ---------------------------------------------------------------------------
# Gamma-convexity
# ---------------------------------------------------------------------------

def is_gamma_convex(S: Polytope, cone, n_random=2000, seed=0, tol=1e-9) -> bool:
    """True iff S equals its Gamma-hull.

    Planar S: Hausdorff distance between the hull polygon and S below tol.
    Higher dimensions: a weaker search for a witness point in the hull but
    not in S among lattice points and random points.
    """
    if S.dim == 2:
        region = hull_polygon_2d(S, cone)
        return _hausdorff_to(S, region.polygon) <= tol * S.scale_hint
    if S.dim == 1:
        # without the direction +1 the hull is the whole half-line
        return cone_contains(cone, [1.0])
    region = HullRegion(S, cone)
    ones = np.ones(S.dim)
    if not cone_contains(cone, ones):
        raise UnboundedHullError("cone does not contain (1,...,1); no bounding box")
    bound = float(S.support(ones))
    rng = np.random.default_rng(seed)
    pts = [np.array(p, dtype=float) for p in itertools.product(range(int(bound) + 1), repeat=S.dim)
           if sum(p) <= bound]
    pts += list(rng.uniform(0, bound, size=(n_random, S.dim)))
    for p in pts:
        if p.sum() > bound:
            continue
        if S.contains(tuple(p)):
            continue
        if region.membership(p).verdict is HullVerdict.INSIDE:
            if project_to_polytope(S, p)[1] > tol:
                return False
    return True


def _hausdorff_to(S, P):
    if len(P) == 0:
        return math.inf
    return max(project_to_polytope(S, p)[1] for p in P)

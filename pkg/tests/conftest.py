from fractions import Fraction

import numpy as np
import pytest

from slelong import Polytope
from slelong.analysis import example41_polytope, random_lower_set_2d, random_polytope_2d


@pytest.fixture
def square():
    return Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])


@pytest.fixture
def simplex2():
    return Polytope([(0, 0), (1, 0), (0, 1)])


@pytest.fixture
def quad():
    """The quadrilateral with a = 1/10, b = 4/5."""
    return example41_polytope(Fraction(1, 10), Fraction(4, 5))


@pytest.fixture
def quad5():
    return example41_polytope(Fraction(3, 20), Fraction(17, 20))


def random_polygons(seed, count):
    rng = np.random.default_rng(seed)
    return [random_polytope_2d(rng) for _ in range(count)]


def random_lower_sets(seed, count):
    rng = np.random.default_rng(seed)
    return [random_lower_set_2d(rng) for _ in range(count)]


def polygon_distance(P, x):
    """Euclidean distance from x to a CCW polygon (oracle independent of Wolfe)."""
    V = P.V
    x = np.asarray(x, dtype=float)
    if len(V) == 1:
        return float(np.linalg.norm(x - V[0]))
    if len(V) >= 3:
        e = np.roll(V, -1, axis=0) - V
        rel = x - V
        if (e[:, 0] * rel[:, 1] - e[:, 1] * rel[:, 0] >= 0).all():
            return 0.0
    best = np.inf
    for i in range(len(V)):
        p, q = V[i], V[(i + 1) % len(V)]
        d = q - p
        t = np.clip((x - p) @ d / (d @ d), 0, 1)
        best = min(best, float(np.linalg.norm(x - p - t * d)))
    return best


def brute_force_gap(S, m):
    """Minimum distance from mS to the lattice points outside it, by full enumeration."""
    mS = S.scale(m)
    hi = mS.V.max(axis=0)
    n = S.dim
    R = float(np.ceil(hi.max())) + 2
    axes = [np.arange(0, int(np.ceil(h + R)) + 1) for h in hi]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    if n == 2:
        d = np.array([polygon_distance(mS, a) for a in grid])
    else:
        from slelong import project_to_polytope
        d = np.array([project_to_polytope(mS, a)[1] for a in grid])
    out = d[d > 1e-12]
    return float(out.min())


# -- Monte Carlo oracle for exponential integrals over simplicial cones ----------

def random_simplicial_cone(rng, n):
    """Rays (rows) and a coefficient c with <c, v_i> < 0 for every ray."""
    while True:
        center = rng.normal(size=n)
        center /= np.linalg.norm(center)
        R = center + 0.9 * rng.normal(size=(n, n))
        R /= np.linalg.norm(R, axis=1)[:, None]
        if abs(np.linalg.det(R)) > 0.2:
            break
    b = rng.uniform(0.5, 2.0, n)
    return R, -np.linalg.solve(R, b)


def _cap_directions(axis, rho, N, rng):
    n = len(axis)
    if n == 2:
        a0 = np.arctan2(axis[1], axis[0])
        t = a0 + rng.uniform(-rho, rho, N)
        return np.stack([np.cos(t), np.sin(t)], 1), 2 * rho
    z = rng.uniform(np.cos(rho), 1, N)
    phi = rng.uniform(0, 2 * np.pi, N)
    s = np.sqrt(1 - z * z)
    e1 = np.cross(axis, [1, 0, 0] if abs(axis[0]) < 0.9 else [0, 1, 0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    U = z[:, None] * axis + (s * np.cos(phi))[:, None] * e1 + (s * np.sin(phi))[:, None] * e2
    return U, 2 * np.pi * (1 - np.cos(rho))


def monte_carlo_cone_integral(R, c, N, rng):
    """Estimate of the integral of exp(<c, xi>) over cone(R), with its standard error.

    Directions are uniform on a spherical cap around the cone; radii follow the
    exponential tilt r ~ Gamma(n, rate = -<c, u>) of the integrand. Cone
    membership is tested in xi-space.
    """
    from math import lgamma, log
    n = R.shape[1]
    Rh = R / np.linalg.norm(R, axis=1)[:, None]
    axis = Rh.sum(0)
    axis /= np.linalg.norm(axis)
    rho = float(np.arccos(np.clip(Rh @ axis, -1, 1)).max()) * 1.0001
    kappa0 = float(np.min(-(R @ c) / np.linalg.norm(R, axis=1)))
    U, area = _cap_directions(axis, rho, N, rng)
    rate = np.maximum(-(U @ c), kappa0)
    r = rng.gamma(n, 1 / rate)
    X = U * r[:, None]
    lam = np.linalg.solve(R.T, X.T).T
    inside = (lam >= 0).all(axis=1)
    logp = n * np.log(rate) - rate * r - lgamma(n) - log(area)
    w = np.where(inside, np.exp(X @ c - logp), 0.0)
    return float(w.mean()), float(w.std() / np.sqrt(N))


# -- dense boundary sampling of E_alpha --------------------------------------------

def sampled_face_maxima(W, alpha, n_points=100_000):
    """Max of E_alpha on each face of the box |xi|_inf <= 1 (2D), by sampling.

    Returns {face label: (raw sampled max, refined max)}. The refinement runs a
    bounded scalar search around the best sample; E_alpha is concave, so the
    restriction to a face segment is unimodal.
    """
    from scipy.optimize import minimize_scalar
    assert W.dim == 2
    per_face = n_points // 4
    t = np.linspace(-1, 1, per_face)
    h = t[1] - t[0]
    out = {}
    for j in range(2):
        for sign in (1, -1):
            label = f"{'+' if sign > 0 else '-'}xi{j + 1}"

            def pt(s):
                xi = np.empty((np.size(s), 2))
                xi[:, j] = sign
                xi[:, 1 - j] = s
                return xi
            vals = W.exponent(alpha, pt(t))
            k = int(np.argmax(vals))
            lo, hi = max(-1.0, t[k] - h), min(1.0, t[k] + h)
            res = minimize_scalar(lambda s: -float(W.exponent(alpha, pt(s))[0]),
                                  bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
            out[label] = (float(vals[k]), max(float(vals[k]), -float(res.fun)))
    return out


def in_interior_2d(P, x):
    """Exact strict interior test for a rational CCW polygon."""
    from fractions import Fraction
    x = tuple(Fraction(c) for c in x)
    V = P.vertices
    if len(V) < 3:
        return False
    for i in range(len(V)):
        a, b = V[i], V[(i + 1) % len(V)]
        cr = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])
        if cr <= 0:
            return False
    return True


# -- acceptance summary lines --------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

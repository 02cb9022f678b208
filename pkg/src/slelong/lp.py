"""Dense two-phase simplex with Bland's rule.

The finiteness test only ever builds LPs with a handful of variables and
rows, so a plain tableau is the right tool. The same code runs on floats
(numpy ``float64``) and on exact rationals (``fractions.Fraction`` held in an
``object`` array); in the exact case all pivoting decisions are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

__all__ = ["LPError", "LPInfeasible", "LPUnbounded", "LPResult", "lp_solve"]


class LPError(RuntimeError):
    """Raised when the solver cannot return an optimum."""


class LPInfeasible(LPError):
    pass


class LPUnbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    optimum: object
    argmax: tuple
    iterations: int


def _is_exact(*arrays) -> bool:
    for arr in arrays:
        if arr is None:
            continue
        for v in np.asarray(arr, dtype=object).ravel():
            if isinstance(v, float):
                return False
    return True


def _as_matrix(a, ncols, exact):
    if a is None or len(a) == 0:
        return np.zeros((0, ncols), dtype=object if exact else float)
    if exact:
        out = np.empty((len(a), ncols), dtype=object)
        for i, row in enumerate(a):
            for j, v in enumerate(row):
                out[i, j] = Fraction(v)
        return out
    return np.asarray(a, dtype=float).reshape(len(a), ncols)


def _as_vector(b, exact):
    if b is None:
        return np.zeros(0, dtype=object if exact else float)
    if exact:
        return np.array([Fraction(v) for v in b], dtype=object)
    return np.asarray(b, dtype=float).ravel()


def lp_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
             exact=None, max_iter=5000, tol=1e-11):
    """Maximise ``c @ y`` subject to ``A_ub @ y <= b_ub``, ``A_eq @ y == b_eq``.

    ``bounds`` is a list of ``(lo, hi)`` pairs (``None`` for an infinite side);
    by default every variable is nonnegative. With ``exact=None`` the
    arithmetic is exact when every input is an int or a Fraction.

    Returns an :class:`LPResult`. Raises :class:`LPInfeasible` or
    :class:`LPUnbounded`; both indicate a construction bug for the LPs built
    in this package, whose feasible sets are boxes.
    """
    nvar = len(c)
    if bounds is None:
        bounds = [(0, None)] * nvar
    if exact is None:
        flat_bounds = [v for pair in bounds for v in pair if v is not None]
        exact = _is_exact(c, A_ub, b_ub, A_eq, b_eq, flat_bounds)
    zero = Fraction(0) if exact else 0.0
    eps = 0 if exact else tol
    conv = Fraction if exact else float

    c = _as_vector(c, exact)
    A_ub = _as_matrix(A_ub, nvar, exact)
    b_ub = _as_vector(b_ub, exact)
    A_eq = _as_matrix(A_eq, nvar, exact)
    b_eq = _as_vector(b_eq, exact)

    # Rewrite every original variable as offset + sum(sign * std_var).
    columns = []      # (original index, sign) per standard column
    offset = [zero] * nvar
    extra_ub_rows = []  # (column, upper bound) for y' <= hi - lo
    for i, (lo, hi) in enumerate(bounds):
        lo = None if lo is None or (not exact and math.isinf(lo)) else conv(lo)
        hi = None if hi is None or (not exact and math.isinf(hi)) else conv(hi)
        if lo is not None and hi is not None and hi < lo:
            raise LPInfeasible(f"empty bounds for variable {i}")
        if lo is not None and hi is not None and hi == lo:
            offset[i] = lo
        elif lo is not None:
            offset[i] = lo
            columns.append((i, 1))
            if hi is not None:
                extra_ub_rows.append((len(columns) - 1, hi - lo))
        elif hi is not None:
            offset[i] = hi
            columns.append((i, -1))
        else:
            columns.append((i, 1))
            columns.append((i, -1))
    nstd = len(columns)
    off = np.array(offset, dtype=object if exact else float)

    def transform(A, b):
        M = np.zeros((A.shape[0], nstd), dtype=object if exact else float)
        if exact:
            M[:] = zero
        for k, (i, sgn) in enumerate(columns):
            M[:, k] = A[:, i] * sgn
        rhs = b - A.dot(off) if A.shape[0] else b
        return M, rhs

    Mu, ru = transform(A_ub, b_ub)
    Me, re_ = transform(A_eq, b_eq)
    if extra_ub_rows:
        rows = np.zeros((len(extra_ub_rows), nstd), dtype=object if exact else float)
        if exact:
            rows[:] = zero
        rhs = np.array([h for _, h in extra_ub_rows], dtype=object if exact else float)
        for r, (k, _) in enumerate(extra_ub_rows):
            rows[r, k] = conv(1)
        Mu = np.vstack([Mu, rows])
        ru = np.concatenate([ru, rhs])
    cstd = np.array([c[i] * sgn for i, sgn in columns], dtype=object if exact else float)
    const = c.dot(off) if nvar else zero

    n_ub, n_eq = Mu.shape[0], Me.shape[0]
    m = n_ub + n_eq
    # columns: standard vars | slacks | artificials
    n_art_rows = [i for i in range(n_ub) if ru[i] < 0] + [n_ub + i for i in range(n_eq)]
    ncols = nstd + n_ub + len(n_art_rows)
    T = np.zeros((m + 1, ncols + 1), dtype=object if exact else float)
    if exact:
        T[:] = zero
    basis = [0] * m
    art_col = {}
    for k, r in enumerate(n_art_rows):
        art_col[r] = nstd + n_ub + k
    for i in range(n_ub):
        sgn = -1 if ru[i] < 0 else 1
        T[i, :nstd] = Mu[i] * sgn
        T[i, nstd + i] = conv(sgn)
        T[i, -1] = ru[i] * sgn
        if i in art_col:
            T[i, art_col[i]] = conv(1)
            basis[i] = art_col[i]
        else:
            basis[i] = nstd + i
    for j in range(n_eq):
        i = n_ub + j
        sgn = -1 if re_[j] < 0 else 1
        T[i, :nstd] = Me[j] * sgn
        T[i, -1] = re_[j] * sgn
        T[i, art_col[i]] = conv(1)
        basis[i] = art_col[i]

    iterations = 0

    def set_objective(cost):
        T[m, :] = zero
        T[m, :ncols] = cost
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0:
                T[m] = T[m] - cb * T[i]
        # T[m, -1] holds -(objective value)

    def pivot(r, col):
        T[r] = T[r] / T[r, col]
        for i in range(m + 1):
            if i != r and T[i, col] != 0:
                T[i] = T[i] - T[i, col] * T[r]
        basis[r] = col

    def run(allowed):
        nonlocal iterations
        while True:
            iterations += 1
            if iterations > max_iter:
                raise LPError("iteration cap reached")
            entering = None
            for j in allowed:
                if T[m, j] > eps:
                    entering = j
                    break
            if entering is None:
                return
            best, leave = None, None
            for i in range(m):
                a = T[i, entering]
                if a > eps:
                    ratio = T[i, -1] / a
                    if (best is None or ratio < best - eps
                            or (abs(ratio - best) <= eps and basis[i] < basis[leave])):
                        best, leave = ratio, i
            if leave is None:
                raise LPUnbounded("objective unbounded")
            pivot(leave, entering)

    if art_col:
        cost1 = np.zeros(ncols, dtype=object if exact else float)
        if exact:
            cost1[:] = zero
        for col in art_col.values():
            cost1[col] = conv(-1)
        set_objective(cost1)
        run(range(ncols))
        if -T[m, -1] < -max(eps * 1e3, eps):
            raise LPInfeasible("phase one optimum is negative")
        art = set(art_col.values())
        for i in range(m):
            if basis[i] in art:
                for j in range(nstd + n_ub):
                    if abs(T[i, j]) > eps:
                        pivot(i, j)
                        break
        allowed = range(nstd + n_ub)
    else:
        allowed = range(ncols)

    cost2 = np.zeros(ncols, dtype=object if exact else float)
    if exact:
        cost2[:] = zero
    cost2[:nstd] = cstd
    set_objective(cost2)
    run(allowed)

    xstd = [zero] * ncols
    for i in range(m):
        xstd[basis[i]] = T[i, -1]
    y = list(offset)
    for k, (i, sgn) in enumerate(columns):
        y[i] = y[i] + sgn * xstd[k]
    opt = -T[m, -1] + const
    if not exact:
        opt = float(opt)
        y = [float(v) for v in y]
    return LPResult(opt, tuple(y), iterations)

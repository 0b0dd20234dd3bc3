"""Dense symmetric linear-algebra kernels.

All routines operate on plain ``numpy`` float64 arrays. Symmetric inputs must
be exactly symmetric (use :func:`symmetrize` after accumulating products).
Everything here is a pure, deterministic function of its inputs:

* :func:`cholesky_spd` / :func:`solve_spd` - factor and solve SPD systems,
* :func:`sym_eigen` - cyclic Jacobi eigendecomposition,
* :func:`gen_sym_eigen` - generalized problem A v = lambda B v reduced to a
  standard symmetric one by Cholesky whitening of B,
* :func:`complement_basis` - deterministic orthonormal complement of a unit
  vector via a Householder reflector.

Tolerances are relative to Frobenius norms so the kernels behave uniformly
across input scales.
"""

import numpy as np

from .errors import ConvergenceFailure, DegenerateDirection, NotPositiveDefinite

__all__ = [
    "symmetrize",
    "check_symmetric",
    "cholesky_spd",
    "solve_spd",
    "solve_lower",
    "solve_upper",
    "sym_eigen",
    "gen_sym_eigen",
    "complement_basis",
]


def symmetrize(a):
    """Return the exactly symmetric part (a + a.T) / 2 as a new array."""
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2.0


def check_symmetric(a, name="matrix"):
    """Validate exact symmetry and finiteness; return a float64 copy."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    if not np.array_equal(a, a.T):
        raise ValueError(f"{name} is not exactly symmetric")
    return a


def cholesky_spd(a):
    """Lower-triangular L with a = L @ L.T.

    Raises NotPositiveDefinite(j) when pivot j falls at or below
    1e-14 * trace(a) / n, signalling the caller to apply shrinkage.
    """
    a = check_symmetric(a)
    n = a.shape[0]
    pivot_floor = 1e-14 * np.trace(a) / n
    lower = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= pivot_floor or not np.isfinite(d):
            raise NotPositiveDefinite(j)
        lower[j, j] = np.sqrt(d)
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_lower(lower, b):
    """Forward substitution: solve lower @ y = b."""
    b = np.asarray(b, dtype=float)
    n = lower.shape[0]
    y = np.zeros(b.shape)
    for i in range(n):
        y[i] = (b[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    return y


def solve_upper(lower, b):
    """Back substitution: solve lower.T @ x = b."""
    b = np.asarray(b, dtype=float)
    n = lower.shape[0]
    x = np.zeros(b.shape)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x


def solve_spd(a, b):
    """Solve a @ x = b for symmetric positive definite a."""
    lower = cholesky_spd(a)
    return solve_upper(lower, solve_lower(lower, b))


def sym_eigen(a, max_sweeps=None):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (values, vectors) with values sorted descending and vectors in
    matching columns. Off-diagonal mass is driven below 1e-12 * ||a||_F
    within a budget of ``max_sweeps`` (default 50 * n) sweeps.

    Raises ConvergenceFailure if the budget is exhausted first.
    """
    a = check_symmetric(a)
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy(), np.ones((1, 1))
    if max_sweeps is None:
        max_sweeps = 50 * n
    work = a.copy()
    vecs = np.eye(n)
    norm = np.linalg.norm(a)
    threshold = 1e-12 * norm
    if norm == 0.0:
        return np.zeros(n), vecs

    sweeps = 0
    while _offdiag_norm(work) > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceFailure(sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                # Stable rotation angle: tan(2*theta) = 2*apq / (aqq - app).
                tau = (work[q, q] - work[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                _rotate(work, vecs, p, q, c, s)
        sweeps += 1

    values = np.diag(work).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], vecs[:, order]


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return np.linalg.norm(off)


def _rotate(work, vecs, p, q, c, s):
    # Two-sided rotation on rows/cols p, q; exact zero written to (p, q).
    app, aqq, apq = work[p, p], work[q, q], work[p, q]
    row_p = work[p, :].copy()
    row_q = work[q, :].copy()
    work[p, :] = c * row_p - s * row_q
    work[q, :] = s * row_p + c * row_q
    work[:, p] = work[p, :]
    work[:, q] = work[q, :]
    work[p, p] = c * c * app - 2.0 * s * c * apq + s * s * aqq
    work[q, q] = s * s * app + 2.0 * s * c * apq + c * c * aqq
    work[p, q] = 0.0
    work[q, p] = 0.0
    col_p = vecs[:, p].copy()
    col_q = vecs[:, q].copy()
    vecs[:, p] = c * col_p - s * col_q
    vecs[:, q] = s * col_p + c * col_q


def gen_sym_eigen(a, b):
    """All eigenpairs of a @ v = lambda * b @ v, values descending.

    a must be symmetric positive semidefinite, b symmetric positive
    definite. Solved by whitening: with b = L L^T the problem becomes the
    standard symmetric one L^-1 a L^-T u = lambda u and v = L^-T u.
    Returned vectors are unit Euclidean norm; they remain pairwise
    b-orthogonal.
    """
    a = check_symmetric(a, "a")
    lower = cholesky_spd(b)
    # L^-1 @ a @ L^-T, symmetrized to erase rounding asymmetry.
    half = solve_lower(lower, a)
    white = symmetrize(solve_lower(lower, half.T))
    values, us = sym_eigen(white)
    vecs = solve_upper(lower, us)
    vecs /= np.linalg.norm(vecs, axis=0, keepdims=True)
    return values, vecs


def complement_basis(d, n):
    """Orthonormal basis of the hyperplane orthogonal to unit vector d.

    Returns an n x (n-1) matrix Q with Q.T @ Q = I and Q.T @ d = 0, built
    from the Householder reflector that maps d onto a signed first
    coordinate axis. Deterministic: identical inputs give identical bits.
    """
    d = np.asarray(d, dtype=float)
    if d.shape != (n,):
        raise DegenerateDirection(f"direction has shape {d.shape}, expected ({n},)")
    nrm = np.linalg.norm(d)
    if abs(nrm - 1.0) > 1e-10:
        raise DegenerateDirection(f"direction norm {nrm} is not 1 within 1e-10")
    if n < 2:
        raise DegenerateDirection("no orthogonal complement in dimension < 2")
    sign = 1.0 if d[0] >= 0.0 else -1.0
    u = d.copy()
    u[0] += sign  # reflect onto -sign * e1; this choice avoids cancellation
    reflector = np.eye(n) - (2.0 / (u @ u)) * np.outer(u, u)
    return reflector[:, 1:]

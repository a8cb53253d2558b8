"""Lagrangian dual solvers for the unit-norm, mutually orthogonal column problems.

Every solve here happens in the eigenbasis of X^T X, where the regularized
inverse (X^T X + n*nu*I)^{-1} is diagonal.  The public functions accept and
return vectors in the original coordinates; the ``*_rot`` helpers take
rotated vectors and are what the trainers call in their inner loops.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DegenerateColumn,
    NumericalFailure,
    OutOfBracket,
    SingularRegularization,
)
from .linalg import EigenSystem, apply_regularized_inverse

log = logging.getLogger(__name__)

MAX_BISECT = 400
MAX_BRACKET = 2.0**60
PHI_PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class DualState:
    nu: float
    phi: np.ndarray
    k: int
    inner_iters: int


@dataclass(frozen=True)
class ColumnSystem:
    A: np.ndarray
    c: np.ndarray


def nu_floor(es: EigenSystem) -> float:
    """Open lower bound -lambda_min/n of the multiplier."""
    return -es.lambda_min / es.n


def bracket_lower(es: EigenSystem) -> float:
    return _lower_rot(es.eigenvalues, es.n)


def _gradient_rot(lam: np.ndarray, n: int, w: np.ndarray, nu: float) -> float:
    return float(np.sum((w / (lam + n * nu)) ** 2) - 1.0)


def dual_gradient_v1(es: EigenSystem, Xt_b, nu: float, n: int | None = None) -> float:
    """d G_1 / d nu = ||(X^T X + n nu I)^{-1} X^T b||^2 - 1."""
    n = es.n if n is None else n
    if not es.lambda_min + n * nu > 0:
        raise OutOfBracket(f"nu={nu!r} is not above -lambda_min/n={nu_floor(es)!r}")
    return _gradient_rot(es.eigenvalues, n, es.rotate(np.asarray(Xt_b, dtype=np.float64)), nu)


def dual_value_v1(es: EigenSystem, X: np.ndarray, b, nu: float) -> float:
    """Explicit dual function G_1(nu): the Lagrangian at its minimizer over v."""
    b = np.asarray(b, dtype=np.float64)
    n = X.shape[0]
    v = apply_regularized_inverse(es, nu, X.T @ b)
    r = b - X @ v
    return float(r @ r / n + nu * (v @ v - 1.0))


def _bisect_nu_rot(lam: np.ndarray, n: int, w: np.ndarray, eps_b: float, lower: float) -> float:
    if not np.any(w):
        raise DegenerateColumn("right-hand side is zero; no unit-norm stationary point")
    g_lo = _gradient_rot(lam, n, w, lower)
    if g_lo <= eps_b:
        # no interior root: the minimizer sits on the bracket floor (trust-region hard case)
        return lower
    step = 1.0
    hi = lower + step
    while _gradient_rot(lam, n, w, hi) >= 0.0:
        step *= 2.0
        if step > MAX_BRACKET:
            raise NumericalFailure("nu bracket expansion exceeded 2**60")
        hi = lower + step
    lo = lower
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        g = _gradient_rot(lam, n, w, mid)
        if abs(g) <= eps_b:
            return mid
        if g > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_nu(es: EigenSystem, effective_target, n: int | None = None, eps_b: float = 1e-4) -> float:
    """Bisection for the root of the nu-gradient with right-hand side ``effective_target``."""
    n = es.n if n is None else n
    t = np.asarray(effective_target, dtype=np.float64)
    if not np.any(t):
        raise DegenerateColumn("effective target is the zero vector")
    return _bisect_nu_rot(es.eigenvalues, n, es.rotate(t), eps_b, _lower_rot(es.eigenvalues, n))


def _as_columns(prev_cols, d: int) -> np.ndarray:
    if isinstance(prev_cols, np.ndarray) and prev_cols.ndim == 2:
        return np.asarray(prev_cols, dtype=np.float64)
    if len(prev_cols) == 0:
        return np.zeros((d, 0))
    return np.column_stack(prev_cols).astype(np.float64)


def build_column_system(es: EigenSystem, nu_k: float, prev_cols, Xt_b, n: int | None = None) -> ColumnSystem:
    """A_ij = (n/2) v_i^T Z v_j and c_i = v_i^T Z X^T b with Z = (X^T X + n nu I)^{-1}."""
    n = es.n if n is None else n
    P = _as_columns(prev_cols, es.d)
    ZP = np.column_stack([apply_regularized_inverse(es, nu_k, p) for p in P.T]) if P.shape[1] else P
    A = 0.5 * n * (P.T @ ZP)
    A = 0.5 * (A + A.T)
    c = ZP.T @ np.asarray(Xt_b, dtype=np.float64)
    return ColumnSystem(A, c)


def _system_rot(lam, n, nu, Wp, w):
    den = lam + n * nu
    ZW = Wp / den[:, None]
    A = 0.5 * n * (Wp.T @ ZW)
    A = 0.5 * (A + A.T)
    c = ZW.T @ w
    return ColumnSystem(A, c)


def solve_phi(sys: ColumnSystem) -> np.ndarray:
    A, c = sys.A, sys.c
    if A.shape[0] == 0:
        return np.zeros(0)
    try:
        lu_ok = np.linalg.cond(A) < 1.0 / PHI_PIVOT_TOL
    except np.linalg.LinAlgError:
        lu_ok = False
    if lu_ok:
        return np.linalg.solve(A, c)
    return np.linalg.lstsq(A, c, rcond=PHI_PIVOT_TOL)[0]


def _floor_fill(lam: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Hard case: lift ||v|| to one along bottom-eigenvalue directions that ``w`` does not touch."""
    missing = 1.0 - float(v @ v)
    if missing <= 0:
        return v / np.sqrt(v @ v)
    cutoff = lam[0] + 1e-9 * (abs(lam[-1]) + 1.0)
    idx = np.flatnonzero((lam <= cutoff) & (np.abs(w) <= 1e-12 * (np.abs(w).max() + 1e-300)))
    if idx.size:
        e = np.zeros_like(v)
        e[idx[0]] = 1.0
        return v + np.sqrt(missing) * e
    return v / np.sqrt(v @ v)


def _lower_rot(lam: np.ndarray, n: int) -> float:
    return -float(lam[0]) / n + max(1e-12, 1e-9 * (abs(float(lam[-1])) + 1.0) / n)


def solve_column_one_rot(lam, n, w, eps_b):
    nu = _bisect_nu_rot(lam, n, w, eps_b, _lower_rot(lam, n))
    v = w / (lam + n * nu)
    if abs(v @ v - 1.0) > 10 * eps_b:
        v = _floor_fill(lam, v, w)
    return v, nu


def solve_column_one(es: EigenSystem, Xt_b1, n: int | None = None, eps_b: float = 1e-4) -> np.ndarray:
    n = es.n if n is None else n
    w = es.rotate(np.asarray(Xt_b1, dtype=np.float64))
    v, _ = solve_column_one_rot(es.eigenvalues, n, w, eps_b)
    return es.unrotate(v)


def solve_column_k_rot(lam, n, w, Wp, eps_b, eps_u, max_inner):
    k = Wp.shape[1] + 1
    lower = _lower_rot(lam, n)
    phi = np.zeros(k - 1)
    v = w
    nu = lower
    for it in range(1, max_inner + 1):
        r = w - 0.5 * n * (Wp @ phi)
        nu = _bisect_nu_rot(lam, n, r, eps_b, lower)
        phi = solve_phi(_system_rot(lam, n, nu, Wp, w))
        r = w - 0.5 * n * (Wp @ phi)
        if not np.any(r):
            raise DegenerateColumn(f"column {k}: constrained right-hand side vanished")
        v = r / (lam + n * nu)
        if abs(v @ v - 1.0) < eps_u:
            return v, DualState(nu, phi, k, it)
    raise ConvergenceFailure(
        f"column {k}: |v^T v - 1| = {abs(v @ v - 1.0):.3e} after {max_inner} inner iterations",
        v=v,
        state=DualState(nu, phi, k, max_inner),
    )


def solve_column_k(es: EigenSystem, Xt_bk, prev_cols, n: int | None = None, eps_b: float = 1e-4,
                   eps_u: float = 1e-4, max_inner: int = 10):
    """Column k >= 2: alternate nu bisection (fixed Phi) and Phi = A^{-1} c (fixed nu)."""
    n = es.n if n is None else n
    Wp = es.rotate(_as_columns(prev_cols, es.d))
    w = es.rotate(np.asarray(Xt_bk, dtype=np.float64))
    try:
        v, state = solve_column_k_rot(es.eigenvalues, n, w, Wp, eps_b, eps_u, max_inner)
    except ConvergenceFailure as exc:
        exc.v = es.unrotate(exc.v)
        raise
    return es.unrotate(v), state


def complement_basis(Wp: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the (orthonormal) columns of ``Wp``."""
    d, m = Wp.shape
    if m == 0:
        return np.eye(d)
    Q, _ = np.linalg.qr(Wp, mode="complete")
    return Q[:, m:]


def solve_column_restricted_rot(lam, n, w, Wp, eps_b):
    """Exact unit-norm least squares over the complement of ``Wp``.

    Diagonalizes X^T X restricted to the complement, so the multiplier floor
    is the restricted minimum eigenvalue rather than the global one.
    Returns (v, nu).
    """
    Q = complement_basis(Wp)
    if Q.shape[1] == 0:
        raise DegenerateColumn("no directions left orthogonal to the previous columns")
    M = Q.T @ (lam[:, None] * Q)
    mu, Y = np.linalg.eigh(0.5 * (M + M.T))
    R = Q @ Y
    wr = R.T @ w
    if not np.any(wr):
        raise DegenerateColumn("right-hand side has no component orthogonal to previous columns")
    vr, nu = solve_column_one_rot(mu, n, wr, eps_b)
    return R @ vr, nu


def solve_column_restricted(es: EigenSystem, Xt_bk, prev_cols, n: int | None = None, eps_b: float = 1e-4):
    n = es.n if n is None else n
    Wp = es.rotate(_as_columns(prev_cols, es.d))
    v, _ = solve_column_restricted_rot(es.eigenvalues, n, es.rotate(np.asarray(Xt_bk, dtype=np.float64)), Wp, eps_b)
    return es.unrotate(v)

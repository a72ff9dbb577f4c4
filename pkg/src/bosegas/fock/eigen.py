"""Lowest eigenpair of a hermitian sparse matrix."""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import ConvergenceError

DENSE_LIMIT = 2000
DEFAULT_SEED = 12345


@dataclass
class GroundState:
    energy: float
    vector: np.ndarray
    residual: float
    norm_estimate: float
    method: str
    matvecs: int = 0
    residual_history: list = field(default_factory=list)


def _matrix(H):
    return H.matrix if hasattr(H, "matrix") else H


def _norm_bound(A):
    # ‖A‖₂ <= max absolute row sum for a hermitian matrix
    if sp.issparse(A):
        return float(abs(A).sum(axis=1).max()) if A.nnz else 0.0
    return float(np.abs(A).sum(axis=1).max()) if A.size else 0.0


def _dense(A, scale):
    dense = A.toarray() if sp.issparse(A) else np.asarray(A)
    w, V = np.linalg.eigh(dense)
    psi = V[:, 0]
    r = float(np.linalg.norm(dense @ psi - w[0] * psi))
    return GroundState(float(w[0]), psi, r, scale, "dense", 0, [r])


def _lanczos(A, tol, scale, seed, krylov, max_restarts):
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    target = tol * max(scale, 1e-300)
    history = []
    matvecs = 0
    m = min(krylov, n)
    for _ in range(max_restarts):
        V = np.zeros((m + 1, n))
        V[0] = v
        alpha, beta = [], []
        steps = 0
        for j in range(m):
            w = A @ V[j]
            matvecs += 1
            a = float(V[j] @ w)
            w -= a * V[j]
            if j > 0:
                w -= beta[-1] * V[j - 1]
            # full reorthogonalization, applied twice
            for _ in range(2):
                w -= V[:j + 1].T @ (V[:j + 1] @ w)
            b = float(np.linalg.norm(w))
            alpha.append(a)
            steps = j + 1
            if b <= 1e-14 * max(scale, 1.0):
                break
            beta.append(b)
            V[j + 1] = w / b
            if steps % 10 == 0:
                T = np.diag(alpha) + np.diag(beta[:steps - 1], 1) + np.diag(beta[:steps - 1], -1)
                theta, S = np.linalg.eigh(T)
                if abs(b * S[-1, 0]) <= 0.1 * target:
                    break
        k = steps
        T = np.diag(alpha[:k]) + np.diag(beta[:k - 1], 1) + np.diag(beta[:k - 1], -1)
        theta, S = np.linalg.eigh(T)
        x = V[:k].T @ S[:, 0]
        x /= np.linalg.norm(x)
        Ax = A @ x
        matvecs += 1
        E = float(x @ Ax)
        r = float(np.linalg.norm(Ax - E * x))
        history.append(r)
        if r <= target:
            return GroundState(E, x, r, scale, "lanczos", matvecs, history)
        v = x
    raise ConvergenceError(f"Lanczos residual {history[-1]:.3e} above {target:.3e} after "
                           f"{max_restarts} restarts", residuals=history)


def ground_state(H, tol=1e-10, method="auto", seed=DEFAULT_SEED, krylov=150, max_restarts=40):
    """Smallest eigenvalue and normalized eigenvector of a real symmetric matrix.

    The residual ‖Hψ - Eψ‖ is at most ``tol`` times a bound on ‖H‖.  The
    default uses a dense solver up to dimension 2000 and restarted Lanczos
    with full reorthogonalization and a fixed seed above.
    """
    A = _matrix(H)
    n = A.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    scale = _norm_bound(A)
    if method == "dense" or (method == "auto" and n <= DENSE_LIMIT):
        return _dense(A, scale)
    if method not in ("auto", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if n == 1:
        return _dense(A, scale)
    return _lanczos(A, tol, scale, seed, krylov, max_restarts)

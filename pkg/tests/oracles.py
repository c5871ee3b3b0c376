"""Independent reference computations used to cross-check the package.

Everything here deliberately avoids the code paths under test: the Lyapunov
oracles use quadrature and a vectorized linear solve, the KL minimizers use
a null-space Newton method on explicit affine parameterizations, and
derivative checks use central finite differences.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def lyapunov_vectorized(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve A X + X A = Q as one dense linear system via vec(AXB) identities."""
    d = a.shape[0]
    eye = np.eye(d)
    # column-stacking convention: vec(A X) = (I kron A) vec(X), vec(X A) = (A^T kron I) vec(X)
    system = np.kron(eye, a) + np.kron(a.T, eye)
    x = np.linalg.solve(system, q.flatten(order="F"))
    return x.reshape(d, d, order="F")


def lyapunov_quadrature(a: np.ndarray, q: np.ndarray, upper: float = np.inf) -> np.ndarray:
    """Solve A X + X A = Q as the integral of exp(-tA) Q exp(-tA) dt."""
    w, v = np.linalg.eigh(hermitize(a))
    qt = v.conj().T @ q @ v

    def integrand(t: float) -> np.ndarray:
        e = np.exp(-t * w)
        return (e[:, None] * qt * e[None, :]).copy()

    d = a.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            re, _ = integrate.quad(lambda t: integrand(t)[i, j].real, 0.0, upper, limit=200)
            im, _ = integrate.quad(lambda t: integrand(t)[i, j].imag, 0.0, upper, limit=200)
            out[i, j] = re + 1j * im
    return v @ out @ v.conj().T


def _nullspace_newton_kl(a_flat: np.ndarray, b0: np.ndarray, nullspace: np.ndarray,
                         tol: float = 1e-13, max_iters: int = 300) -> np.ndarray:
    """Minimize sum b log(b / a) over b = b0 + N c > 0 by damped Newton."""
    c = np.zeros(nullspace.shape[1])
    for _ in range(max_iters):
        b = b0 + nullspace @ c
        grad = nullspace.T @ (np.log(b / a_flat) + 1.0)
        if np.linalg.norm(grad) <= tol:
            break
        hess = nullspace.T @ (nullspace / b[:, None])
        step = np.linalg.solve(hess, -grad)
        t = 1.0
        f0 = float(np.sum(b * np.log(b / a_flat)))
        while t > 1e-16:
            b_next = b0 + nullspace @ (c + t * step)
            if b_next.min() > 0 and float(np.sum(b_next * np.log(b_next / a_flat))) <= f0 + 1e-4 * t * float(grad @ step):
                break
            t /= 2.0
        c = c + t * step
    return b0 + nullspace @ c


def kl_projection_row_sums(a: np.ndarray, row_sum: float) -> np.ndarray:
    """argmin of sum B log(B/A) over positive B with prescribed row sums."""
    m, n = a.shape
    out = np.zeros_like(a, dtype=float)
    directions = np.zeros((n, n - 1))
    for k in range(n - 1):
        directions[k, k] = 1.0
        directions[k + 1, k] = -1.0
    for i in range(m):
        b0 = np.full(n, row_sum / n)
        out[i] = _nullspace_newton_kl(a[i].astype(float), b0, directions)
    return out


def min_kl_doubly_stochastic(a: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimal KL divergence to ``a`` over matrices with row sums 1/m and
    column sums 1/n, via Newton on an explicit null-space parameterization."""
    m, n = a.shape

    def simplex_dirs(d: int) -> list[np.ndarray]:
        dirs = []
        for k in range(d - 1):
            u = np.zeros(d)
            u[k] = 1.0
            u[k + 1] = -1.0
            dirs.append(u)
        return dirs

    columns = [np.outer(u, v).flatten() for u in simplex_dirs(m) for v in simplex_dirs(n)]
    nullspace = np.array(columns).T
    b0 = np.full(m * n, 1.0 / (m * n))
    b = _nullspace_newton_kl(a.flatten().astype(float), b0, nullspace)
    value = float(np.sum(b * np.log(b / a.flatten())))
    return value, b.reshape(m, n)


def central_difference(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def matrix_central_difference(f, x: float, h: float) -> np.ndarray:
    return (f(x + h) - f(x - h)) / (2.0 * h)

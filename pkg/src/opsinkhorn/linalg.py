"""Dense complex Hermitian linear algebra.

Everything is built on a single primitive, the Hermitian eigendecomposition:
matrix functions, the Lyapunov solver and geometric means all go through
``herm_eig``.  Dimensions in this package are small (tens at most), so
uniformity of the numerical pathway matters more than speed.

Conventions for partitioned matrices: an ``mn x mn`` matrix is read as an
``n x n`` grid of ``m x m`` blocks (outer index of dimension ``n``).
``partial_trace(M, n, m, "first")`` sums the ``n`` diagonal blocks and
returns an ``m x m`` matrix; ``"second"`` returns the ``n x n`` matrix of
block traces.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, InvalidInputError, SingularityError
from .policy import get_policy

__all__ = [
    "hermitian_part",
    "as_hermitian",
    "herm_eig",
    "SpectralDecomposition",
    "matrix_function",
    "sqrtm",
    "logm",
    "expm",
    "powm",
    "invm",
    "is_positive_definite",
    "assert_positive_definite",
    "solve_lyapunov",
    "geometric_mean",
    "kron",
    "partial_trace",
    "hermitian_basis",
    "frobenius",
]


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(a))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """(A + A^dagger) / 2."""
    return (a + a.conj().T) / 2


def as_hermitian(a: np.ndarray, *, atol: float | None = None, what: str = "matrix") -> np.ndarray:
    """Validate that ``a`` is Hermitian within ``atol`` and return it exactly
    symmetrized.

    Downstream code assumes exact Hermiticity, so every constructor funnels
    through here; the symmetrization prevents asymmetry from accumulating over
    long iterations.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{what} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise InvalidInputError(f"{what} contains non-finite entries")
    tol = get_policy().hermitian_atol if atol is None else atol
    gap = np.abs(a - a.conj().T).max()
    if gap > tol:
        raise InvalidInputError(f"{what} is not Hermitian: max |A - A^dagger| = {gap:.3e} > {tol:.1e}")
    return hermitian_part(a)


class SpectralDecomposition(NamedTuple):
    """Eigendecomposition A = P diag(eigenvalues) P^dagger, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return hermitian_part((self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T)


def herm_eig(a: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_hermitian(a)
    w, v = np.linalg.eigh(a)
    return SpectralDecomposition(w, v)


def _spectral_apply(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    w, v = herm_eig(a)
    return hermitian_part((v * f(w)) @ v.conj().T)


def _check_domain(w: np.ndarray, predicate: Callable[[np.ndarray], np.ndarray], name: str) -> None:
    bad = ~predicate(w)
    if np.any(bad):
        raise DomainError(f"eigenvalue {w[bad][0]:.6e} outside the domain of {name}")


def matrix_function(a: np.ndarray, name: str, t: float | None = None) -> np.ndarray:
    """Spectral matrix function f(A) = P f(Lambda) P^dagger.

    ``name`` is one of ``sqrt``, ``log``, ``exp``, ``inverse`` or ``power``
    (the latter takes the exponent ``t``).  Eigenvalues are checked against
    the function's domain; small negatives inside the domain tolerance are
    clipped to zero for ``sqrt`` and nonnegative powers.
    """
    w, v = herm_eig(a)
    pol = get_policy()
    floor = pol.pd_rel_floor * max(np.abs(w).max(), np.finfo(float).tiny)

    if name == "sqrt":
        _check_domain(w, lambda x: x >= -pol.domain_atol, "sqrt")
        fw = np.sqrt(np.clip(w, 0.0, None))
    elif name == "log":
        _check_domain(w, lambda x: x > floor, "log")
        fw = np.log(w)
    elif name == "exp":
        fw = np.exp(w)
    elif name == "inverse":
        _check_domain(w, lambda x: x > floor, "inverse")
        fw = 1.0 / w
    elif name == "power":
        if t is None:
            raise InvalidInputError("power requires an exponent t")
        if t < 0 or (t != int(t) and t > 0):
            # fractional or negative powers need a nonnegative / positive spectrum
            if t < 0:
                _check_domain(w, lambda x: x > floor, f"power({t})")
            else:
                _check_domain(w, lambda x: x >= -pol.domain_atol, f"power({t})")
                w = np.clip(w, 0.0, None)
        fw = np.power(w, t)
    else:
        raise InvalidInputError(f"unknown matrix function tag {name!r}")
    return hermitian_part((v * fw) @ v.conj().T)


def sqrtm(a: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix."""
    return matrix_function(a, "sqrt")


def logm(a: np.ndarray) -> np.ndarray:
    """Matrix logarithm of a positive definite matrix."""
    return matrix_function(a, "log")


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix."""
    return matrix_function(a, "exp")


def powm(a: np.ndarray, t: float) -> np.ndarray:
    """Matrix power A^t of a positive (semi)definite matrix."""
    return matrix_function(a, "power", t)


def invm(a: np.ndarray) -> np.ndarray:
    """Inverse of a nonsingular Hermitian matrix via its spectrum."""
    return matrix_function(a, "inverse")


def is_positive_definite(a: np.ndarray) -> bool:
    """Positive definite under the policy floor: min eig > floor * max eig."""
    w = np.linalg.eigvalsh(as_hermitian(a))
    return bool(w[0] > get_policy().pd_rel_floor * max(w[-1], np.finfo(float).tiny))


def assert_positive_definite(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Return ``a`` symmetrized, raising ``SingularityError`` if not PD.

    No regularization is applied: a near-singular input is an error, never
    silently floored, so that reference comparisons stay meaningful.
    """
    a = as_hermitian(a, what=what)
    w = np.linalg.eigvalsh(a)
    if w[0] <= get_policy().pd_rel_floor * max(w[-1], np.finfo(float).tiny):
        raise SingularityError(f"{what} is not positive definite (min eigenvalue {w[0]:.3e})")
    return a


def solve_lyapunov(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Unique Hermitian solution X of A X + X A = Q for positive definite A.

    Solved in the eigenbasis of A: with A = P diag(lam) P^dagger and
    Qt = P^dagger Q P, the solution is Xt_ij = Qt_ij / (lam_i + lam_j).
    """
    a = assert_positive_definite(a, "Lyapunov coefficient")
    q = as_hermitian(q, what="Lyapunov right-hand side")
    if a.shape != q.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {q.shape}")
    w, v = np.linalg.eigh(a)
    qt = v.conj().T @ q @ v
    xt = qt / (w[:, None] + w[None, :])
    return hermitian_part(v @ xt @ v.conj().T)


def geometric_mean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix geometric mean A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}.

    The result is the unique positive definite solution X of the Riccati
    equation X A^{-1} X = B, and is symmetric in its arguments.
    """
    a = assert_positive_definite(a, "geometric mean left argument")
    b = assert_positive_definite(b, "geometric mean right argument")
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    r = powm(a, 0.5)
    ri = powm(a, -0.5)
    # the conjugated middle factor is Hermitian in exact arithmetic; symmetrize
    # so rounding from ill-conditioned inputs cannot trip the constructor
    middle = hermitian_part(ri @ b @ ri)
    return hermitian_part(r @ powm(middle, 0.5) @ r)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the outer index taken from ``a``."""
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(mat: np.ndarray, n: int, m: int, which: str) -> np.ndarray:
    """Partial trace of an ``mn x mn`` matrix with n outer blocks of size m.

    ``which="first"`` sums the diagonal blocks (m x m result); ``"second"``
    takes the trace of each block (n x n result).
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (n * m, n * m):
        raise InvalidInputError(f"expected shape {(n * m, n * m)}, got {mat.shape}")
    blocks = mat.reshape(n, m, n, m)
    if which == "first":
        return np.einsum("iaib->ab", blocks)
    if which == "second":
        return np.einsum("iaja->ij", blocks)
    raise InvalidInputError(f"which must be 'first' or 'second', got {which!r}")


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis of d x d Hermitian matrices (Hilbert-Schmidt inner
    product): diagonal units, then real and imaginary off-diagonal pairs."""
    basis: list[np.ndarray] = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = inv_sqrt2
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j * inv_sqrt2
            e[j, i] = 1j * inv_sqrt2
            basis.append(e)
    return basis

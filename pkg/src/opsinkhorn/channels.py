"""Completely positive maps: Kraus form, Choi representation, scaling.

A CP map Phi: C^{n x n} -> C^{m x m} with Kraus operators ``A_k`` (all
``m x n``) acts as Phi(X) = sum_k A_k X A_k^dagger.  Its Choi matrix is the
``mn x mn`` block matrix whose (i, j) block of size m is Phi(E_ij); the map
is completely positive exactly when this matrix is positive semidefinite.

Block orientation is fixed package-wide: the outer (block) index has
dimension ``n`` (the input side), the inner dimension is ``m`` (the output
side).  Hence ``tr_first CH(Phi) = Phi(I_n)``, while ``tr_second CH(Phi)``
equals the transpose of ``Phi^*(I_m)`` (the two coincide for real maps).
The scaling algorithms work directly with the partial traces, so this
distinction never leaks into them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InvalidInputError
from .policy import get_policy

__all__ = [
    "KrausMap",
    "ChoiMatrix",
    "choi_from_kraus",
    "apply_map",
    "apply_dual",
    "scale_choi",
    "random_density",
    "random_choi",
    "as_density",
]


@dataclass(frozen=True)
class KrausMap:
    """A completely positive map given by a non-empty list of m x n operators."""

    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.ops) == 0:
            raise InvalidInputError("a Kraus map needs at least one operator")
        shape = self.ops[0].shape
        ops = []
        for op in self.ops:
            op = np.asarray(op, dtype=complex)
            if op.ndim != 2 or op.shape != shape:
                raise InvalidInputError("all Kraus operators must share one m x n shape")
            ops.append(op)
        object.__setattr__(self, "ops", tuple(ops))

    @property
    def out_dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def in_dim(self) -> int:
        return self.ops[0].shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Phi(X) = sum_k A_k X A_k^dagger."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.in_dim, self.in_dim):
            raise InvalidInputError(f"expected {self.in_dim} x {self.in_dim} input, got {x.shape}")
        return sum(a @ x @ a.conj().T for a in self.ops)

    def apply_dual(self, y: np.ndarray) -> np.ndarray:
        """Phi^*(Y) = sum_k A_k^dagger Y A_k."""
        y = np.asarray(y, dtype=complex)
        if y.shape != (self.out_dim, self.out_dim):
            raise InvalidInputError(f"expected {self.out_dim} x {self.out_dim} input, got {y.shape}")
        return sum(a.conj().T @ y @ a for a in self.ops)


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix with its block dimensions (n outer blocks of size m).

    The matrix is validated to be Hermitian and positive semidefinite at
    construction and stored exactly Hermitian.
    """

    n: int
    m: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidInputError("Choi dimensions must be positive")
        mat = linalg.as_hermitian(self.matrix, what="Choi matrix")
        if mat.shape != (self.n * self.m, self.n * self.m):
            raise InvalidInputError(
                f"Choi matrix of shape {mat.shape} inconsistent with n={self.n}, m={self.m}"
            )
        w = np.linalg.eigvalsh(mat)
        if w[0] < -get_policy().psd_rtol * max(abs(w[-1]), np.finfo(float).tiny):
            raise InvalidInputError(f"Choi matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.n * self.m

    def blocks(self) -> np.ndarray:
        """View as an (n, m, n, m) block array."""
        return self.matrix.reshape(self.n, self.m, self.n, self.m)

    def trace_first(self) -> np.ndarray:
        """Sum of diagonal blocks; equals Phi(I_n)."""
        return linalg.partial_trace(self.matrix, self.n, self.m, "first")

    def trace_second(self) -> np.ndarray:
        """Blockwise traces; equals Phi^*(I_m)."""
        return linalg.partial_trace(self.matrix, self.n, self.m, "second")


def as_density(mat: np.ndarray, what: str = "density matrix") -> np.ndarray:
    """Validate a positive definite, trace-one Hermitian matrix."""
    mat = linalg.assert_positive_definite(mat, what)
    tr = float(np.trace(mat).real)
    if abs(tr - 1.0) > get_policy().trace_atol:
        raise InvalidInputError(f"{what} has trace {tr!r}, expected 1")
    return mat


def choi_from_kraus(kraus: KrausMap) -> ChoiMatrix:
    """CH(Phi) = sum_ij E_ij (x) Phi(E_ij), assembled blockwise.

    Block (i, j) is sum_k A_k E_ij A_k^dagger = sum_k (col_j A_k)(col_i A_k)^dagger,
    i.e. the Choi matrix is sum_k vec_k vec_k^dagger for the column-stacked
    Kraus operators, which makes positive semidefiniteness explicit.
    """
    n, m = kraus.in_dim, kraus.out_dim
    choi = np.zeros((n * m, n * m), dtype=complex)
    for a in kraus.ops:
        # stacking columns of A gives the vector |A> with <i a|A> = A[a, i]
        vec = a.T.reshape(-1)
        choi += np.outer(vec, vec.conj())
    return ChoiMatrix(n=n, m=m, matrix=choi)


def apply_map(choi: ChoiMatrix, x: np.ndarray) -> np.ndarray:
    """Evaluate Phi(X) from the Choi matrix.

    Equals tr_first((X^T kron I_m) CH(Phi)); computed blockwise as
    sum_jk X_jk Phi(E_jk).
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (choi.n, choi.n):
        raise InvalidInputError(f"expected {choi.n} x {choi.n} input, got {x.shape}")
    return np.einsum("jk,jakb->ab", x, choi.blocks())


def apply_dual(choi: ChoiMatrix, y: np.ndarray) -> np.ndarray:
    """Evaluate the dual map Phi^*(Y), defined by tr(Y Phi(X)) = tr(Phi^*(Y) X).

    Entrywise, Phi^*(Y)_ij = tr(Y Phi(E_ji)).  Note that Phi^*(I_m) equals the
    transpose of ``trace_second`` of the Choi matrix; the two coincide for
    maps with real Kraus operators.
    """
    y = np.asarray(y, dtype=complex)
    if y.shape != (choi.m, choi.m):
        raise InvalidInputError(f"expected {choi.m} x {choi.m} input, got {y.shape}")
    return np.einsum("ab,jbia->ij", y, choi.blocks())


def scale_choi(choi: ChoiMatrix, left: np.ndarray, right: np.ndarray) -> ChoiMatrix:
    """Choi matrix of the scaled map X -> L Phi(R^dagger X R) L^dagger.

    For Hermitian L (m x m) and R (n x n) this is the congruence
    (R kron L) CH(Phi) (R kron L).
    """
    left = linalg.as_hermitian(left, what="left scaling factor")
    right = linalg.as_hermitian(right, what="right scaling factor")
    if left.shape != (choi.m, choi.m) or right.shape != (choi.n, choi.n):
        raise InvalidInputError(
            f"scaling factors must be {choi.m} x {choi.m} and {choi.n} x {choi.n}"
        )
    f = linalg.kron(right, left)
    scaled = linalg.hermitian_part(f @ choi.matrix @ f)
    return ChoiMatrix(n=choi.n, m=choi.m, matrix=scaled)


def random_density(dim: int, rng: np.random.Generator, *, real: bool = False) -> np.ndarray:
    """Random density matrix P^dagger P / tr(P^dagger P) from a Ginibre P.

    ``real=False`` draws independent standard complex Gaussians (the default;
    the resulting ensemble is unitarily invariant with mean I/dim), ``real=True``
    draws real standard Gaussians.
    """
    if dim < 1:
        raise InvalidInputError("dimension must be at least 1")
    if real:
        p = rng.standard_normal((dim, dim))
    else:
        p = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    rho = p.conj().T @ p
    rho = linalg.hermitian_part(rho / np.trace(rho).real)
    return rho


def random_choi(n: int, m: int, rng: np.random.Generator, *, real: bool = False) -> ChoiMatrix:
    """Random positive definite, trace-one Choi matrix of block shape (n, m)."""
    return ChoiMatrix(n=n, m=m, matrix=random_density(n * m, rng, real=real))

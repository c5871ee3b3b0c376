"""Tangent vectors, Riemannian metrics and e-geodesics on density matrices.

Three metrics are supported, identified by string tags:

``"sld"``
    g(X, Y) = tr(X_e Y_m) where the e-representation X_e is the Hermitian
    solution of the Lyapunov equation X_e rho + rho X_e = 2 X_m.
``"bkm"``
    g(X, Y) = tr(X_m dlog_rho[Y_m]) with dlog the Frechet derivative of the
    matrix logarithm at rho.
``"congruence"``
    g(X, Y) = tr(rho^{-1} X_m rho^{-1} Y_m) on the positive definite cone.

Every metric comes with an explicit e-geodesic between positive definite
trace-one matrices, and ``orthogonality_residual`` certifies whether the
e-geodesic reaching a point of a partial-trace constraint set meets it
orthogonally, which characterizes e-projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .channels import ChoiMatrix, as_density
from .errors import InvalidInputError, SingularityError
from .policy import get_policy

__all__ = [
    "METRICS",
    "TangentVector",
    "ConstraintSet",
    "sld_e_rep",
    "dlog_frechet",
    "dexp_frechet",
    "metric_inner",
    "e_geodesic",
    "sld_parallel_transport",
    "constraint_tangent_basis",
    "orthogonality_residual",
]

METRICS = ("sld", "bkm", "congruence")


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector at a density matrix, stored in m-representation.

    The m-representation is the raw directional derivative of the state, a
    traceless Hermitian matrix.
    """

    base: np.ndarray
    m_rep: np.ndarray

    def __post_init__(self):
        base = as_density(self.base, "tangent base point")
        m_rep = linalg.as_hermitian(self.m_rep, what="m-representation")
        if m_rep.shape != base.shape:
            raise InvalidInputError("tangent and base dimensions differ")
        tr = abs(np.trace(m_rep))
        if tr > get_policy().trace_atol:
            raise InvalidInputError(f"m-representation has trace {tr:.3e}, expected 0")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "m_rep", m_rep)


@dataclass(frozen=True)
class ConstraintSet:
    """Partial-trace constraint set {rho : tr_side rho = target}.

    ``side`` is ``"first"`` (target m x m) or ``"second"`` (target n x n);
    the target must be positive definite with unit trace.
    """

    side: str
    target: np.ndarray

    def __post_init__(self):
        if self.side not in ("first", "second"):
            raise InvalidInputError(f"side must be 'first' or 'second', got {self.side!r}")
        object.__setattr__(self, "target", as_density(self.target, "constraint target"))

    def violation(self, choi: ChoiMatrix) -> float:
        marg = choi.trace_first() if self.side == "first" else choi.trace_second()
        return linalg.frobenius(marg - self.target)


def sld_e_rep(x: TangentVector) -> np.ndarray:
    """Symmetric logarithmic derivative: the Hermitian E with
    E rho + rho E = 2 X_m."""
    return linalg.solve_lyapunov(x.base, 2.0 * x.m_rep)


def _divided_differences(w: np.ndarray, f, fprime) -> np.ndarray:
    """Loewner matrix of first divided differences of ``f`` on the spectrum."""
    num = f(w)[:, None] - f(w)[None, :]
    den = w[:, None] - w[None, :]
    scale = np.maximum(np.abs(w)[:, None], np.abs(w)[None, :])
    near = np.abs(den) <= 1e-12 * np.maximum(scale, 1.0)
    mid = fprime((w[:, None] + w[None, :]) / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(near, mid, num / np.where(near, 1.0, den))
    return phi


def dlog_frechet(rho: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Frechet derivative of the matrix logarithm at ``rho`` along ``direction``.

    Computed by Daleckii-Krein divided differences in the eigenbasis of rho.
    """
    rho = linalg.assert_positive_definite(rho, "dlog base point")
    direction = linalg.as_hermitian(direction, what="dlog direction")
    w, v = np.linalg.eigh(rho)
    phi = _divided_differences(w, np.log, lambda x: 1.0 / x)
    d = v.conj().T @ direction @ v
    return linalg.hermitian_part(v @ (phi * d) @ v.conj().T)


def dexp_frechet(h: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Frechet derivative of the matrix exponential at Hermitian ``h``."""
    h = linalg.as_hermitian(h, what="dexp base point")
    direction = linalg.as_hermitian(direction, what="dexp direction")
    w, v = np.linalg.eigh(h)
    phi = _divided_differences(w, np.exp, np.exp)
    d = v.conj().T @ direction @ v
    return linalg.hermitian_part(v @ (phi * d) @ v.conj().T)


def _check_same_base(x: TangentVector, y: TangentVector) -> None:
    if x.base.shape != y.base.shape or np.abs(x.base - y.base).max() > 1e-12:
        raise InvalidInputError("tangent vectors live at different base points")


def metric_inner(tag: str, x: TangentVector, y: TangentVector) -> float:
    """Inner product of two tangent vectors at a common base point."""
    _check_same_base(x, y)
    rho = x.base
    if tag == "sld":
        return float(np.trace(sld_e_rep(x) @ y.m_rep).real)
    if tag == "bkm":
        return float(np.trace(x.m_rep @ dlog_frechet(rho, y.m_rep)).real)
    if tag == "congruence":
        rinv = linalg.invm(rho)
        return float(np.trace(rinv @ x.m_rep @ rinv @ y.m_rep).real)
    raise InvalidInputError(f"unknown metric tag {tag!r}")


def e_geodesic(tag: str, rho1: np.ndarray, rho2: np.ndarray, t: float) -> np.ndarray:
    """Point at parameter ``t`` of the e-geodesic from rho1 to rho2.

    sld:        rho(t) = C(t) K^t rho1 K^t with K = rho1^{-1} # rho2;
    bkm:        rho(t) = C(t) exp((1-t) log rho1 + t log rho2);
    congruence: rho(t) = ((1-t) rho1^{-1} + t rho2^{-1})^{-1}, renormalized.

    All three satisfy rho(0) = rho1 and rho(1) = rho2 exactly.  Values of
    ``t`` outside [0, 1] extrapolate; the congruence resolvent may then leave
    the positive cone, which raises ``SingularityError``.
    """
    rho1 = as_density(rho1, "geodesic endpoint rho1")
    rho2 = as_density(rho2, "geodesic endpoint rho2")
    if rho1.shape != rho2.shape:
        raise InvalidInputError("geodesic endpoints have different dimensions")
    if tag == "sld":
        k = linalg.geometric_mean(linalg.invm(rho1), rho2)
        kt = linalg.powm(k, t)
        curve = kt @ rho1 @ kt
    elif tag == "bkm":
        curve = linalg.expm((1.0 - t) * linalg.logm(rho1) + t * linalg.logm(rho2))
    elif tag == "congruence":
        resolvent = (1.0 - t) * linalg.invm(rho1) + t * linalg.invm(rho2)
        w = np.linalg.eigvalsh(linalg.hermitian_part(resolvent))
        if w[0] <= get_policy().pd_rel_floor * max(abs(w[-1]), np.finfo(float).tiny):
            raise SingularityError(f"congruence geodesic leaves the cone at t={t}")
        curve = linalg.invm(linalg.hermitian_part(resolvent))
    else:
        raise InvalidInputError(f"unknown metric tag {tag!r}")
    curve = linalg.hermitian_part(curve)
    return curve / np.trace(curve).real


def sld_parallel_transport(l: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """e-parallel transport of an e-representation to the state ``sigma``:
    L - tr(sigma L) I."""
    l = linalg.as_hermitian(l, what="e-representation")
    sigma = as_density(sigma, "transport target")
    return l - np.trace(sigma @ l).real * np.eye(l.shape[0])


@lru_cache(maxsize=None)
def _cached_basis(n: int, m: int, side: str) -> tuple[np.ndarray, ...]:
    dim = n * m
    if side == "first":
        fixed = [linalg.kron(np.eye(n), f) / np.sqrt(n) for f in linalg.hermitian_basis(m)]
    else:
        fixed = [linalg.kron(f, np.eye(m)) / np.sqrt(m) for f in linalg.hermitian_basis(n)]
    basis: list[np.ndarray] = []
    for cand in linalg.hermitian_basis(dim):
        y = cand.astype(complex)
        # remove the orthogonal complement of the constraint kernel, then
        # Gram-Schmidt against what is already collected
        for g in fixed:
            y = y - np.vdot(g, y) * g
        for z in basis:
            y = y - np.vdot(z, y) * z
        norm = np.linalg.norm(y)
        if norm > 1e-8:
            basis.append(y / norm)
    assert len(basis) == dim * dim - (m * m if side == "first" else n * n)
    return tuple(basis)


def constraint_tangent_basis(n: int, m: int, side: str) -> tuple[np.ndarray, ...]:
    """Orthonormal basis of the tangent space of a partial-trace constraint
    set: Hermitian mn x mn matrices Y with tr_side Y = 0.

    Built by Gram-Schmidt over the canonical Hermitian basis after projecting
    out span{I kron F} (side "first") or span{F kron I} (side "second"),
    whose orthogonal complement is exactly the constrained subspace.
    """
    if side not in ("first", "second"):
        raise InvalidInputError(f"side must be 'first' or 'second', got {side!r}")
    return _cached_basis(n, m, side)


def _geodesic_tail(tag: str, rho_from: np.ndarray, rho_to: np.ndarray) -> tuple[np.ndarray, float]:
    """e-representation of the e-geodesic tangent at its endpoint rho_to,
    together with its metric norm.

    The e-representation is centered so that the corresponding m-representation
    is traceless; pairings against traceless directions are unaffected.
    """
    dim = rho_to.shape[0]
    eye = np.eye(dim)
    if tag == "sld":
        k = linalg.geometric_mean(linalg.invm(rho_from), rho_to)
        e = 2.0 * linalg.logm(k)
        e = e - np.trace(rho_to @ e).real * eye
        m_rep = linalg.hermitian_part(e @ rho_to + rho_to @ e) / 2.0
    elif tag == "bkm":
        dot = linalg.logm(rho_to) - linalg.logm(rho_from)
        e = dot - np.trace(rho_to @ dot).real * eye
        m_rep = dexp_frechet(linalg.logm(rho_to), e)
    elif tag == "congruence":
        # tangent of the resolvent curve: d/dt S(t)^{-1} = rho_to^{-1} - rho_from^{-1};
        # the corresponding m-representation is -S e S, and the metric norm
        # reduces to tr(e S e S)
        e = linalg.invm(rho_to) - linalg.invm(rho_from)
        norm = float(np.sqrt(max(np.trace(e @ rho_to @ e @ rho_to).real, 0.0)))
        return e, norm
    else:
        raise InvalidInputError(f"unknown metric tag {tag!r}")
    norm = float(np.sqrt(max(np.trace(e @ m_rep).real, 0.0)))
    return e, norm


def orthogonality_residual(
    tag: str, rho_from: ChoiMatrix, rho_to: ChoiMatrix, constraint: ConstraintSet
) -> float:
    """Normalized orthogonality defect of the e-geodesic from ``rho_from`` to
    ``rho_to`` against the tangent space of ``constraint`` at ``rho_to``.

    Returns max_b |g(tangent, Y_b)| / ||tangent||_g over an orthonormal basis
    {Y_b} of the constraint tangent space.  A vanishing residual certifies
    that ``rho_to`` is the e-projection of ``rho_from`` onto the constraint
    set for the chosen metric.
    """
    if (rho_from.n, rho_from.m) != (rho_to.n, rho_to.m):
        raise InvalidInputError("Choi block structures differ")
    violation = constraint.violation(rho_to)
    if violation > get_policy().constraint_atol:
        raise InvalidInputError(
            f"rho_to violates the marginal constraint by {violation:.3e}"
        )
    e, norm = _geodesic_tail(tag, rho_from.matrix, rho_to.matrix)
    if norm == 0.0:
        return 0.0
    basis = constraint_tangent_basis(rho_to.n, rho_to.m, constraint.side)
    # |g(tangent, Y)| reduces to |tr(e Y)| for every tag (for the congruence
    # metric the pairing carries a sign, absorbed by the absolute value)
    worst = max(abs(np.trace(e @ y).real) for y in basis)
    return worst / norm

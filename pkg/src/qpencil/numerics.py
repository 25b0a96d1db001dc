"""Dense complex linear algebra used throughout the package.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Decompositions are delegated to LAPACK through numpy/scipy; this module adds
input validation, tolerance handling and the error semantics the rest of the
package relies on.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import ContractError, IllConditionedError, NumericalError

__all__ = [
    "NumericsConfig",
    "DEFAULT_CONFIG",
    "SvdResult",
    "as_matrix",
    "as_vector",
    "svd",
    "eig_general",
    "eig_hermitian",
    "evolve",
    "lstsq",
    "partial_trace_first",
    "spectral_norm",
    "trace_norm",
]


@dataclass(frozen=True)
class NumericsConfig:
    """Tolerances shared by the kernels. All are relative to input scale."""

    hermitian_tol: float = 1e-12
    zero_singular_tol: float = 1e-14
    lstsq_max_cond: float = 1e12
    residual_tol: float = 1e-8
    psd_floor: float = 1e-10
    trace_tol: float = 1e-12


DEFAULT_CONFIG = NumericsConfig()


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.s) @ self.v.conj().T

    @property
    def rank_upper(self):
        return self.s.shape[0]


def as_matrix(a, name="matrix"):
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise ContractError(f"{name} must be a nonempty 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} has non-finite entries")
    return arr


def as_vector(x, name="vector"):
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ContractError(f"{name} must be a nonempty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} has non-finite entries")
    return arr


def spectral_norm(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def trace_norm(a):
    """Sum of singular values; for Hermitian input, sum of |eigenvalues|."""
    return float(np.sum(np.linalg.svd(np.asarray(a), compute_uv=False)))


def svd(a):
    """Thin SVD with singular values in descending order."""
    a = as_matrix(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return SvdResult(u=u, s=s, v=vh.conj().T)


def eig_general(a):
    """Eigenvalues and right eigenvectors (columns) of a square matrix.

    LAPACK's Hessenberg-QR path (``zgeev``) is used. Returns ``(values,
    vectors)`` with unit-norm eigenvector columns.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ContractError(f"eig_general needs a square matrix, got {a.shape}")
    try:
        w, x = scipy.linalg.eig(a, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc
    return w, x


def _check_hermitian(h, tol):
    scale = np.max(np.abs(h))
    if scale == 0.0:
        return
    dev = np.max(np.abs(h - h.conj().T))
    if dev > tol * scale:
        raise ContractError(f"matrix is not Hermitian (max |H - H^dagger| = {dev:.3e})")


def eig_hermitian(h, config=DEFAULT_CONFIG):
    """Ascending real eigenvalues and a unitary eigenvector matrix."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ContractError(f"eig_hermitian needs a square matrix, got {h.shape}")
    _check_hermitian(h, config.hermitian_tol)
    h = 0.5 * (h + h.conj().T)
    try:
        lam, q = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver did not converge: {exc}") from exc
    return lam, q


def evolve(h, t, psi=None, config=DEFAULT_CONFIG):
    """``exp(-i h t)``, or its action on ``psi`` when a state is given."""
    lam, q = eig_hermitian(h, config)
    phases = np.exp(-1j * lam * t)
    if psi is None:
        return (q * phases) @ q.conj().T
    psi = as_vector(psi, "psi")
    if psi.shape[0] != q.shape[0]:
        raise ContractError(f"state has length {psi.shape[0]}, operator is {q.shape[0]}-dimensional")
    return q @ (phases * (q.conj().T @ psi))


def lstsq(a, b, config=DEFAULT_CONFIG):
    """Least-squares solution of ``a x = b`` for a tall full-rank ``a``.

    Raises :class:`IllConditionedError` when the 2-norm condition number
    exceeds ``config.lstsq_max_cond``.
    """
    a = as_matrix(a, "A")
    b = as_vector(b, "b")
    rows, cols = a.shape
    if rows < cols:
        raise ContractError(f"lstsq needs rows >= cols, got {a.shape}")
    if b.shape[0] != rows:
        raise ContractError(f"right-hand side has length {b.shape[0]}, expected {rows}")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    if not cond <= config.lstsq_max_cond:
        raise IllConditionedError(
            f"least-squares matrix is rank deficient (cond = {cond:.3e})", cond=cond
        )
    return vh.conj().T @ ((u.conj().T @ b) / s)


def partial_trace_first(rho, dim_a, dim_b, config=DEFAULT_CONFIG):
    """Trace out the first tensor factor of a ``(dim_a*dim_b)``-square matrix."""
    rho = as_matrix(rho, "rho")
    n = dim_a * dim_b
    if rho.shape != (n, n):
        raise ContractError(f"expected a {n}x{n} matrix for dims ({dim_a}, {dim_b}), got {rho.shape}")
    return kernels.partial_trace_first(rho, dim_a, dim_b)

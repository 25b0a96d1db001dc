"""Hankel pair, Vandermonde factors, Hermitian extension and norm diagnostics."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractError
from .numerics import as_matrix, spectral_norm

__all__ = [
    "HankelPair",
    "ExtendedMatrix",
    "VandermondeFactors",
    "BerryDiagnostics",
    "build_hankel_pair",
    "vandermonde_factorization",
    "extend",
    "berry_diagnostics",
]


@dataclass(frozen=True, eq=False)
class HankelPair:
    f1: np.ndarray
    f2: np.ndarray
    dt: float = 1.0

    @property
    def size(self):
        return self.f1.shape[0]


@dataclass(frozen=True, eq=False)
class ExtendedMatrix:
    """Hermitian embedding ``[[0, F], [F^dagger, 0]]`` of a square ``F``."""

    matrix: np.ndarray
    block: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def half(self):
        return self.block.shape[0]


@dataclass(frozen=True, eq=False)
class VandermondeFactors:
    m: np.ndarray
    dc: np.ndarray
    dmu: np.ndarray

    def f1(self):
        return self.m @ np.diag(self.dc) @ self.m.T

    def f2(self):
        return self.m @ np.diag(self.dc * self.dmu) @ self.m.T


def build_hankel_pair(signal):
    """``f1[j, k] = f[j+k]`` and ``f2[j, k] = f[j+k+1]``, both ``n/2`` square."""
    n = signal.n
    if n % 2 or n < 4:
        raise ContractError(f"need an even number of samples >= 4, got {n}")
    m = n // 2
    f = signal.samples
    return HankelPair(kernels.hankel(f, 0, m), kernels.hankel(f, 1, m), signal.dt)


def vandermonde_factorization(model):
    """Factors with ``F1 = M Dc M^T`` and ``F2 = M Dc Dmu M^T`` (plain transpose)."""
    mus = model.mus
    return VandermondeFactors(m=kernels.vandermonde(mus, model.n // 2),
                              dc=model.coeffs.copy(), dmu=mus)


def extend(f):
    f = np.asarray(getattr(f, "block", f))
    f = as_matrix(f, "F")
    if f.shape[0] != f.shape[1]:
        raise ContractError(f"extend needs a square matrix, got {f.shape}")
    m = f.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    out[:m, m:] = f
    out[m:, :m] = f.conj().T
    return ExtendedMatrix(matrix=out, block=f)


@dataclass(frozen=True)
class BerryDiagnostics:
    lambda_spec: float
    lambda_one: float
    lambda_max: float
    sparsity: int
    query_estimate: float
    time_condition: bool
    step_condition: bool
    gershgorin_condition: bool

    @property
    def conditions(self):
        return (self.time_condition, self.step_condition, self.gershgorin_condition)

    def as_dict(self):
        return {
            "lambda_spec": self.lambda_spec,
            "lambda_one": self.lambda_one,
            "lambda_max": self.lambda_max,
            "sparsity": self.sparsity,
            "query_estimate": self.query_estimate,
            "conditions": {
                "lambda_t_ge_sqrt_eps": self.time_condition,
                "t_ge_lambda_over_products": self.step_condition,
                "lambda_le_lambda_one": self.gershgorin_condition,
            },
        }


def berry_diagnostics(fext, t, eps, rel_tol=1e-12):
    """Norms and query estimate for sublinear-sparsity Hamiltonian simulation.

    ``query_estimate = t**1.5 * sqrt(s * L * L1 * Lmax / eps)`` with ``L`` the
    spectral norm, ``L1`` the largest column abs-sum, ``Lmax`` the largest
    entry modulus and ``s`` the largest count of nonzeros in a row.
    """
    if not t > 0:
        raise ContractError(f"t must be positive, got {t}")
    if not eps > 0:
        raise ContractError(f"eps must be positive, got {eps}")
    a = np.asarray(getattr(fext, "matrix", fext))
    a = as_matrix(a, "extended matrix")
    lam = spectral_norm(a)
    lam1 = float(np.max(np.sum(np.abs(a), axis=0)))
    lam_max = float(np.max(np.abs(a)))
    s = int(np.max(np.count_nonzero(a, axis=1)))
    query = float(t ** 1.5 * np.sqrt(s * lam * lam1 * lam_max / eps))
    denom = lam_max * lam1 * s
    t_min = lam / denom if denom > 0 else np.inf
    return BerryDiagnostics(
        lambda_spec=lam,
        lambda_one=lam1,
        lambda_max=lam_max,
        sparsity=s,
        query_estimate=query,
        time_condition=bool(lam * t >= np.sqrt(eps)),
        step_condition=bool(t >= t_min),
        gershgorin_condition=bool(lam <= lam1 * (1 + rel_tol)),
    )

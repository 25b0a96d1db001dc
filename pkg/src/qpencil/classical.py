"""Direct matrix pencil method.

Pipeline: Hankel pair -> SVD of ``F1`` -> rank truncation -> reduced pencil
``S^-1 U^dagger F2 V`` -> eigenvalues ``mu_k`` -> poles ``log(mu_k)/dt`` ->
least-squares coefficients on the Vandermonde system.
"""
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import kernels
from .errors import (
    CollinearityError,
    ContractError,
    DefectiveMatrixError,
    DegeneratePoleError,
    IllConditionedError,
    QPencilError,
    RankDeficiencyError,
)
from .hankel import build_hankel_pair
from .numerics import DEFAULT_CONFIG, eig_general, lstsq, spectral_norm, svd

__all__ = [
    "RankSpec",
    "TruncatedSVD",
    "PencilMatrix",
    "CoefficientFit",
    "RealFit",
    "EstimationReport",
    "truncate",
    "pencil_matrix",
    "solve_pencil",
    "order_poles",
    "fit_coefficients",
    "fit_coefficients_real",
    "real_design_matrix",
    "estimate",
    "bauer_fike_bound",
    "matched_displacement",
]

AUTO_NOISELESS_RHO = 1e-8
AUTO_MIN_GAP = 10.0
GROWTH_FLAG_TOL = 1e-9
DUPLICATE_MU_TOL = 1e-12


@dataclass(frozen=True)
class RankSpec:
    """How many singular values to keep.

    ``exact``: keep the top ``value``; ``threshold``: keep ``s > value``;
    ``auto``: keep ``s > rho * s_1`` if the spectrum has a numerically zero
    tail, otherwise cut at the largest ratio ``s_i / s_{i+1}``.
    """

    kind: str = "auto"
    value: float = None

    def __post_init__(self):
        if self.kind not in ("exact", "threshold", "auto"):
            raise ContractError(f"unknown rank kind {self.kind!r}")
        if self.kind == "exact" and (self.value is None or int(self.value) != self.value or self.value < 1):
            raise ContractError(f"exact rank must be a positive integer, got {self.value!r}")
        if self.kind == "threshold" and (self.value is None or not self.value >= 0):
            raise ContractError(f"threshold must be nonnegative, got {self.value!r}")

    @classmethod
    def exact(cls, p):
        return cls("exact", int(p))

    @classmethod
    def threshold(cls, theta):
        return cls("threshold", float(theta))

    @classmethod
    def auto(cls, rho=None):
        return cls("auto", None if rho is None else float(rho))

    @classmethod
    def parse(cls, text):
        text = str(text).strip()
        if text == "auto":
            return cls.auto()
        key, sep, val = text.partition("=")
        try:
            if sep and key == "p":
                return cls.exact(int(val))
            if sep and key == "thresh":
                return cls.threshold(float(val))
            if sep and key == "auto":
                return cls.auto(float(val))
        except ValueError:
            pass
        raise ContractError(f"cannot parse rank spec {text!r}; use auto, p=K or thresh=X")

    def plus(self, extra):
        """The same spec for a signal with ``extra`` more poles."""
        if self.kind == "exact":
            return RankSpec.exact(int(self.value) + extra)
        return self

    def __str__(self):
        if self.kind == "exact":
            return f"p={int(self.value)}"
        if self.kind == "threshold":
            return f"thresh={self.value!r}"
        return "auto" if self.value is None else f"auto={self.value!r}"


@dataclass(frozen=True, eq=False)
class TruncatedSVD:
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    threshold_used: float
    all_s: np.ndarray = None

    @property
    def rank(self):
        return int(self.s.size)

    def reconstruct(self):
        return (self.u * self.s) @ self.v.conj().T


@dataclass(frozen=True, eq=False)
class PencilMatrix:
    matrix: np.ndarray

    @property
    def size(self):
        return self.matrix.shape[0]


def _auto_rank(s, rho):
    s1 = s[0]
    if rho is not None or s[-1] <= AUTO_NOISELESS_RHO * s1:
        rho = AUTO_NOISELESS_RHO if rho is None else rho
        threshold = rho * s1
        return int(np.count_nonzero(s > threshold)), threshold
    if s.size == 1:
        return 1, 0.0
    floor = np.finfo(float).eps * s1
    ratios = s[:-1] / np.maximum(s[1:], floor)
    k = int(np.argmax(ratios))
    if ratios[k] < AUTO_MIN_GAP:
        return int(s.size), 0.0
    return k + 1, float(s[k + 1])


def truncate(svd_result, rank=None, config=DEFAULT_CONFIG):
    """Keep the leading singular triplets according to ``rank``."""
    rank = RankSpec.auto() if rank is None else rank
    s = np.asarray(svd_result.s, dtype=float)
    if s.size == 0 or s[0] <= 0:
        raise RankDeficiencyError("matrix is zero; nothing to keep")
    nonzero = int(np.count_nonzero(s > config.zero_singular_tol * s[0]))
    if rank.kind == "exact":
        r = int(rank.value)
        if r > nonzero:
            raise RankDeficiencyError(
                f"requested rank {r} but only {nonzero} nonzero singular values "
                f"(of {s.size}) are available"
            )
        threshold = float(s[r - 1])
    elif rank.kind == "threshold":
        threshold = float(rank.value)
        r = int(np.count_nonzero(s > threshold))
        if r == 0:
            raise RankDeficiencyError(f"no singular value exceeds threshold {threshold:g}")
    else:
        r, threshold = _auto_rank(s, rank.value)
    return TruncatedSVD(u=svd_result.u[:, :r], s=s[:r], v=svd_result.v[:, :r],
                        threshold_used=float(threshold), all_s=s)


def pencil_matrix(f2, t1, config=DEFAULT_CONFIG):
    """``diag(1/s) U^dagger F2 V`` from the truncated SVD of ``F1``."""
    f2 = np.asarray(f2, dtype=np.complex128)
    if f2.shape != (t1.u.shape[0], t1.v.shape[0]):
        raise ContractError(f"F2 has shape {f2.shape}, incompatible with the truncated SVD")
    if t1.s[-1] < config.zero_singular_tol * t1.s[0]:
        raise IllConditionedError(
            "retained singular value is numerically zero", cond=float(t1.s[0] / t1.s[-1])
        )
    reduced = t1.u.conj().T @ f2 @ t1.v
    return PencilMatrix(reduced / t1.s[:, np.newaxis])


def order_poles(mus):
    """Indices sorting ``mus`` by descending modulus, ties by ascending phase."""
    mus = np.asarray(mus)
    mags = np.round(np.abs(mus), 12)
    return np.lexsort((np.angle(mus), -mags))


def solve_pencil(pm, dt, config=DEFAULT_CONFIG):
    """Eigenvalues of the reduced pencil and principal-branch poles."""
    mat = getattr(pm, "matrix", pm)
    mus, _ = eig_general(mat)
    tiny = 1e-12 * max(1.0, spectral_norm(mat))
    if np.any(np.abs(mus) <= tiny):
        raise DegeneratePoleError("pencil eigenvalue mu = 0 has no logarithm")
    mus = mus[order_poles(mus)]
    return mus, np.log(mus) / dt


@dataclass(frozen=True, eq=False)
class CoefficientFit:
    coeffs: np.ndarray
    residual_norm: float
    fit_quality: float
    cond_w: float


def _check_distinct(mus):
    if mus.size > 1:
        gaps = np.abs(mus[:, None] - mus[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() <= DUPLICATE_MU_TOL:
            raise CollinearityError(f"two poles coincide (|mu_j - mu_k| = {gaps.min():.2e})")


def fit_coefficients(mus, signal, config=DEFAULT_CONFIG):
    """Least squares on ``W c = f`` with ``W[j, k] = mu_k ** j``."""
    mus = np.atleast_1d(np.asarray(mus, dtype=np.complex128))
    if signal.n < mus.size:
        raise ContractError(f"{mus.size} poles but only {signal.n} samples")
    _check_distinct(mus)
    w = kernels.vandermonde(mus, signal.n)
    coeffs = lstsq(w, signal.samples, config)
    fitted = w @ coeffs
    sv = np.linalg.svd(w, compute_uv=False)
    return CoefficientFit(
        coeffs=coeffs,
        residual_norm=float(np.linalg.norm(fitted - signal.samples)),
        fit_quality=float(np.linalg.norm(fitted)),
        cond_w=float(sv[0] / sv[-1]),
    )


def real_design_matrix(alpha, beta, n):
    """Real-split Vandermonde matrix ``[[Re, -Im], [Im, Re]]`` of ``mu^j``."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    j = np.arange(n)[:, np.newaxis]
    envelope = np.exp(-alpha[np.newaxis, :] * j)
    cos = envelope * np.cos(beta[np.newaxis, :] * j)
    sin = envelope * np.sin(beta[np.newaxis, :] * j)
    return np.block([[cos, -sin], [sin, cos]])


def closed_form_column_norms_sq(alpha, n):
    """``sum_j exp(-2 alpha j)`` for ``j < n``; equals ``n`` at ``alpha = 0``."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    out = np.full(alpha.shape, float(n))
    nz = alpha != 0
    out[nz] = np.expm1(-2 * alpha[nz] * n) / np.expm1(-2 * alpha[nz])
    return out


@dataclass(frozen=True, eq=False)
class RealFit:
    c_tilde: np.ndarray
    col_norms_sq: np.ndarray
    col_norms_sq_closed: np.ndarray
    residual_norm: float
    fit_quality: float
    cond_w: float

    @property
    def coeffs(self):
        p = self.c_tilde.size // 2
        return self.c_tilde[:p] + 1j * self.c_tilde[p:]


def fit_coefficients_real(poles, signal, config=DEFAULT_CONFIG):
    """Coefficients from the real and imaginary parts solved as one real system.

    With ``lambda_k dt = -alpha_k + i beta_k`` the unknowns are
    ``(Re c, Im c)`` and the data ``(Re f, Im f)``.
    """
    lam_dt = np.atleast_1d(np.asarray(poles, dtype=np.complex128)) * signal.dt
    _check_distinct(np.exp(lam_dt))
    if signal.n < lam_dt.size:
        raise ContractError(f"{lam_dt.size} poles but only {signal.n} samples")
    alpha, beta = -lam_dt.real, lam_dt.imag
    w = real_design_matrix(alpha, beta, signal.n)
    rhs = np.concatenate([signal.samples.real, signal.samples.imag])
    c_tilde = lstsq(w, rhs, config).real
    fitted = w @ c_tilde
    sv = np.linalg.svd(w, compute_uv=False)
    return RealFit(
        c_tilde=c_tilde,
        col_norms_sq=np.sum(w * w, axis=0),
        col_norms_sq_closed=np.tile(closed_form_column_norms_sq(alpha, signal.n), 2),
        residual_norm=float(np.linalg.norm(fitted - rhs)),
        fit_quality=float(np.linalg.norm(fitted)),
        cond_w=float(sv[0] / sv[-1]),
    )


def _complex_list(values):
    return [{"re": float(z.real), "im": float(z.imag)} for z in np.asarray(values, dtype=complex)]


@dataclass(frozen=True, eq=False)
class EstimationReport:
    poles: np.ndarray
    mus: np.ndarray
    coeffs: np.ndarray
    effective_rank: int
    residual_norm: float
    fit_quality: float
    cond_s1: float
    cond_w: float
    singular_values: np.ndarray = field(default=None, repr=False)
    threshold: float = 0.0
    dt: float = 1.0

    @property
    def growing(self):
        """Poles with Re(lambda) above tolerance; usually fitted noise."""
        return np.flatnonzero(self.poles.real * self.dt > GROWTH_FLAG_TOL)

    def as_dict(self):
        return {
            "poles": _complex_list(self.poles),
            "mus": _complex_list(self.mus),
            "coeffs": _complex_list(self.coeffs),
            "effective_rank": int(self.effective_rank),
            "residual_norm": float(self.residual_norm),
            "fit_quality": float(self.fit_quality),
            "cond_s1": float(self.cond_s1),
            "cond_w": float(self.cond_w),
            "growing_modes": [int(k) for k in self.growing],
        }


def _stage(name, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except QPencilError as exc:
        raise exc.with_stage(name)


def estimate(signal, rank=None, config=DEFAULT_CONFIG):
    """Run the full classical pipeline on a sampled signal."""
    rank = RankSpec.auto() if rank is None else rank
    pair = _stage("hankel", build_hankel_pair, signal)
    decomposition = _stage("svd", svd, pair.f1)
    t1 = _stage("truncate", truncate, decomposition, rank, config)
    pm = _stage("pencil", pencil_matrix, pair.f2, t1, config)
    mus, poles = _stage("eig", solve_pencil, pm, signal.dt, config)
    fit = _stage("coefficients", fit_coefficients, mus, signal, config)
    threshold = t1.threshold_used if t1.threshold_used > 0 else float(t1.s[-1])
    return EstimationReport(
        poles=poles,
        mus=mus,
        coeffs=fit.coeffs,
        effective_rank=t1.rank,
        residual_norm=fit.residual_norm,
        fit_quality=fit.fit_quality,
        cond_s1=float(t1.s[0] / threshold),
        cond_w=fit.cond_w,
        singular_values=t1.all_s,
        threshold=threshold,
        dt=signal.dt,
    )


def bauer_fike_bound(pm, delta, max_cond=1e12):
    """``kappa(X) * ||delta||_2`` where ``X`` diagonalises ``pm``."""
    mat = np.asarray(getattr(pm, "matrix", pm), dtype=np.complex128)
    delta = np.asarray(delta, dtype=np.complex128)
    if delta.shape != mat.shape:
        raise ContractError(f"perturbation shape {delta.shape} differs from {mat.shape}")
    _, x = eig_general(mat)
    kappa = np.linalg.cond(x, 2)
    if not kappa <= max_cond:
        raise DefectiveMatrixError(f"eigenvector matrix is near singular (cond = {kappa:.3e})")
    return float(kappa * spectral_norm(delta))


def matched_displacement(a, b):
    """Smallest achievable max ``|a_i - b_pi(i)|`` over bijections ``pi``.

    Exhaustive over permutations up to 8 values; above that a bottleneck
    assignment is found by bisecting over the sorted distances.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.shape != b.shape:
        raise ContractError(f"cannot match {a.size} values against {b.size}")
    dist = np.abs(a[:, None] - b[None, :])
    n = a.size
    if n <= 8:
        rows = np.arange(n)
        return float(min(dist[rows, list(perm)].max() for perm in itertools.permutations(range(n))))
    levels = np.unique(dist)
    lo, hi = 0, levels.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        cost = np.where(dist <= levels[mid], 0.0, 1.0)
        r, c = scipy.optimize.linear_sum_assignment(cost)
        if cost[r, c].sum() == 0:
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])

"""Dense simulation of the quantum primitives.

Covers the modified-swap channel that emulates ``exp(-i F t)``, the QPCA
density-matrix embedding of a non-Hermitian ``F``, phase estimation as an
exact eigenspace decomposition (optionally binned to a finite register), and
projective measurement with multinomial shot sampling.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ContractError, RegisterRangeError
from .numerics import (
    DEFAULT_CONFIG,
    as_matrix,
    as_vector,
    eig_hermitian,
    evolve,
    partial_trace_first,
)

__all__ = [
    "PureState",
    "DensityMatrix",
    "PhaseRegister",
    "Branch",
    "PhaseEstimationOutcome",
    "SpectralGroup",
    "modified_swap",
    "swap_channel_step",
    "swap_channel_step_dense",
    "exact_evolution_step",
    "build_chi",
    "build_chi_tilde",
    "qpca_embedding",
    "qpca_closed_form",
    "spectral_groups",
    "phase_estimation",
    "measure",
]

NORM_TOL = 1e-12
DEGENERACY_TOL = 1e-9
PROJECTOR_TOL = 1e-10
BRANCH_DROP_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    layout: tuple = None

    def __post_init__(self):
        amp = as_vector(self.amplitudes, "amplitudes")
        object.__setattr__(self, "amplitudes", amp)
        layout = self.layout if self.layout is not None else (("sys", amp.size),)
        layout = tuple((str(name), int(dim)) for name, dim in layout)
        object.__setattr__(self, "layout", layout)
        if int(np.prod([d for _, d in layout])) != amp.size:
            raise ContractError(f"layout {layout} does not match {amp.size} amplitudes")
        norm = np.linalg.norm(amp)
        if abs(norm - 1) > NORM_TOL:
            raise ContractError(f"state is not normalised (norm = {norm!r})")

    @classmethod
    def normalized(cls, vector, layout=None):
        vector = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise ContractError("cannot normalise the zero vector")
        return cls(vector / norm, layout)

    @property
    def dim(self):
        return self.amplitudes.size

    def tensor(self):
        return self.amplitudes.reshape([d for _, d in self.layout])

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise ContractError(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise ContractError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1) > NORM_TOL:
            raise ContractError(f"density matrix has trace {tr!r}")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -DEFAULT_CONFIG.psd_floor:
            raise ContractError(f"density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)


def _fext_matrix(fext):
    return as_matrix(np.asarray(getattr(fext, "matrix", fext)), "extended matrix")


def modified_swap(fext):
    """``sum_jk F_jk |k><j| (x) |j><k|``: one nonzero per row, Hermitian if ``F`` is."""
    return kernels.modified_swap(_fext_matrix(fext))


def _sigma_matrix(sigma):
    return sigma.matrix if isinstance(sigma, DensityMatrix) else as_matrix(sigma, "sigma")


def swap_channel_step(sigma, fext, dt, rho=None):
    """One infinitesimal swap step ``tr_1(e^{-iS dt} (rho x sigma) e^{iS dt})``.

    ``rho`` defaults to the uniform state with all entries ``1/N``. To first
    order in ``dt`` the output equals ``e^{-iF dt/N} sigma e^{iF dt/N}``.
    """
    f = _fext_matrix(fext)
    sig = _sigma_matrix(sigma)
    n = f.shape[0]
    if sig.shape != (n, n):
        raise ContractError(f"sigma is {sig.shape}, extended matrix is {n}x{n}")
    rho = np.full((n, n), 1.0 / n, dtype=np.complex128) if rho is None else as_matrix(rho, "rho")
    out = kernels.swap_channel(f, rho, sig, dt)
    return DensityMatrix(0.5 * (out + out.conj().T))


def swap_channel_step_dense(sigma, fext, dt, rho=None):
    """Same channel, built from the full ``N^2 x N^2`` propagator."""
    f = _fext_matrix(fext)
    sig = _sigma_matrix(sigma)
    n = f.shape[0]
    rho = np.full((n, n), 1.0 / n, dtype=np.complex128) if rho is None else as_matrix(rho, "rho")
    u = evolve(modified_swap(f), dt)
    joint = u @ np.kron(rho, sig) @ u.conj().T
    out = partial_trace_first(joint, n, n)
    return DensityMatrix(0.5 * (out + out.conj().T))


def exact_evolution_step(sigma, fext, dt):
    """``e^{-iF dt/N} sigma e^{iF dt/N}``, the target of the swap channel."""
    f = _fext_matrix(fext)
    sig = _sigma_matrix(sigma)
    u = evolve(f, dt / f.shape[0])
    out = u @ sig @ u.conj().T
    return DensityMatrix(0.5 * (out + out.conj().T))


def _chi_scale(f):
    f = as_matrix(f, "F")
    if f.shape[0] != f.shape[1]:
        raise ContractError(f"F must be square, got {f.shape}")
    gram = f.conj().T @ f
    peak = np.max(np.abs(gram))
    if peak == 0:
        raise ContractError("F is the zero matrix; the chi state is undefined")
    a = 1.0 / peak
    c = np.linalg.norm(f) ** 2 + a * a * np.linalg.norm(gram) ** 2
    return f, gram, a, float(c)


def build_chi(f):
    """``|chi> ~ sum_jk |j>|k>(F_jk |0> + a (F^dag F)_jk |1>)``.

    Returns ``(state, a, C)`` with ``a = 1 / max|(F^dag F)_jk|`` and ``C`` the
    squared norm before normalisation.
    """
    f, gram, a, c = _chi_scale(f)
    m = f.shape[0]
    amp = np.stack([f, a * gram], axis=-1) / np.sqrt(c)
    return PureState(amp.ravel(), (("row", m), ("col", m), ("flag", 2))), a, c


def build_chi_tilde(f):
    """Permuted companion ``a (F F^dag)_jk |0> + (F^dag)_jk |1>``."""
    f, _, a, c = _chi_scale(f)
    m = f.shape[0]
    amp = np.stack([a * (f @ f.conj().T), f.conj().T], axis=-1) / np.sqrt(c)
    return PureState(amp.ravel(), (("row", m), ("col", m), ("flag", 2))), a, c


def _reduce_over_col(state):
    """Trace out the column index; result is ordered (flag, row) like the block form."""
    t = state.tensor()  # (row, col, flag)
    a = np.transpose(t, (2, 0, 1)).reshape(-1, t.shape[1])
    return a @ a.conj().T


def qpca_embedding(f):
    """Reduced states ``G``, ``G~`` and their mixture ``Z = (G + G~)/2``.

    ``Z`` has eigenvectors ``(u_j, +-v_j)`` with eigenvalues
    ``s_j^2 (a s_j +- 1)^2 / (2C)``.
    """
    chi, _, _ = build_chi(f)
    chi_t, _, _ = build_chi_tilde(f)
    g = _reduce_over_col(chi)
    g_t = _reduce_over_col(chi_t)
    z = 0.5 * (g + g_t)
    herm = lambda m: 0.5 * (m + m.conj().T)  # noqa: E731
    return DensityMatrix(herm(g)), DensityMatrix(herm(g_t)), DensityMatrix(herm(z))


def qpca_closed_form(f):
    """Predicted spectrum of ``Z`` (length ``2m``, ascending)."""
    f, _, a, c = _chi_scale(f)
    s = np.linalg.svd(f, compute_uv=False)
    vals = np.concatenate([s ** 2 * (a * s + 1) ** 2, s ** 2 * (a * s - 1) ** 2]) / (2 * c)
    return np.sort(vals)


@dataclass(frozen=True)
class PhaseRegister:
    """Finite eigenvalue register: ``bits`` of ``eigenvalue * scale mod 1``.

    Eigenvalues must satisfy ``-1/2 <= eigenvalue * scale < 1/2``.
    """

    bits: int
    scale: float

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 1:
            raise ContractError(f"register needs a positive bit count, got {self.bits!r}")
        if not self.scale > 0:
            raise ContractError(f"register scale must be positive, got {self.scale!r}")

    @property
    def resolution(self):
        """Eigenvalue spacing between adjacent bins."""
        return 1.0 / (2 ** self.bits * self.scale)

    def bin_index(self, eigenvalues):
        phase = np.asarray(eigenvalues, dtype=float) * self.scale
        bad = (phase < -0.5) | (phase >= 0.5)
        if np.any(bad):
            worst = float(np.asarray(eigenvalues)[bad][0])
            raise RegisterRangeError(
                f"eigenvalue {worst:.6g} times scale {self.scale:.6g} leaves [-1/2, 1/2)"
            )
        size = 2 ** int(self.bits)
        return np.mod(np.rint(phase * size).astype(np.int64), size)

    def decode(self, index):
        size = 2 ** int(self.bits)
        signed = np.where(index >= size // 2, index - size, index)
        return signed / size / self.scale


@dataclass(frozen=True, eq=False)
class SpectralGroup:
    """One phase-estimation outcome: a register label and its eigenspace."""

    label: float
    basis: np.ndarray
    eigenvalues: np.ndarray

    def project(self, vec):
        return self.basis @ (self.basis.conj().T @ vec)


def _branch_key(label, zero_tol):
    if label > zero_tol:
        return (0, -label)
    if label < -zero_tol:
        return (1, label)
    return (2, 0.0)


def spectral_groups(h, mode=None, config=DEFAULT_CONFIG):
    """Eigenspaces of ``h`` as distinguished by the eigenvalue register.

    ``mode=None`` (ideal) merges eigenvalues closer than ``1e-9 * ||h||``;
    a :class:`PhaseRegister` merges everything falling into the same bin.
    Groups are ordered positive labels first (descending), then negative
    labels by descending magnitude, then zero.
    """
    lam, q = eig_hermitian(h, config)
    scale = max(float(np.max(np.abs(lam))), np.finfo(float).tiny)
    if mode is None or mode == "ideal":
        tol = DEGENERACY_TOL * scale
        groups = []
        start = 0
        for i in range(1, lam.size + 1):
            if i == lam.size or lam[i] - lam[i - 1] > tol:
                groups.append((float(np.mean(lam[start:i])), np.arange(start, i)))
                start = i
        zero_tol = tol
    elif isinstance(mode, PhaseRegister):
        bins = mode.bin_index(lam)
        groups = []
        for b in np.unique(bins):
            members = np.flatnonzero(bins == b)
            groups.append((float(mode.decode(b)), members))
        zero_tol = 0.5 * mode.resolution
    else:
        raise ContractError(f"unknown phase-estimation mode {mode!r}")
    out = [SpectralGroup(label, q[:, idx], lam[idx]) for label, idx in groups]
    out.sort(key=lambda g: _branch_key(g.label, zero_tol))
    return out


@dataclass(frozen=True, eq=False)
class Branch:
    eigenvalue: float
    amplitude: complex
    eigenstate: np.ndarray


@dataclass(frozen=True, eq=False)
class PhaseEstimationOutcome:
    branches: list = field(default_factory=list)
    mode: object = "ideal"

    @property
    def eigenvalues(self):
        return np.array([b.eigenvalue for b in self.branches])

    @property
    def amplitudes(self):
        return np.array([b.amplitude for b in self.branches])

    def reconstruct(self):
        return sum(b.amplitude * b.eigenstate for b in self.branches)


def phase_estimation(h, state, mode=None, config=DEFAULT_CONFIG, groups=None):
    """Decompose ``state`` into eigenspace branches of the Hermitian ``h``.

    A nondegenerate branch reports ``<q|psi>`` against the solver's
    eigenvector ``q``; a merged branch reports ``||P psi||`` with the
    normalised projection as its state. Branches carrying less than
    ``1e-14`` amplitude are dropped.
    """
    psi = state.amplitudes if isinstance(state, PureState) else as_vector(state, "state")
    h = as_matrix(h, "h")
    if psi.size != h.shape[0]:
        raise ContractError(f"state has dimension {psi.size}, operator {h.shape[0]}")
    groups = spectral_groups(h, mode, config) if groups is None else groups
    branches = []
    for g in groups:
        if g.basis.shape[1] == 1:
            vec = g.basis[:, 0]
            amp = complex(np.vdot(vec, psi))
            if abs(amp) > BRANCH_DROP_TOL:
                branches.append(Branch(g.label, amp, vec))
        else:
            proj = g.project(psi)
            norm = float(np.linalg.norm(proj))
            if norm > BRANCH_DROP_TOL:
                branches.append(Branch(g.label, complex(norm), proj / norm))
    return PhaseEstimationOutcome(branches, "ideal" if mode is None else mode)


def _check_projector(p, dim):
    p = as_matrix(p, "projector")
    if p.shape != (dim, dim):
        raise ContractError(f"projector is {p.shape}, state is {dim}-dimensional")
    if np.max(np.abs(p - p.conj().T)) > PROJECTOR_TOL:
        raise ContractError("projector is not Hermitian")
    if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL:
        raise ContractError("projector is not idempotent")
    return p


def measure(state, projectors, shots=None, seed=None):
    """Outcome probabilities, or sampled counts when ``shots`` is given.

    Sampling requires a complete set of mutually orthogonal projectors.
    """
    psi = state.amplitudes if isinstance(state, PureState) else as_vector(state, "state")
    projs = [_check_projector(p, psi.size) for p in projectors]
    probs = np.array([np.vdot(psi, p @ psi).real for p in projs])
    if shots is None:
        return probs
    if int(shots) != shots or shots < 1:
        raise ContractError(f"shots must be a positive integer, got {shots!r}")
    eye = np.eye(psi.size)
    if np.max(np.abs(sum(projs) - eye)) > PROJECTOR_TOL:
        raise ContractError("projectors do not resolve the identity; cannot sample")
    for i in range(len(projs)):
        for j in range(i + 1, len(projs)):
            if np.max(np.abs(projs[i] @ projs[j])) > PROJECTOR_TOL:
                raise ContractError(f"projectors {i} and {j} are not orthogonal")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    return rng.multinomial(int(shots), probs)


"""Matrix pencil poles from two concatenated phase estimations.

The pencil matrix ``S1^-1 U1^dag F2 V1`` equals ``S1^-1 Uo S2 Vo`` with the
overlap matrices ``Uo[j, k] = <u1_j|u2_k>`` and ``Vo[k, l] = <v2_k|v1_l>``.
Those overlaps are read off branch amplitudes: phase estimation with
``F2~`` followed by projection onto the ``u`` (or ``v``) half gives
amplitudes ``g_k``; a second phase estimation with ``F1~`` gives ``h_jk``;
``h_jk / g_k`` is an overlap times one unknown complex factor. A constant
added to the signal contributes the pole ``mu = 1``, whose pencil eigenvalue
has the largest modulus and fixes that factor.

Simulation conventions: the branch basis uses singular vectors with a fixed
phase (largest-modulus entry of ``u_k`` real positive). Eigenvalue labels
are ordered ``s_1 .. s_r, -s_1 .. -s_r``.
"""
from dataclasses import dataclass, field

import numpy as np

from .classical import (
    RankSpec,
    fit_coefficients_real,
    order_poles,
    truncate,
    _complex_list,
)
from .errors import (
    AmbiguousReferenceError,
    ContractError,
    DegenerateProjectionError,
    PreparationError,
    QPencilError,
    ResolutionError,
    UnstableOverlapError,
)
from .hankel import build_hankel_pair, extend
from .numerics import DEFAULT_CONFIG, eig_general, spectral_norm, svd
from .qsim import PhaseRegister, PureState, measure, spectral_groups
from .signal import add_reference_pole

__all__ = [
    "QuantumConfig",
    "SingularBasis",
    "AmplitudeSet",
    "OverlapMatrices",
    "AssembledPencil",
    "QuantumEstimateReport",
    "canonical_basis",
    "prepare_initial_state",
    "first_pe_and_project",
    "tomography",
    "second_pe",
    "overlaps",
    "assemble_and_solve",
    "qmpm_estimate",
    "parse_pe",
]

PIVOT_TOL = 1e-6
OVERLAP_MIN_G = 1e-8
OVERLAP_MIN_STATE = 1e-10
COLLISION_TOL = 1e-9
MATCH_TOL = 1e-8
AMBIGUITY = 0.01
PREP_RETRIES = 8


def parse_pe(text):
    """``"ideal"`` or ``"register:BITS"`` -> ``None`` or bit count."""
    if text is None or text == "ideal":
        return None
    if isinstance(text, int):
        return text
    kind, _, bits = str(text).partition(":")
    if kind == "register" and bits.isdigit() and int(bits) >= 2:
        return int(bits)
    raise ContractError(f"cannot parse phase-estimation mode {text!r}; use ideal or register:BITS (BITS >= 2)")


@dataclass(frozen=True)
class QuantumConfig:
    """Settings for :func:`qmpm_estimate`.

    ``shots`` is per measurement setting. ``register_bits=None`` selects
    ideal phase estimation. ``reference_offset=None`` uses ``max |f_j|``.
    """

    mode: str = "exact"
    shots: int = 1_000_000
    seed: int = 0
    register_bits: int = None
    rank: RankSpec = field(default_factory=RankSpec.auto)
    reference_offset: complex = None
    max_n: int = 64

    def __post_init__(self):
        if self.mode not in ("exact", "shots"):
            raise ContractError(f"mode must be exact or shots, got {self.mode!r}")
        if self.mode == "shots" and not (int(self.shots) == self.shots and self.shots >= 1):
            raise ContractError(f"shots must be a positive integer, got {self.shots!r}")
        if self.register_bits is not None and self.register_bits < 2:
            raise ContractError("register needs at least 2 bits")

    @property
    def pe_label(self):
        return "ideal" if self.register_bits is None else f"register:{self.register_bits}"


@dataclass(frozen=True, eq=False)
class SingularBasis:
    """Leading singular triplets of one Hankel matrix with fixed phases."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def rank(self):
        return int(self.s.size)

    @property
    def signs(self):
        return np.concatenate([np.ones(self.rank), -np.ones(self.rank)])

    @property
    def labels(self):
        return np.concatenate([self.s, -self.s])

    def eigenvector(self, index):
        """Eigenvector ``(u_k, +-v_k)/sqrt(2)`` of the extended matrix."""
        k, sign = index % self.rank, self.signs[index]
        return np.concatenate([self.u[:, k], sign * self.v[:, k]]) / np.sqrt(2)

    def half_vector(self, index, side):
        """``(u_k, 0)`` or ``(0, +-v_k)``: what survives the projection."""
        k, sign = index % self.rank, self.signs[index]
        zeros = np.zeros(self.u.shape[0], dtype=np.complex128)
        if side == "u":
            return np.concatenate([self.u[:, k], zeros])
        return np.concatenate([zeros, sign * self.v[:, k]])


def canonical_basis(f, rank):
    """Top ``rank`` singular triplets of ``f``, phase fixed and collision checked."""
    dec = svd(f)
    if rank > dec.s.size:
        raise ContractError(f"rank {rank} exceeds matrix size {dec.s.size}")
    u, s, v = dec.u[:, :rank].copy(), dec.s[:rank].copy(), dec.v[:, :rank].copy()
    for k in range(rank):
        lead = u[np.argmax(np.abs(u[:, k])), k]
        phase = np.conj(lead) / abs(lead)
        u[:, k] *= phase
        v[:, k] *= phase
    if rank > 1:
        gaps = -np.diff(s)
        if np.min(gaps) <= COLLISION_TOL * s[0]:
            raise ResolutionError("two retained singular values coincide; overlap ordering is ambiguous")
    return SingularBasis(u, s, v)


def _pe_mode(fext, bits):
    if bits is None:
        return None
    # leave one bin of headroom so +s_max cannot wrap onto -s_max
    scale = (0.5 - 2.0 ** -bits) / spectral_norm(fext.matrix)
    return PhaseRegister(bits, scale)


def _match_groups(groups, basis, mode):
    """Map register outcomes to branch indices ``0 .. 2r-1``."""
    labels = basis.labels
    if isinstance(mode, PhaseRegister):
        bins = mode.bin_index(labels)
        if np.unique(bins).size < bins.size:
            raise ResolutionError(
                f"{mode.bits}-bit register cannot separate the retained singular values"
            )
        tol = mode.resolution
    else:
        tol = MATCH_TOL * basis.s[0]
    matched = {}
    for g in groups:
        dist = np.abs(labels - g.label)
        idx = int(np.argmin(dist))
        if dist[idx] <= tol:
            if idx in matched:
                raise ResolutionError("two register outcomes map to one singular value")
            matched[idx] = g
    if len(matched) != labels.size:
        missing = sorted(set(range(labels.size)) - set(matched))
        raise ResolutionError(f"no register outcome found for branches {missing}")
    return [matched[i] for i in range(labels.size)]


@dataclass(frozen=True, eq=False)
class AmplitudeSet:
    """Branch amplitudes known up to one global phase.

    ``values.flat[pivot]`` is real and positive. ``std_error`` is the largest
    estimated standard error of a single amplitude (zero when exact).
    """

    values: np.ndarray
    pivot: int = 0
    gauge: str = ""
    std_error: float = 0.0
    shots_used: int = 0

    @property
    def flat(self):
        return self.values.ravel()

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.values) ** 2))


def _gauge_fix(values, pivot_tol=PIVOT_TOL):
    values = np.asarray(values, dtype=np.complex128)
    flat = values.ravel()
    pivot = 0
    note = "first amplitude real positive"
    if abs(flat[0]) < pivot_tol:
        pivot = int(np.argmax(np.abs(flat)))
        note = f"first amplitude below {pivot_tol:g}; pivot moved to index {pivot}"
    lead = flat[pivot]
    fixed = values * (np.conj(lead) / abs(lead)) if lead != 0 else values.copy()
    fixed.flat[pivot] = abs(lead)
    return fixed, pivot, note


def prepare_initial_state(f, rank=None, retries=PREP_RETRIES):
    """Pure state ``(x, 0)/|x|`` with ``x`` in the column space of ``f``.

    ``x = f @ ones`` is tried first, then ``f @ r`` for seeded random complex
    ``r``. Every retained pair ``(u_k, +-v_k)/sqrt(2)`` must overlap the state
    by at least ``1e-10``.
    """
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ContractError(f"F must be square, got {f.shape}")
    dec = svd(f)
    if dec.s[0] == 0:
        raise ContractError("F is the zero matrix")
    if rank is None:
        rank = int(np.count_nonzero(dec.s > DEFAULT_CONFIG.zero_singular_tol * dec.s[0]))
    u = dec.u[:, :rank]
    m = f.shape[0]
    for attempt in range(retries + 1):
        if attempt == 0:
            mix = np.ones(m, dtype=np.complex128)
        else:
            rng = np.random.default_rng(attempt)
            mix = rng.normal(size=m) + 1j * rng.normal(size=m)
        x = f @ mix
        norm = np.linalg.norm(x)
        if norm == 0:
            continue
        x = x / norm
        if np.min(np.abs(u.conj().T @ x)) / np.sqrt(2) >= OVERLAP_MIN_STATE:
            return PureState(np.concatenate([x, np.zeros(m)]), (("sys", 2 * m),))
    raise PreparationError(f"no initial state with full overlap after {retries} retries")


def first_pe_and_project(psi0, fext2, basis2, mode=None, side="u"):
    """Phase estimation with ``F2~``, then drop the ``v`` (or ``u``) half.

    Returns ``(psi1, g, s2)``: the normalised post-projection state with
    layout ``(s2, sys)``, its gauge-fixed branch amplitudes and the branch
    eigenvalue labels.
    """
    if side not in ("u", "v"):
        raise ContractError(f"side must be 'u' or 'v', got {side!r}")
    groups = _match_groups(spectral_groups(fext2.matrix, mode), basis2, mode)
    psi = psi0.amplitudes
    half = fext2.half
    blocks = np.zeros((len(groups), fext2.dim), dtype=np.complex128)
    for idx, g in enumerate(groups):
        vec = g.project(psi)
        if side == "u":
            vec[half:] = 0
        else:
            vec[:half] = 0
        blocks[idx] = vec
    nu = np.linalg.norm(blocks)
    if nu <= OVERLAP_MIN_STATE:
        raise DegenerateProjectionError("every branch vanished after projection")
    blocks /= nu
    raw = np.array([np.vdot(basis2.half_vector(i, side), blocks[i]) for i in range(len(groups))])
    values, pivot, note = _gauge_fix(raw)
    psi1 = PureState(blocks.ravel(), (("s2", len(groups)), ("sys", fext2.dim)))
    labels = np.array([g.label for g in groups])
    return psi1, AmplitudeSet(values, pivot, note), labels


def second_pe(psi1, fext1, basis1, mode=None):
    """Phase estimation with ``F1~`` on every ``s2`` branch of ``psi1``.

    Returns ``(psi2, h, s1)`` where ``h[j, k]`` is the amplitude of register
    pair ``(s1_j, s2_k)`` against the eigenvector ``(u1_j, +-v1_j)/sqrt(2)``.
    """
    groups = _match_groups(spectral_groups(fext1.matrix, mode), basis1, mode)
    blocks = psi1.tensor()
    k2 = blocks.shape[0]
    out = np.zeros((len(groups), k2, fext1.dim), dtype=np.complex128)
    for j, g in enumerate(groups):
        out[j] = (g.basis @ (g.basis.conj().T @ blocks.T)).T
    nu = np.linalg.norm(out)
    if nu <= OVERLAP_MIN_STATE:
        raise DegenerateProjectionError("second phase estimation left no weight on retained branches")
    out /= nu
    raw = np.empty((len(groups), k2), dtype=np.complex128)
    for j in range(len(groups)):
        raw[j] = out[j] @ basis1.eigenvector(j).conj()
    values, pivot, note = _gauge_fix(raw)
    psi2 = PureState(out.ravel(), (("s1", len(groups)), ("s2", k2), ("sys", fext1.dim)))
    labels = np.array([g.label for g in groups])
    return psi2, AmplitudeSet(values, pivot, note), labels


def _pair_projectors(dim, a, b, phase):
    """``{(e_a + w e_b)(..)^dag/2, (e_a - w e_b)(..)^dag/2, rest}`` with ``w = phase``."""
    plus = np.zeros(dim, dtype=np.complex128)
    minus = np.zeros(dim, dtype=np.complex128)
    plus[a] = minus[a] = 1 / np.sqrt(2)
    plus[b] = phase / np.sqrt(2)
    minus[b] = -phase / np.sqrt(2)
    p_plus = np.outer(plus, plus.conj())
    p_minus = np.outer(minus, minus.conj())
    rest = np.eye(dim) - p_plus - p_minus
    return [p_plus, p_minus, rest]


def tomography(source, shots=None, seed=None, pivot_tol=PIVOT_TOL):
    """Recover branch amplitudes relative to a pivot amplitude.

    Exact mode (``shots=None``) only fixes the gauge. With shots, three kinds
    of complete projective measurement are sampled, each ``shots`` times:
    the register basis (gives ``|g_k|^2``), and for each ``k`` the pairs
    ``(e_p +- e_k)/sqrt(2)`` and ``(e_p -+ i e_k)/sqrt(2)``, whose outcome
    differences give ``Re`` and ``Im`` of ``g_p g_k^*``. The pivot ``p`` is
    the first amplitude unless it falls below ``pivot_tol``.
    """
    values = source.values if isinstance(source, AmplitudeSet) else np.asarray(source, dtype=np.complex128)
    if shots is None:
        fixed, pivot, note = _gauge_fix(values, pivot_tol)
        return AmplitudeSet(fixed, pivot, note)
    shape = values.shape
    state = PureState.normalized(values.ravel())
    dim = state.dim
    n = int(shots)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = root.spawn(1 + 2 * (dim - 1))
    basis = [np.diag(np.eye(dim)[i]) for i in range(dim)]
    probs = measure(state, basis, n, seeds[0]) / n
    pivot = 0
    note = "first amplitude real positive"
    if np.sqrt(probs[0]) < pivot_tol:
        pivot = int(np.argmax(probs))
        note = f"first amplitude below {pivot_tol:g}; pivot moved to index {pivot}"
    g_pivot = np.sqrt(probs[pivot])
    if g_pivot == 0:
        raise UnstableOverlapError("no counts recorded on any pivot candidate")
    out = np.zeros(dim, dtype=np.complex128)
    out[pivot] = g_pivot
    errors = [np.sqrt(max(probs[pivot] * (1 - probs[pivot]), 0.0) / n) / (2 * g_pivot)]
    setting = 1
    for k in range(dim):
        if k == pivot:
            continue
        parts = []
        variance = 0.0
        for phase in (1.0, -1j):
            counts = measure(state, _pair_projectors(dim, pivot, k, phase), n, seeds[setting]) / n
            setting += 1
            diff = counts[0] - counts[1]
            parts.append(diff / 2)
            variance += (counts[0] + counts[1] - diff ** 2) / (4 * n)
        cross = parts[0] + 1j * parts[1]  # estimate of g_p * conj(g_k)
        out[k] = np.conj(cross) / g_pivot
        errors.append(np.sqrt(variance) / g_pivot)
    used = n * (1 + 2 * (dim - 1))
    return AmplitudeSet(out.reshape(shape), pivot, note, float(max(errors)), used)


@dataclass(frozen=True, eq=False)
class OverlapMatrices:
    """Overlap matrices, each known up to its own complex factor."""

    u_mat: np.ndarray = None
    v_mat: np.ndarray = None
    s1: np.ndarray = None
    s2: np.ndarray = None
    spread_u: float = None
    spread_v: float = None

    def merge(self, other):
        pick = lambda a, b: a if a is not None else b  # noqa: E731
        return OverlapMatrices(
            u_mat=pick(self.u_mat, other.u_mat),
            v_mat=pick(self.v_mat, other.v_mat),
            s1=pick(self.s1, other.s1),
            s2=pick(self.s2, other.s2),
            spread_u=pick(self.spread_u, other.spread_u),
            spread_v=pick(self.spread_v, other.spread_v),
        )


def overlaps(g, h, s1, s2, which):
    """Fold ``h[j, k] / g[k]`` into an ``r x r`` overlap matrix.

    Every entry appears four times (sign combinations of both branch
    labels). For ``which="U"`` the copies are equal; for ``"V"`` they carry
    the sign pattern ``(+, -, -, +)``, undone before averaging. The largest
    deviation of a copy from the average is recorded. The ``V`` result is
    returned as ``<v2_k|v1_l>``, i.e. conjugate-transposed.
    """
    if which not in ("U", "V"):
        raise ContractError(f"which must be 'U' or 'V', got {which!r}")
    gv = np.asarray(getattr(g, "values", g)).ravel()
    hv = np.asarray(getattr(h, "values", h))
    if np.min(np.abs(gv)) < OVERLAP_MIN_G:
        raise UnstableOverlapError(f"branch amplitude {np.min(np.abs(gv)):.2e} is too small to divide by")
    if hv.shape[1] != gv.size or hv.shape[0] % 2 or gv.size % 2:
        raise ContractError(f"amplitude shapes do not pair up: h {hv.shape}, g {gv.shape}")
    ratio = hv / gv[np.newaxis, :]
    r1, r2 = hv.shape[0] // 2, gv.size // 2
    if which == "V":
        sign1 = np.concatenate([np.ones(r1), -np.ones(r1)])
        sign2 = np.concatenate([np.ones(r2), -np.ones(r2)])
        ratio = ratio * np.outer(sign1, sign2)
    copies = np.stack([ratio[:r1, :r2], ratio[r1:, :r2], ratio[:r1, r2:], ratio[r1:, r2:]])
    mean = copies.mean(axis=0)
    spread = float(np.max(np.abs(copies - mean)))
    s1 = np.asarray(s1, dtype=float)[:r1]
    s2 = np.asarray(s2, dtype=float)[:r2]
    if which == "U":
        return OverlapMatrices(u_mat=mean, s1=s1, s2=s2, spread_u=spread)
    return OverlapMatrices(v_mat=mean.conj().T, s1=s1, s2=s2, spread_v=spread)


@dataclass(frozen=True, eq=False)
class AssembledPencil:
    matrix: np.ndarray
    gammas: np.ndarray
    mus: np.ndarray
    poles: np.ndarray
    gauge_factor: complex

    @property
    def normalized_matrix(self):
        """Pencil matrix with the unknown factor divided out."""
        return self.matrix / self.gauge_factor


def assemble_and_solve(s1, s2, u_mat, v_mat, dt, ambiguity=AMBIGUITY):
    """Eigenvalues of ``diag(1/s1) Uo diag(s2) Vo`` divided by the reference one.

    The reference eigenvalue is the one of largest modulus; it must beat the
    runner-up by more than ``ambiguity`` (relative). Outputs keep the
    reference first (``mu = 1``, ``lambda = 0``).
    """
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    mat = (np.asarray(u_mat) * s2[np.newaxis, :]) @ np.asarray(v_mat) / s1[:, np.newaxis]
    gammas, _ = eig_general(mat)
    order = np.argsort(-np.abs(gammas), kind="stable")
    gammas = gammas[order]
    ref = gammas[0]
    if ref == 0:
        raise AmbiguousReferenceError("all pencil eigenvalues vanish")
    if gammas.size > 1 and abs(gammas[1]) >= (1 - ambiguity) * abs(ref):
        raise AmbiguousReferenceError(
            f"reference eigenvalue |{abs(ref):.6g}| is within {ambiguity:.0%} of the next "
            f"|{abs(gammas[1]):.6g}|; add damping or a larger reference offset"
        )
    mus = gammas / ref
    mus[0] = 1.0
    return AssembledPencil(mat, gammas, mus, np.log(mus) / dt, complex(ref))


@dataclass(frozen=True, eq=False)
class QuantumEstimateReport:
    poles: np.ndarray
    mus: np.ndarray
    coeffs: np.ndarray
    effective_rank: int
    residual_norm: float
    fit_quality: float
    cond_s1: float
    cond_w: float
    gauge_factor: complex
    shots_used: object
    tomography_error_estimate: float
    mode: str
    pe: str = "ideal"
    reference_offset: complex = 0.0
    spread_u: float = 0.0
    spread_v: float = 0.0
    dt: float = 1.0
    pencil: AssembledPencil = field(default=None, repr=False)
    singular_values: tuple = field(default=None, repr=False)

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
            "gauge_factor": {"re": float(self.gauge_factor.real), "im": float(self.gauge_factor.imag)},
            "shots_used": self.shots_used,
            "tomography_error_estimate": float(self.tomography_error_estimate),
            "mode": self.mode,
            "pe": self.pe,
            "reference_offset": {"re": float(self.reference_offset.real),
                                 "im": float(self.reference_offset.imag)},
            "duplicate_spread": {"u": float(self.spread_u), "v": float(self.spread_v)},
        }


def _stage(name, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except QPencilError as exc:
        raise exc.with_stage(name)


def default_reference_offset(signal):
    peak = float(np.max(np.abs(signal.samples)))
    return complex(peak if peak > 0 else 1.0)


def qmpm_estimate(signal, config=None):
    """Simulate the full pipeline on ``signal`` and return a report.

    Steps: add reference constant, build Hankel pair and extended matrices,
    prepare ``psi0``, then for each of the ``u`` and ``v`` paths run the
    first phase estimation with projection, tomography, the second phase
    estimation and tomography again; fold overlaps, solve the small pencil,
    divide out the reference eigenvalue and fit coefficients on the original
    signal with the real-split least-squares system.
    """
    config = QuantumConfig() if config is None else config
    if signal.n > config.max_n:
        raise ContractError(
            f"signal has {signal.n} samples; the dense simulator is capped at {config.max_n}"
        )
    offset = config.reference_offset
    offset = default_reference_offset(signal) if offset is None else complex(offset)
    augmented = _stage("reference", add_reference_pole, signal, offset)
    pair = _stage("hankel", build_hankel_pair, augmented)
    fe1, fe2 = extend(pair.f1), extend(pair.f2)
    t1 = _stage("truncate", truncate, svd(pair.f1), config.rank.plus(1))
    r = t1.rank
    basis1 = _stage("basis", canonical_basis, pair.f1, r)
    basis2 = _stage("basis", canonical_basis, pair.f2, r)
    mode1, mode2 = _pe_mode(fe1, config.register_bits), _pe_mode(fe2, config.register_bits)
    psi0 = _stage("prepare", prepare_initial_state, pair.f2, r)

    shots = config.shots if config.mode == "shots" else None
    seeds = np.random.SeedSequence(config.seed).spawn(4)
    tomo_seeds = iter(seeds)
    ov = OverlapMatrices()
    used = 0
    err = 0.0
    for side, which in (("u", "U"), ("v", "V")):
        psi1, g_exact, s2 = _stage("first_pe", first_pe_and_project, psi0, fe2, basis2, mode2, side)
        g = _stage("tomography", tomography, g_exact, shots, next(tomo_seeds))
        _, h_exact, s1 = _stage("second_pe", second_pe, psi1, fe1, basis1, mode1)
        h = _stage("tomography", tomography, h_exact, shots, next(tomo_seeds))
        ov = ov.merge(_stage("overlaps", overlaps, g, h, s1, s2, which))
        used += g.shots_used + h.shots_used
        err = max(err, g.std_error, h.std_error)

    pencil = _stage("solve", assemble_and_solve, ov.s1, ov.s2, ov.u_mat, ov.v_mat, signal.dt)
    rest = pencil.mus[1:]
    order = order_poles(rest)
    mus = rest[order]
    poles = pencil.poles[1:][order]
    if mus.size:
        fit = _stage("coefficients", fit_coefficients_real, poles, signal)
        coeffs, residual, quality, cond_w = fit.coeffs, fit.residual_norm, fit.fit_quality, fit.cond_w
    else:
        coeffs = np.zeros(0, dtype=np.complex128)
        residual = float(np.linalg.norm(signal.samples))
        quality, cond_w = 0.0, 1.0
    threshold = t1.threshold_used if t1.threshold_used > 0 else float(t1.s[-1])
    return QuantumEstimateReport(
        poles=poles,
        mus=mus,
        coeffs=coeffs,
        effective_rank=int(mus.size),
        residual_norm=residual,
        fit_quality=quality,
        cond_s1=float(ov.s1[0] / threshold),
        cond_w=cond_w,
        gauge_factor=pencil.gauge_factor,
        shots_used=used if shots is not None else "exact",
        tomography_error_estimate=err,
        mode=config.mode,
        pe=config.pe_label,
        reference_offset=offset,
        spread_u=ov.spread_u,
        spread_v=ov.spread_v,
        dt=signal.dt,
        pencil=pencil,
        singular_values=(ov.s1, ov.s2),
    )


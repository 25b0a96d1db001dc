"""Signal models, equidistant sampling, noise and a DFT peak-picking baseline."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError

__all__ = [
    "SignalModel",
    "SampledSignal",
    "DftSpectrum",
    "sample",
    "add_reference_pole",
    "add_noise",
    "dft_baseline",
    "is_conjugate_closed",
    "random_model",
]

# Re(lambda) may exceed 0 by this much before a model is rejected.
GROWTH_TOL = 1e-12


def _complex_1d(values, name):
    arr = np.atleast_1d(np.asarray(values, dtype=np.complex128))
    if arr.ndim != 1:
        raise ContractError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class SignalModel:
    """Finite sum of damped complex exponentials ``sum_k c_k exp(lambda_k t)``.

    ``poles`` are in per-second units, sampled at ``t = j * dt`` for
    ``j = 0 .. n-1``.
    """

    poles: np.ndarray
    coeffs: np.ndarray
    dt: float
    n: int

    def __post_init__(self):
        poles = _complex_1d(self.poles, "poles")
        coeffs = _complex_1d(self.coeffs, "coeffs")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "dt", float(self.dt))
        if int(self.n) != self.n:
            raise ContractError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

        if poles.shape != coeffs.shape:
            raise ContractError(f"{poles.size} poles but {coeffs.size} coefficients")
        if poles.size == 0:
            raise ContractError("a model needs at least one pole")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ContractError(f"dt must be positive, got {self.dt}")
        if self.n < 2 or self.n % 2:
            raise ContractError(f"n must be even and >= 2, got {self.n}")
        if self.p > self.n // 2:
            raise ContractError(f"p = {self.p} exceeds n/2 = {self.n // 2}")
        if np.any(poles.real > GROWTH_TOL):
            k = int(np.argmax(poles.real))
            raise ContractError(f"pole {k} has Re(lambda) = {poles[k].real:.3g} > 0 (growing mode)")
        if np.any(coeffs == 0):
            raise ContractError("all coefficients must be nonzero")
        diff = np.abs(poles[:, None] - poles[None, :])
        np.fill_diagonal(diff, np.inf)
        if np.any(diff == 0):
            raise ContractError("poles must be pairwise distinct")

    @property
    def p(self):
        return int(self.poles.size)

    @property
    def mus(self):
        return np.exp(self.poles * self.dt)

    @property
    def duration(self):
        return self.n * self.dt

    def __eq__(self, other):
        if not isinstance(other, SignalModel):
            return NotImplemented
        return (
            self.dt == other.dt
            and self.n == other.n
            and np.array_equal(self.poles, other.poles)
            and np.array_equal(self.coeffs, other.coeffs)
        )


@dataclass(frozen=True, eq=False)
class SampledSignal:
    samples: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        f = _complex_1d(self.samples, "samples")
        object.__setattr__(self, "samples", f)
        object.__setattr__(self, "dt", float(self.dt))
        if f.size < 2 or f.size % 2:
            raise ContractError(f"signal length must be even and >= 2, got {f.size}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ContractError(f"dt must be positive, got {self.dt}")

    @property
    def n(self):
        return int(self.samples.size)

    @property
    def times(self):
        return np.arange(self.n) * self.dt

    def __eq__(self, other):
        if not isinstance(other, SampledSignal):
            return NotImplemented
        return self.dt == other.dt and np.array_equal(self.samples, other.samples)


def sample(model):
    """Evaluate the model at ``t_j = j * dt``."""
    j = np.arange(model.n)
    exponents = np.outer(j * model.dt, model.poles)
    return SampledSignal(np.exp(exponents) @ model.coeffs, model.dt)


def add_reference_pole(signal, offset):
    """Shift every sample by ``offset``, which adds the pole ``lambda = 0``."""
    offset = complex(offset)
    if offset == 0:
        raise ContractError("reference offset must be nonzero")
    return SampledSignal(signal.samples + offset, signal.dt)


def add_noise(signal, sigma, seed):
    """Circular complex Gaussian noise, ``sigma`` per real component."""
    if not sigma >= 0:
        raise ContractError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return SampledSignal(signal.samples.copy(), signal.dt)
    rng = np.random.default_rng(seed)
    noise = rng.normal(scale=sigma, size=(2, signal.n))
    return SampledSignal(signal.samples + noise[0] + 1j * noise[1], signal.dt)


def is_conjugate_closed(model, tol=1e-12):
    """True when the model describes a real-valued signal.

    Each term must be real itself or have a partner with conjugate pole and
    conjugate coefficient.
    """
    unmatched = list(range(model.p))
    while unmatched:
        k = unmatched.pop(0)
        lam, c = model.poles[k], model.coeffs[k]
        scale = max(1.0, abs(lam))
        if abs(lam.imag) <= tol * scale and abs(c.imag) <= tol * max(1.0, abs(c)):
            continue
        for idx, other in enumerate(unmatched):
            if (abs(model.poles[other] - lam.conjugate()) <= tol * scale
                    and abs(model.coeffs[other] - c.conjugate()) <= tol * max(1.0, abs(c))):
                unmatched.pop(idx)
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class DftSpectrum:
    """DFT magnitudes in ascending angular frequency, plus detected peaks."""

    frequencies: np.ndarray
    magnitudes: np.ndarray
    peaks: list = field(default_factory=list)

    @property
    def peak_frequencies(self):
        return [f for f, _ in self.peaks]


def _circular_runs(values):
    """Maximal runs of equal values on a ring, as (start, length) pairs."""
    n = values.size
    if np.all(values == values[0]):
        return [(0, n)]
    # start from a position whose predecessor differs so no run wraps badly
    first = next(i for i in range(n) if values[i] != values[i - 1])
    runs = []
    i = first
    visited = 0
    while visited < n:
        start = i
        length = 1
        while length < n and values[(start + length) % n] == values[start]:
            length += 1
        runs.append((start, length))
        visited += length
        i = (start + length) % n
    return runs


def _prominence(values, start, length):
    """Height above the higher of the two lowest saddles on the ring."""
    n = values.size
    height = values[start]
    left_min = height
    i = (start - 1) % n
    steps = 0
    while steps < n - length and values[i] <= height:
        left_min = min(left_min, values[i])
        i = (i - 1) % n
        steps += 1
    right_min = height
    i = (start + length) % n
    steps = 0
    while steps < n - length and values[i] <= height:
        right_min = min(right_min, values[i])
        i = (i + 1) % n
        steps += 1
    return height - max(left_min, right_min)


def dft_baseline(signal, min_prominence=1e-3):
    """DFT magnitude spectrum with local-maximum peak picking.

    Peaks are strict local maxima on the circular frequency axis. A plateau
    counts once, at its lowest index in ascending-frequency order. Peaks
    whose prominence is below ``min_prominence * max(magnitude)`` are
    discarded, which suppresses ripple from truncating damped components.
    Frequencies are angular, in ``[-pi/dt, pi/dt)``.
    """
    if signal.n < 2:
        raise ContractError("need at least two samples")
    spectrum = np.fft.fftshift(np.fft.fft(signal.samples))
    freqs = np.fft.fftshift(np.fft.fftfreq(signal.n, d=signal.dt)) * 2 * np.pi
    mags = np.abs(spectrum)
    top = mags.max()
    peaks = []
    if top > 0:
        n = mags.size
        for start, length in _circular_runs(mags):
            if length == n:
                peaks.append((float(freqs[0]), float(mags[0])))
                break
            before = mags[(start - 1) % n]
            after = mags[(start + length) % n]
            if before < mags[start] and after < mags[start]:
                if _prominence(mags, start, length) >= min_prominence * top:
                    # lowest index of a plateau; runs may wrap past the end
                    idx = start if start + length <= n else 0
                    peaks.append((float(freqs[idx]), float(mags[idx])))
        peaks.sort()
    return DftSpectrum(frequencies=freqs, magnitudes=mags, peaks=peaks)


def random_model(rng, p, n, dt=1.0, alpha_range=(0.0, 0.5), beta_max=0.8 * np.pi,
                 coeff_range=(0.5, 2.0), min_separation=0.05, max_tries=10000):
    """Draw a model with well-separated discrete poles.

    ``alpha_range`` and ``beta_max`` refer to ``alpha * dt`` and ``beta * dt``.
    ``beta * dt`` is drawn from ``(-beta_max, beta_max]``.
    """
    for _ in range(max_tries):
        alpha = rng.uniform(*alpha_range, size=p)
        beta = -rng.uniform(-beta_max, beta_max, size=p)
        lam_dt = -alpha + 1j * beta
        mu = np.exp(lam_dt)
        gaps = np.abs(mu[:, None] - mu[None, :])
        np.fill_diagonal(gaps, np.inf)
        if p == 1 or gaps.min() > min_separation:
            break
    else:
        raise RuntimeError("could not draw separated poles")
    mags = rng.uniform(*coeff_range, size=p)
    phases = rng.uniform(-np.pi, np.pi, size=p)
    return SignalModel(poles=lam_dt / dt, coeffs=mags * np.exp(1j * phases), dt=dt, n=n)

"""Inner-loop kernels with interchangeable numba and numpy implementations.

Each kernel exists twice: a loop version compiled with numba (``*_nb``) and a
vectorised numpy version (``*_np``). The public name is bound to one of them
according to :data:`qpencil._accel.USE_NUMBA`. Both versions are kept in
:data:`KERNELS` so they can be benchmarked and cross-checked.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "KERNELS",
    "hankel",
    "vandermonde",
    "modified_swap",
    "swap_channel",
    "partial_trace_first",
    "swap_block_factors",
]


# -- Hankel -------------------------------------------------------------------

def _hankel_np(f, start, m):
    window = f[start:start + 2 * m - 1]
    return np.lib.stride_tricks.sliding_window_view(window, m).copy()


@njit
def _hankel_nb(f, start, m):
    out = np.empty((m, m), dtype=np.complex128)
    for j in range(m):
        for k in range(m):
            out[j, k] = f[start + j + k]
    return out


# -- Vandermonde --------------------------------------------------------------

def _vandermonde_np(mu, rows):
    powers = np.arange(rows)
    return mu[np.newaxis, :] ** powers[:, np.newaxis]


@njit
def _vandermonde_nb(mu, rows):
    p = mu.shape[0]
    out = np.empty((rows, p), dtype=np.complex128)
    for k in range(p):
        for j in range(rows):
            out[j, k] = mu[k] ** j
    return out


# -- modified swap matrix -----------------------------------------------------

def _modified_swap_np(fext):
    n = fext.shape[0]
    out = np.zeros((n * n, n * n), dtype=np.complex128)
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    # |j><k| (x) ... maps |j,k> -> F_jk |k,j>
    out[(k * n + j).ravel(), (j * n + k).ravel()] = fext[j, k].ravel()
    return out


@njit
def _modified_swap_nb(fext):
    n = fext.shape[0]
    out = np.zeros((n * n, n * n), dtype=np.complex128)
    for j in range(n):
        for k in range(n):
            out[k * n + j, j * n + k] = fext[j, k]
    return out


# -- exp(-i S dt) in closed form ----------------------------------------------

def swap_block_factors(fext, dt):
    """Entries of ``exp(-i S dt)`` for the modified swap matrix ``S``.

    ``S`` only couples ``|a,b>`` with ``|b,a>``, so the propagator has two
    nonzeros per row: ``diag[a, b]`` on ``|a,b>`` itself and ``off[a, b]``
    on ``|b,a>``.
    """
    fext = np.asarray(fext, dtype=np.complex128)
    w = np.abs(fext)
    diag = np.cos(w * dt).astype(np.complex128)
    # sin(w dt)/w without the 0/0
    off = -1j * dt * np.sinc(w * dt / np.pi) * fext.T
    idx = np.arange(fext.shape[0])
    diag[idx, idx] = np.exp(-1j * fext[idx, idx] * dt)
    off[idx, idx] = 0.0
    return diag, off


def _swap_channel_np(diag, off, rho, sigma):
    cd = diag.conj()[:, np.newaxis, :]
    co = off.conj()[:, np.newaxis, :]
    d = diag[:, :, np.newaxis]
    o = off[:, :, np.newaxis]
    rho_diag = np.diag(rho)[:, np.newaxis, np.newaxis]
    sig_diag = np.diag(sigma)[:, np.newaxis, np.newaxis]
    t1 = d * rho_diag * sigma[np.newaxis, :, :] + o * rho.T[:, :, np.newaxis] * sigma[:, np.newaxis, :]
    t2 = d * rho[:, np.newaxis, :] * sigma.T[:, :, np.newaxis] + o * rho[np.newaxis, :, :] * sig_diag
    return np.sum(cd * t1 + co * t2, axis=0)


@njit
def _swap_channel_nb(diag, off, rho, sigma):
    n = sigma.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        raa = rho[a, a]
        saa = sigma[a, a]
        for b in range(n):
            dab = diag[a, b]
            oab = off[a, b]
            rba = rho[b, a]
            sba = sigma[b, a]
            for bp in range(n):
                t1 = dab * raa * sigma[b, bp] + oab * rba * sigma[a, bp]
                t2 = dab * rho[a, bp] * sba + oab * rho[b, bp] * saa
                out[b, bp] += np.conj(diag[a, bp]) * t1 + np.conj(off[a, bp]) * t2
    return out


# -- partial trace ------------------------------------------------------------

def _partial_trace_first_np(rho, dim_a, dim_b):
    return np.einsum("ijik->jk", rho.reshape(dim_a, dim_b, dim_a, dim_b))


@njit
def _partial_trace_first_nb(rho, dim_a, dim_b):
    out = np.zeros((dim_b, dim_b), dtype=np.complex128)
    for i in range(dim_a):
        base = i * dim_b
        for j in range(dim_b):
            for k in range(dim_b):
                out[j, k] += rho[base + j, base + k]
    return out


KERNELS = {
    "hankel": (_hankel_np, _hankel_nb),
    "vandermonde": (_vandermonde_np, _vandermonde_nb),
    "modified_swap": (_modified_swap_np, _modified_swap_nb),
    "swap_channel": (_swap_channel_np, _swap_channel_nb),
    "partial_trace_first": (_partial_trace_first_np, _partial_trace_first_nb),
}

_pick = 1 if USE_NUMBA else 0


def _c128(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def hankel(f, start, m):
    """Square Hankel block ``out[j, k] = f[start + j + k]``."""
    return KERNELS["hankel"][_pick](_c128(f), int(start), int(m))


def vandermonde(mu, rows):
    """``out[j, k] = mu[k] ** j`` for ``j < rows``."""
    return KERNELS["vandermonde"][_pick](_c128(mu), int(rows))


def modified_swap(fext):
    return KERNELS["modified_swap"][_pick](_c128(fext))


def swap_channel(fext, rho, sigma, dt):
    """``tr_1(U (rho x sigma) U^dagger)`` with ``U = exp(-i S dt)``, in O(n^3)."""
    diag, off = swap_block_factors(fext, dt)
    return KERNELS["swap_channel"][_pick](_c128(diag), _c128(off), _c128(rho), _c128(sigma))


def partial_trace_first(rho, dim_a, dim_b):
    return KERNELS["partial_trace_first"][_pick](_c128(rho), int(dim_a), int(dim_b))

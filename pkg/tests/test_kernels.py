import numpy as np
import pytest

from qpencil import kernels
from qpencil._accel import HAVE_NUMBA

from conftest import random_complex

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _hermitian_ext(rng, m):
    b = random_complex(rng, m, m)
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    out[:m, m:] = b
    out[m:, :m] = b.conj().T
    return out


def _density(rng, d):
    a = random_complex(rng, d, d)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_twins_agree(rng):
    f = random_complex(rng, 12)
    mu = np.exp(random_complex(rng, 3) * 0.2)
    fe = _hermitian_ext(rng, 2)
    diag, off = kernels.swap_block_factors(fe, 0.1)
    rho, sigma = _density(rng, 4), _density(rng, 4)
    big = random_complex(rng, 12, 12)
    cases = {
        "hankel": (f, 1, 5),
        "vandermonde": (mu, 6),
        "modified_swap": (fe,),
        "swap_channel": (diag, off, rho, sigma),
        "partial_trace_first": (big, 3, 4),
    }
    assert set(cases) == set(kernels.KERNELS)
    for name, args in cases.items():
        np_fn, nb_fn = kernels.KERNELS[name]
        np.testing.assert_allclose(nb_fn(*args), np_fn(*args), atol=1e-13, err_msg=name)


def test_env_flag_selects_numpy(monkeypatch):
    import importlib

    import qpencil._accel as accel

    monkeypatch.setenv("QPENCIL_DISABLE_NUMBA", "1")
    try:
        importlib.reload(accel)
        importlib.reload(kernels)
        assert not accel.USE_NUMBA
        assert kernels._pick == 0
    finally:
        monkeypatch.delenv("QPENCIL_DISABLE_NUMBA")
        importlib.reload(accel)
        importlib.reload(kernels)
    assert kernels._pick == (1 if accel.USE_NUMBA else 0)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpencil.errors import ContractError, IllConditionedError
from qpencil.numerics import (
    eig_general,
    eig_hermitian,
    evolve,
    lstsq,
    partial_trace_first,
    spectral_norm,
    svd,
    trace_norm,
)

from conftest import random_complex


def test_svd_reconstructs_and_sorts(rng):
    a = random_complex(rng, 6, 4)
    dec = svd(a)
    assert np.all(np.diff(dec.s) <= 0)
    np.testing.assert_allclose(dec.reconstruct(), a, atol=1e-12)
    np.testing.assert_allclose(dec.u.conj().T @ dec.u, np.eye(4), atol=1e-12)


def test_eig_general_diagonalises(rng):
    a = random_complex(rng, 5, 5)
    w, x = eig_general(a)
    np.testing.assert_allclose(a @ x, x * w, atol=1e-10)


def test_eig_general_rejects_rectangular():
    with pytest.raises(ContractError):
        eig_general(np.ones((2, 3)))


def test_eig_hermitian_ascending_and_checks(rng):
    a = random_complex(rng, 4, 4)
    h = a + a.conj().T
    lam, q = eig_hermitian(h)
    assert np.all(np.diff(lam) >= 0)
    np.testing.assert_allclose(q @ np.diag(lam) @ q.conj().T, h, atol=1e-12)
    with pytest.raises(ContractError):
        eig_hermitian(a)


def test_evolve_matches_expm(rng):
    from scipy.linalg import expm

    a = random_complex(rng, 4, 4)
    h = a + a.conj().T
    u = evolve(h, 0.7)
    np.testing.assert_allclose(u, expm(-0.7j * h), atol=1e-12)
    psi = random_complex(rng, 4)
    np.testing.assert_allclose(evolve(h, 0.7, psi), u @ psi, atol=1e-12)


def test_lstsq_exact_and_ill_conditioned(rng):
    a = random_complex(rng, 8, 3)
    x = random_complex(rng, 3)
    np.testing.assert_allclose(lstsq(a, a @ x), x, atol=1e-12)
    bad = np.column_stack([a[:, 0], a[:, 0], a[:, 1]])
    with pytest.raises(IllConditionedError):
        lstsq(bad, a @ x)
    with pytest.raises(ContractError):
        lstsq(a.T, x)


def test_partial_trace_of_product_state(rng):
    ra = random_complex(rng, 3, 3)
    ra = ra @ ra.conj().T
    ra /= np.trace(ra)
    rb = random_complex(rng, 2, 2)
    rb = rb @ rb.conj().T
    rb /= np.trace(rb)
    np.testing.assert_allclose(partial_trace_first(np.kron(ra, rb), 3, 2), rb, atol=1e-14)
    with pytest.raises(ContractError):
        partial_trace_first(np.eye(5), 2, 2)


def test_norms():
    a = np.diag([3.0, -4.0])
    assert spectral_norm(a) == pytest.approx(4.0)
    assert trace_norm(a) == pytest.approx(7.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_svd_singular_values_nonnegative(n, seed):
    a = random_complex(np.random.default_rng(seed), n, n)
    s = svd(a).s
    assert np.all(s >= 0)
    assert s[0] == pytest.approx(np.linalg.norm(a, 2))

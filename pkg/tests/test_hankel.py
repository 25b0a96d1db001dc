import numpy as np
import pytest

from qpencil.errors import ContractError
from qpencil.hankel import berry_diagnostics, build_hankel_pair, extend, vandermonde_factorization
from qpencil.signal import SampledSignal, random_model, sample

from conftest import random_complex


def test_hankel_entries():
    pair = build_hankel_pair(SampledSignal(np.arange(6.0)))
    np.testing.assert_array_equal(pair.f1, [[0, 1, 2], [1, 2, 3], [2, 3, 4]])
    np.testing.assert_array_equal(pair.f2, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])


def test_hankel_needs_four_samples():
    with pytest.raises(ContractError):
        build_hankel_pair(SampledSignal(np.ones(2)))


def test_vandermonde_factorization(rng):
    for _ in range(5):
        m = random_model(rng, 3, 20)
        pair = build_hankel_pair(sample(m))
        vf = vandermonde_factorization(m)
        assert np.max(np.abs(vf.f1() - pair.f1)) < 1e-12
        assert np.max(np.abs(vf.f2() - pair.f2)) < 1e-12


def test_extended_spectrum_is_plus_minus_singular_values(rng):
    f = random_complex(rng, 5, 5)
    fe = extend(f)
    lam = np.linalg.eigvalsh(fe.matrix)
    s = np.linalg.svd(f, compute_uv=False)
    np.testing.assert_allclose(np.sort(lam), np.sort(np.r_[s, -s]), atol=1e-12)
    assert fe.dim == 10 and fe.half == 5


def test_extend_rank_one_example():
    fe = extend(np.array([[1, 0.5], [0.5, 0.25]]))
    lam = np.linalg.eigvalsh(fe.matrix)
    np.testing.assert_allclose(lam, [-1.25, 0, 0, 1.25], atol=1e-14)


def test_berry_constant_signal_gershgorin():
    fe = extend(build_hankel_pair(SampledSignal(np.ones(8))).f1)
    d = berry_diagnostics(fe, 1.0, 1e-3)
    assert d.gershgorin_condition
    assert d.lambda_spec == pytest.approx(4.0)
    assert d.lambda_one == pytest.approx(4.0)
    assert d.sparsity == 4
    assert d.query_estimate == pytest.approx(np.sqrt(4 * 4 * 4 * 1 / 1e-3))


def test_berry_rejects_bad_arguments():
    with pytest.raises(ContractError):
        berry_diagnostics(np.eye(2), 0, 1e-3)
    with pytest.raises(ContractError):
        berry_diagnostics(np.eye(2), 1, 0)

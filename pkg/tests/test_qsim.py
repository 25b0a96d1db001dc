import numpy as np
import pytest

from qpencil.errors import ContractError, RegisterRangeError
from qpencil.hankel import build_hankel_pair, extend
from qpencil.qsim import (
    DensityMatrix,
    PhaseRegister,
    PureState,
    build_chi,
    exact_evolution_step,
    measure,
    modified_swap,
    phase_estimation,
    qpca_closed_form,
    qpca_embedding,
    spectral_groups,
    swap_channel_step,
    swap_channel_step_dense,
)
from qpencil.numerics import trace_norm
from qpencil.signal import random_model, sample

from conftest import random_complex


def _ext(rng, m):
    return extend(random_complex(rng, m, m))


def _density(rng, d):
    a = random_complex(rng, d, d)
    r = a @ a.conj().T
    return DensityMatrix(r / np.trace(r))


def test_pure_state_validation():
    with pytest.raises(ContractError):
        PureState(np.array([1.0, 1.0]))
    s = PureState.normalized([1.0, 1.0], (("a", 2),))
    assert s.dim == 2
    with pytest.raises(ContractError):
        PureState.normalized([1.0, 0, 0], (("a", 2),))


def test_density_validation():
    with pytest.raises(ContractError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(ContractError):
        DensityMatrix(np.eye(2))


def test_modified_swap_structure(rng):
    fe = _ext(rng, 2)
    s = modified_swap(fe)
    n = fe.dim
    assert np.all(np.count_nonzero(s, axis=1) <= 1)
    np.testing.assert_allclose(s, s.conj().T)
    for j in range(n):
        for k in range(n):
            assert s[k * n + j, j * n + k] == fe.matrix[j, k]


def test_swap_channel_matches_dense(rng):
    fe = _ext(rng, 2)
    sigma = _density(rng, 4)
    rho = _density(rng, 4)
    a = swap_channel_step(sigma, fe, 0.07, rho.matrix).matrix
    b = swap_channel_step_dense(sigma, fe, 0.07, rho.matrix).matrix
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_swap_channel_second_order(rng):
    fe = _ext(rng, 2)
    sigma = _density(rng, 4)
    dts = np.array([0.1, 0.05, 0.025, 0.0125])
    errs = [trace_norm(swap_channel_step(sigma, fe, dt).matrix - exact_evolution_step(sigma, fe, dt).matrix)
            for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 1.8 <= slope <= 2.2


def test_chi_layout_and_norm(rng):
    f = random_complex(rng, 3, 3)
    chi, a, c = build_chi(f)
    assert chi.layout == (("row", 3), ("col", 3), ("flag", 2))
    np.testing.assert_allclose(chi.tensor()[..., 0] * np.sqrt(c), f)
    assert a == pytest.approx(1 / np.max(np.abs(f.conj().T @ f)))


def test_qpca_closed_form(rng):
    for m in (2, 3, 5):
        f = random_complex(rng, m, m)
        g, gt, z = qpca_embedding(f)
        assert np.trace(z.matrix).real == pytest.approx(1, abs=1e-12)
        assert z.eigenvalues().min() > -1e-12
        np.testing.assert_allclose(z.eigenvalues(), qpca_closed_form(f), atol=1e-12)


def test_qpca_trivial():
    _, _, z = qpca_embedding(np.array([[1.0]]))
    np.testing.assert_allclose(z.matrix, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_phase_estimation_rank_one():
    fe = extend(np.array([[1, 0.5], [0.5, 0.25]]))
    u = np.array([1, 0.5]) / np.sqrt(1.25)
    psi = PureState(np.r_[u, 0, 0])
    out = phase_estimation(fe.matrix, psi)
    np.testing.assert_allclose(sorted(out.eigenvalues), [-1.25, 1.25], atol=1e-12)
    np.testing.assert_allclose(np.abs(out.amplitudes), [1 / np.sqrt(2)] * 2, atol=1e-12)
    np.testing.assert_allclose(out.reconstruct(), psi.amplitudes, atol=1e-12)


def test_phase_estimation_register_bins(rng):
    h = np.diag([0.1, 0.1001, -0.3])
    reg = PhaseRegister(4, 1.0)
    groups = spectral_groups(h, reg)
    assert len(groups) == 2
    with pytest.raises(RegisterRangeError):
        reg.bin_index(np.array([0.6]))


def test_phase_estimation_register_resolves(rng):
    h = np.diag([0.1, 0.3, -0.3])
    groups = spectral_groups(h, PhaseRegister(6, 1.0))
    assert len(groups) == 3


def test_measure_probabilities_and_shots():
    psi = PureState.normalized([1.0, 1.0j])
    projs = [np.diag([1.0, 0]), np.diag([0, 1.0])]
    np.testing.assert_allclose(measure(psi, projs), [0.5, 0.5])
    a = measure(psi, projs, shots=1000, seed=3)
    b = measure(psi, projs, shots=1000, seed=3)
    np.testing.assert_array_equal(a, b)
    assert a.sum() == 1000
    with pytest.raises(ContractError):
        measure(psi, [np.diag([1.0, 0])], shots=10, seed=0)
    with pytest.raises(ContractError):
        measure(psi, [np.ones((2, 2))])


def test_hankel_extended_pe(rng):
    m = random_model(rng, 2, 12)
    fe = extend(build_hankel_pair(sample(m)).f1)
    psi = PureState.normalized(random_complex(rng, fe.dim))
    out = phase_estimation(fe.matrix, psi)
    np.testing.assert_allclose(out.reconstruct(), psi.amplitudes, atol=1e-12)
    assert np.sum(np.abs(out.amplitudes) ** 2) == pytest.approx(1, abs=1e-12)

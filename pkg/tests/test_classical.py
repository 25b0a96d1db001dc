import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpencil.classical import (
    RankSpec,
    bauer_fike_bound,
    closed_form_column_norms_sq,
    estimate,
    fit_coefficients,
    fit_coefficients_real,
    matched_displacement,
    order_poles,
    pencil_matrix,
    real_design_matrix,
    truncate,
)
from qpencil.errors import CollinearityError, ContractError, DefectiveMatrixError, RankDeficiencyError
from qpencil.hankel import build_hankel_pair
from qpencil.numerics import svd
from qpencil.signal import SampledSignal, SignalModel, add_noise, random_model, sample


def _match_err(a, b):
    return matched_displacement(np.asarray(a), np.asarray(b))


def test_halving_sequence():
    rep = estimate(SampledSignal([1, 0.5, 0.25, 0.125]))
    assert rep.effective_rank == 1
    assert rep.poles[0] == pytest.approx(-np.log(2), abs=1e-12)
    assert rep.coeffs[0] == pytest.approx(1, abs=1e-12)


def test_constant_signal():
    rep = estimate(SampledSignal(np.ones(8)))
    assert rep.poles[0] == pytest.approx(0, abs=1e-12)
    assert rep.coeffs[0] == pytest.approx(1, abs=1e-12)
    assert rep.residual_norm < 1e-12


@pytest.mark.parametrize("p", [1, 2, 3, 4, 6])
def test_noiseless_recovery(rng, p):
    for _ in range(4):
        m = random_model(rng, p, 64)
        rep = estimate(sample(m))
        assert rep.effective_rank == p
        order = [int(np.argmin(np.abs(rep.poles - lam))) for lam in m.poles]
        assert np.max(np.abs(rep.poles[order] - m.poles)) < 1e-8
        assert np.max(np.abs(rep.coeffs[order] - m.coeffs)) < 1e-8


def test_report_ordering_and_dict(rng):
    rep = estimate(sample(random_model(rng, 3, 32)))
    mags = np.abs(rep.mus)
    assert np.all(np.diff(mags) <= 1e-12)
    d = rep.as_dict()
    assert set(d) >= {"poles", "mus", "coeffs", "effective_rank", "residual_norm",
                      "fit_quality", "cond_s1", "cond_w"}
    assert d["poles"][0].keys() == {"re", "im"}


def test_order_poles_ties_by_phase():
    mus = np.array([np.exp(1j), np.exp(-1j), 0.5])
    np.testing.assert_array_equal(order_poles(mus), [1, 0, 2])


def test_rank_spec_parse_roundtrip():
    for text in ("auto", "p=3", "thresh=0.5", "auto=1e-06"):
        assert str(RankSpec.parse(text)) == text
    with pytest.raises(ContractError):
        RankSpec.parse("p=x")
    assert RankSpec.parse("p=2").plus(1) == RankSpec.exact(3)
    assert RankSpec.auto().plus(1) == RankSpec.auto()


def test_rank_too_large():
    sig = sample(SignalModel([-0.1], [1], 1, 16))
    with pytest.raises(RankDeficiencyError):
        estimate(sig, RankSpec.exact(3))


def test_threshold_rank(rng):
    m = random_model(rng, 2, 32)
    pair = build_hankel_pair(sample(m))
    dec = svd(pair.f1)
    t = truncate(dec, RankSpec.threshold(dec.s[1] * 0.5))
    assert t.rank == 2


def test_eckart_young(rng):
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    dec = svd(a)
    t = truncate(dec, RankSpec.exact(3))
    err = np.linalg.norm(a - t.reconstruct())
    assert err == pytest.approx(np.sqrt(np.sum(dec.s[3:] ** 2)), rel=1e-10)


def test_auto_rank_with_noise(rng):
    m = random_model(rng, 2, 64, alpha_range=(0.0, 0.05))
    noisy = add_noise(sample(m), 1e-4, 3)
    assert estimate(noisy).effective_rank == 2


def test_shift_covariance(rng):
    m = random_model(rng, 3, 32)
    sig = sample(m)
    phase = np.exp(0.7j)
    a = estimate(sig)
    b = estimate(SampledSignal(sig.samples * phase, sig.dt))
    np.testing.assert_allclose(b.mus, a.mus, atol=1e-10)
    np.testing.assert_allclose(b.coeffs, a.coeffs * phase, atol=1e-10)


def test_duplicate_poles_collinear():
    with pytest.raises(CollinearityError):
        fit_coefficients(np.array([0.5, 0.5]), SampledSignal(np.ones(4)))


def test_real_split_norms_and_coefficients(rng):
    m = random_model(rng, 3, 40)
    sig = sample(m)
    real = fit_coefficients_real(m.poles, sig)
    cplx = fit_coefficients(m.mus, sig)
    np.testing.assert_allclose(real.coeffs, cplx.coeffs, atol=1e-10)
    np.testing.assert_allclose(real.col_norms_sq, real.col_norms_sq_closed, rtol=1e-12)


def test_closed_form_norm_alpha_zero():
    assert closed_form_column_norms_sq(0.0, 17)[0] == 17.0
    w = real_design_matrix([0.0], [1.3], 17)
    np.testing.assert_allclose(np.sum(w * w, axis=0), [17, 17], rtol=1e-13)


def test_growing_mode_flagged():
    sig = SampledSignal(1.05 ** np.arange(8))
    rep = estimate(sig)
    assert list(rep.growing) == [0]
    assert rep.as_dict()["growing_modes"] == [0]


def test_bauer_fike_zero_and_defective():
    assert bauer_fike_bound(np.diag([1.0, 2.0]), np.zeros((2, 2))) == 0.0
    with pytest.raises(DefectiveMatrixError):
        bauer_fike_bound(np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2) * 1e-3)
    with pytest.raises(ContractError):
        bauer_fike_bound(np.eye(2), np.eye(3))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1e-8, 1e-1))
def test_bauer_fike_never_violated(seed, size):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    d = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    d *= size / np.linalg.norm(d, 2)
    moved = np.linalg.eigvals(a + d)
    base = np.linalg.eigvals(a)
    assert _match_err(moved, base) <= bauer_fike_bound(a, d) * (1 + 1e-9)


def test_matched_displacement_large_sets(rng):
    a = rng.normal(size=12) + 1j * rng.normal(size=12)
    perm = rng.permutation(12)
    assert matched_displacement(a, a[perm]) == 0.0
    assert matched_displacement(a + 0.01, a[perm]) <= 0.01 + 1e-15


def test_pencil_matrix_eigenvalues_are_mus(rng):
    m = random_model(rng, 3, 24)
    pair = build_hankel_pair(sample(m))
    t = truncate(svd(pair.f1), RankSpec.exact(3))
    pm = pencil_matrix(pair.f2, t)
    assert _match_err(np.linalg.eigvals(pm.matrix), m.mus) < 1e-10

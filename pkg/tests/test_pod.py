import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from burgers_pod.linalg import svd
from burgers_pod.pod import (
    POD,
    DegenerateSpectrumError,
    EnergyConvention,
    TruncationError,
    covariance_crosscheck,
    energy_spectrum,
    truncate,
)


def test_spectrum_sigma_squared():
    s = energy_spectrum([2.0, 1.0])
    np.testing.assert_allclose(s.r, [0.8, 0.2], rtol=1e-15)
    np.testing.assert_allclose(s.cumulative, [0.8, 1.0], rtol=1e-15)
    assert s.convention is EnergyConvention.SIGMA_SQUARED


def test_spectrum_sigma_linear():
    s = energy_spectrum([2.0, 1.0], "sigma_linear")
    np.testing.assert_allclose(s.r, [2 / 3, 1 / 3], rtol=1e-15)


def test_spectrum_ends_at_one_exactly(rng):
    s = energy_spectrum(np.sort(rng.random(30))[::-1])
    assert s.cumulative[-1] == 1.0
    assert np.all(np.diff(s.cumulative) >= 0)


def test_spectrum_trailing_zeros():
    s = energy_spectrum([3.0, 0.0, 0.0])
    np.testing.assert_array_equal(s.cumulative, [1.0, 1.0, 1.0])


@pytest.mark.parametrize("bad", [[], [1.0, 2.0], [1.0, -1.0], [[1.0]]])
def test_spectrum_invalid(bad):
    with pytest.raises(ValueError):
        energy_spectrum(bad)


def test_spectrum_all_zero():
    with pytest.raises(DegenerateSpectrumError):
        energy_spectrum([0.0, 0.0])


def test_truncate_bounds(rng):
    f = svd(rng.standard_normal((6, 9)))
    assert truncate(f, 6).n_modes == 6
    for n in (0, 7, 2.5):
        with pytest.raises(TruncationError):
            truncate(f, n)


def test_truncate_full_rank_reconstructs(rng):
    a = rng.standard_normal((6, 9))
    basis = truncate(svd(a), 6)
    np.testing.assert_allclose(basis.reconstruct(), a, atol=1e-12)
    assert basis.captured_energy == 1.0


def test_case1_energy(case1_sim):
    f = svd(case1_sim.snapshots.data)
    # frozen from the first run: 0.99999757
    assert truncate(f, 1).captured_energy >= 0.9
    assert truncate(f, 1).captured_energy == pytest.approx(0.9999975667, abs=1e-9)
    assert truncate(f, 5).captured_energy >= 0.99


def test_pod_basis_is_optimal(rng):
    # Eckart-Young: no other rank-k orthonormal basis captures more of ||a||_F^2
    for _ in range(5):
        a = rng.standard_normal((6, 20))
        for k in (1, 2, 3):
            phi = truncate(svd(a), k).phi
            best = np.linalg.norm(phi.T @ a) ** 2
            for _ in range(100):
                q, _ = np.linalg.qr(rng.standard_normal((6, k)))
                assert np.linalg.norm(q.T @ a) ** 2 <= best * (1 + 1e-12)


def test_crosscheck_rank_one(rng):
    a = np.outer(rng.standard_normal(8), rng.standard_normal(15))
    rep = covariance_crosscheck(a)
    assert rep.n_compared == 1
    assert rep.max_value_deviation <= 1e-8
    assert rep.subspace_angle <= 1e-6


def test_crosscheck_case1(case1_sim):
    rep = covariance_crosscheck(case1_sim.snapshots)
    assert rep.n_compared >= 2
    assert rep.max_value_deviation <= 1e-8
    assert rep.subspace_angle <= 1e-6


def test_crosscheck_zero_raises():
    with pytest.raises(DegenerateSpectrumError):
        covariance_crosscheck(np.zeros((4, 5)))


def test_estimator_fit_transform(rng):
    X = rng.standard_normal((20, 6))
    pod = POD(n_modes=3).fit(X)
    assert pod.components_.shape == (3, 6)
    assert pod.n_modes_ == 3
    Z = pod.transform(X)
    assert Z.shape == (20, 3)
    np.testing.assert_allclose(Z, X @ pod.components_.T)
    full = POD().fit(X)
    np.testing.assert_allclose(full.inverse_transform(full.transform(X)), X, atol=1e-12)


def test_estimator_energy_fraction(case1_sim):
    X = case1_sim.snapshots.data.T
    assert POD(n_modes=0.99).fit(X).n_modes_ == 1
    assert POD(n_modes=0.9999999).fit(X).n_modes_ == 2


def test_estimator_params_and_clone():
    pod = POD(n_modes=4, energy_convention="sigma_linear")
    assert pod.get_params() == {"n_modes": 4, "energy_convention": "sigma_linear"}
    c = clone(pod)
    assert c.get_params() == pod.get_params()
    assert not hasattr(c, "basis_")


def test_estimator_in_pipeline(rng):
    X = rng.standard_normal((10, 5))
    pipe = make_pipeline(FunctionTransformer(), POD(n_modes=2))
    assert pipe.fit_transform(X).shape == (10, 2)


def test_estimator_validation(rng):
    pod = POD(n_modes=2)
    with pytest.raises(Exception):
        pod.transform(rng.standard_normal((3, 4)))
    pod.fit(rng.standard_normal((5, 4)))
    with pytest.raises(ValueError):
        pod.transform(rng.standard_normal((3, 5)))
    with pytest.raises(TruncationError):
        POD(n_modes=9).fit(rng.standard_normal((5, 4)))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slm.data import MixedDataset
from slm.moments import local_class_cov, local_mean, moments_at, pooled_cov


def _toy(seed=0, n1=12, n2=9, d=4, p=3):
    rng = np.random.default_rng(seed)
    return MixedDataset(
        z1=rng.standard_normal((n1, p)), u1=rng.integers(0, 2, (n1, d)),
        z2=rng.standard_normal((n2, p)), u2=rng.integers(0, 2, (n2, d)))


def test_theta_half_gives_global_mean():
    ds = _toy()
    u = np.array([1, 0, 1, 0])
    np.testing.assert_allclose(local_mean(ds.z1, ds.u1, u, 0.5),
                               ds.z1.mean(axis=0), atol=1e-12)


def test_theta_zero_gives_cell_mean():
    ds = _toy(seed=3, n1=40)
    u = ds.u1[0]
    cell = (ds.u1 == u).all(axis=1)
    np.testing.assert_allclose(local_mean(ds.z1, ds.u1, u, 0.0),
                               ds.z1[cell].mean(axis=0), atol=1e-12)


def test_local_cov_matches_direct_weighted_formula():
    ds = _toy(seed=1)
    u = np.array([0, 0, 1, 1])
    sigma = local_class_cov(ds.z1, ds.u1, u, 0.5)
    centered = ds.z1 - ds.z1.mean(axis=0)
    np.testing.assert_allclose(sigma, centered.T @ centered / ds.n1, atol=1e-12)


def test_local_cov_is_psd():
    ds = _toy(seed=2)
    for theta in (0.05, 0.2, 0.5):
        sigma = local_class_cov(ds.z1, ds.u1, np.array([1, 1, 0, 0]), theta)
        assert np.linalg.eigvalsh(sigma).min() >= -1e-10


def test_pooled_cov_weights():
    s1 = np.eye(2)
    s2 = 3.0 * np.eye(2)
    np.testing.assert_allclose(pooled_cov(s1, s2, 1, 3), 2.5 * np.eye(2))


def test_loo_mean_equals_physical_removal():
    ds = _toy(seed=4)
    u = np.array([1, 0, 0, 1])
    for i in (0, 5, ds.n1 - 1):
        loo = local_mean(ds.z1, ds.u1, u, 0.3, exclude=i)
        phys = local_mean(np.delete(ds.z1, i, axis=0),
                          np.delete(ds.u1, i, axis=0), u, 0.3)
        np.testing.assert_allclose(loo, phys, atol=1e-13)


def test_loo_moments_at_equals_rebuilt_dataset():
    ds = _toy(seed=5)
    u = np.array([0, 1, 1, 0])
    i = 3
    loo = moments_at(ds, u, 0.25, exclude=(1, i))
    rebuilt = MixedDataset(z1=np.delete(ds.z1, i, axis=0),
                           u1=np.delete(ds.u1, i, axis=0),
                           z2=ds.z2, u2=ds.u2)
    phys = moments_at(rebuilt, u, 0.25)
    np.testing.assert_allclose(loo.mu1, phys.mu1, atol=1e-13)
    np.testing.assert_allclose(loo.mu2, phys.mu2, atol=1e-13)
    np.testing.assert_allclose(loo.sigma, phys.sigma, atol=1e-13)


def test_moments_at_exclude_validation():
    ds = _toy()
    with pytest.raises(ValueError):
        moments_at(ds, np.zeros(4), 0.3, exclude=(3, 0))


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000),
       st.floats(min_value=0.01, max_value=0.5))
def test_mean_lies_in_convex_hull(seed, theta):
    ds = _toy(seed=seed)
    mu = local_mean(ds.z1, ds.u1, np.array([0, 1, 0, 1]), theta)
    assert np.all(mu >= ds.z1.min(axis=0) - 1e-12)
    assert np.all(mu <= ds.z1.max(axis=0) + 1e-12)

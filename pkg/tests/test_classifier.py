import numpy as np
import pytest

from slm.classifier import (SlmModel, beta_at, classify, discriminant,
                            error_rate, load_model, precompute_ball,
                            save_model)
from slm.data import DataError, MixedDataset
from slm.logistic import LogisticFit


def _dataset(seed=0, n1=30, n2=25, d=3, p=2):
    rng = np.random.default_rng(seed)
    return MixedDataset(
        z1=rng.standard_normal((n1, p)) + 1.0, u1=rng.integers(0, 2, (n1, d)),
        z2=rng.standard_normal((n2, p)) - 1.0, u2=rng.integers(0, 2, (n2, d)))


def _model(seed=0, theta=0.3, lam=0.05, a0=0.0, a=None, **kw):
    ds = _dataset(seed=seed)
    eta = LogisticFit(a0=a0, a=np.zeros(ds.d) if a is None else a,
                      lam=0.1, converged=True, final_gap=0.0)
    return SlmModel(train=ds, theta=theta, lambda_beta=lam, eta_fit=eta, **kw)


def test_parameter_validation():
    with pytest.raises(ValueError):
        _model(theta=0.7)
    with pytest.raises(ValueError):
        _model(lam=-0.1)


def test_discriminant_linear_in_z():
    model = _model()
    u = np.array([1, 0, 1])
    sol = beta_at(model, u)
    z0 = np.zeros(model.train.p)
    z1 = np.array([1.0, -2.0])
    d0 = discriminant(model, z0, u)
    d1 = discriminant(model, z1, u)
    np.testing.assert_allclose(d1 - d0, sol.b @ z1, atol=1e-12)


def test_tie_goes_to_class_two():
    # zero direction and zero intercept => discriminant exactly 0
    model = _model(lam=1e6)
    u = np.array([0, 0, 0])
    assert discriminant(model, np.zeros(2), u) == 0.0
    assert classify(model, np.zeros(2), u) == 2


def test_separated_classes_classified_correctly():
    model = _model(lam=0.01)
    assert classify(model, np.array([3.0, 3.0]), np.array([1, 0, 1])) == 1
    assert classify(model, np.array([-3.0, -3.0]), np.array([1, 0, 1])) == 2


def test_cache_is_transparent():
    cached = _model()
    uncached = _model(cache_enabled=False)
    u = np.array([1, 1, 0])
    z = np.array([0.3, -0.7])
    first = discriminant(cached, z, u)
    again = discriminant(cached, z, u)  # served from cache
    assert first == again == discriminant(uncached, z, u)


def test_precompute_ball_counts_and_fills_cache():
    model = _model()
    count = precompute_ball(model, np.zeros(3, dtype=np.uint8), 1)
    assert count == 4  # center + 3 single flips
    assert len(model._cache) == 4


def test_error_rate_on_training_data_is_low():
    model = _model(lam=0.01)
    assert error_rate(model, model.train) <= 0.2


def test_error_rate_dimension_check():
    model = _model()
    other = MixedDataset(z1=[[1.0]], u1=[[0, 1, 1]],
                         z2=[[0.0]], u2=[[1, 0, 0]])
    with pytest.raises(ValueError):
        error_rate(model, other)


def test_save_load_save_byte_identical():
    model = _model(a0=0.25, a=np.array([0.1, -0.2, 1.0 / 3.0]))
    text = save_model(model)
    back = load_model(text)
    assert save_model(back) == text
    # behaviour survives the round trip
    u = np.array([0, 1, 1])
    z = np.array([0.4, 0.4])
    np.testing.assert_allclose(discriminant(back, z, u),
                               discriminant(model, z, u), atol=1e-15)


def test_load_rejects_bad_documents():
    with pytest.raises(DataError):
        load_model("not json")
    with pytest.raises(DataError):
        load_model("{}")
    model = _model()
    text = save_model(model).replace('"format_version": 1', '"format_version": 99')
    with pytest.raises(DataError):
        load_model(text)

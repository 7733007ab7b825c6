import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ptspec.estimator import SpectrumTracer, validate_v2
from ptspec.trace import Method


@pytest.fixture(scope="module")
def fitted():
    return SpectrumTracer(potential="rect", v1=40.0).fit(np.linspace(0, 8, 120).reshape(-1, 1))


def test_params_roundtrip():
    est = SpectrumTracer(potential="sech", v1=50.0, step=5e-3)
    params = est.get_params()
    assert params["potential"] == "sech" and params["step"] == 5e-3
    twin = clone(est)
    assert twin.get_params() == params


def test_default_method_per_model(fitted):
    assert fitted.config_.method is Method.ANALYTIC


def test_fit_attributes(fitted):
    assert fitted.n_levels_ == 9
    assert len(fitted.exceptional_points_) == 4
    assert fitted.crossings_ == []


def test_transform_shape_and_nan(fitted):
    X = np.array([[0.0], [0.5], [7.9]])
    T = fitted.transform(X)
    assert T.shape == (3, fitted.n_levels_)
    assert np.all(np.isfinite(T[0]))
    assert np.isnan(T[2, 0]) and np.isnan(T[2, 1])


def test_predict_counts_drop_past_eps(fitted):
    counts = fitted.predict(np.array([0.0, 1.5, 3.5, 7.9]))
    assert list(counts) == [9, 7, 5, 0]  # the top level leaves through E = 0 near v2 = 5.9


def test_not_fitted():
    with pytest.raises(NotFittedError):
        SpectrumTracer().transform([[0.0]])


def test_input_validation():
    np.testing.assert_array_equal(validate_v2([3.0, 1.0, 3.0]), [1.0, 3.0])
    with pytest.raises(ValueError):
        validate_v2(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        validate_v2([[np.nan]])
    with pytest.raises(ValueError):
        validate_v2(np.empty((0, 1)))

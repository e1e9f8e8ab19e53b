import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rimaug import (
    TimeSeriesSample,
    augment_closed_form,
    augment_many,
    augment_recursive,
    closed_form_coefficients,
    coefficient_matrix,
    rim_batch,
)
from rimaug import _kernels, _pykernels
from rimaug.errors import DimensionError, DomainError, IndexRangeError, InputError

finite = st.floats(-10, 10, allow_nan=False)
unit = st.floats(0.0, 0.999999, allow_nan=False)


@st.composite
def series_and_lambda(draw, max_d=24):
    d = draw(st.integers(0, max_d))
    x = draw(arrays(np.float64, d + 1, elements=finite))
    lam = draw(arrays(np.float64, d, elements=unit))
    return x, lam


def test_hand_example():
    # x'_1 = .5*2 + .5*1 = 1.5 ; x'_2 = .5*4 + .5*1.5 = 2.75
    out = augment_recursive([1.0, 2.0, 4.0], [0.5, 0.5]).features
    np.testing.assert_array_equal(out, [1.0, 1.5, 2.75])


def test_closed_form_hand_example():
    np.testing.assert_allclose(closed_form_coefficients([0.5, 0.5], 2), [0.25, 0.25, 0.5])
    np.testing.assert_allclose(closed_form_coefficients([0.2, 0.4, 0.6], 1), [0.2, 0.8])
    np.testing.assert_array_equal(closed_form_coefficients([0.3], 0), [1.0])


def test_coefficient_matrix_rows_match_closed_form():
    lam = np.array([0.1, 0.7, 0.3, 0.9])
    C = coefficient_matrix(lam)
    for n in range(5):
        np.testing.assert_allclose(C[n, : n + 1], closed_form_coefficients(lam, n), rtol=0, atol=1e-15)
        assert np.all(C[n, n + 1 :] == 0)


@given(series_and_lambda())
def test_recursive_equals_closed_form(case):
    x, lam = case
    a = augment_recursive(x, lam).features
    b = augment_closed_form(x, lam).features
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-10)


@given(series_and_lambda())
def test_coefficients_are_convex(case):
    _, lam = case
    for n in range(len(lam) + 1):
        c = closed_form_coefficients(lam, n)
        assert np.all(c >= 0)
        assert abs(c.sum() - 1.0) <= 1e-12


@given(series_and_lambda())
def test_prefix_containment(case):
    x, lam = case
    out = augment_recursive(x, lam).features
    lo = np.minimum.accumulate(x)
    hi = np.maximum.accumulate(x)
    tol = 1e-12 * (1 + np.abs(x).max())
    assert np.all(out >= lo - tol) and np.all(out <= hi + tol)


@given(series_and_lambda())
def test_zero_lambda_is_bitwise_identity(case):
    x, _ = case
    out = augment_recursive(x, np.zeros(len(x) - 1)).features
    assert np.array_equal(out, x)


@given(series_and_lambda())
def test_first_coordinate_is_unchanged(case):
    x, lam = case
    assert augment_recursive(x, lam).features[0] == x[0]


def test_multichannel_shares_lambda_per_timestep():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(9, 3))
    lam = rng.uniform(0, 1, 8)
    out = augment_recursive(x, lam).features
    assert out.shape == (9, 3)
    for c in range(3):
        np.testing.assert_allclose(out[:, c], augment_recursive(x[:, c], lam).features, rtol=0, atol=1e-15)
    np.testing.assert_allclose(out, augment_closed_form(x, lam).features, atol=1e-12)


def test_batch_and_shared_agree_with_single():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(5, 7))
    lam = rng.uniform(0, 1, (5, 6))
    out = rim_batch(x, lam)
    for k in range(5):
        np.testing.assert_array_equal(out[k], augment_recursive(x[k], lam[k]).features)
    many = augment_many(x[0], lam)
    for k in range(5):
        np.testing.assert_array_equal(many[k], augment_recursive(x[0], lam[k]).features)


def test_backends_agree():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(6, 11, 2))
    lam = rng.uniform(0, 1, (6, 10))
    lam[:, 3] = 0.0
    ref = _pykernels.rim_forward(x, lam)
    np.testing.assert_allclose(_kernels.rim_forward(x, lam), ref, rtol=0, atol=1e-14)
    xs = np.ascontiguousarray(x[0])
    np.testing.assert_allclose(
        _kernels.rim_forward_shared(xs, lam), _pykernels.rim_forward_shared(xs, lam), rtol=0, atol=1e-14
    )


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")


def test_augmented_output_is_read_only_and_keeps_label():
    a = augment_recursive(TimeSeriesSample([0.0, 1.0], label=1), [0.5])
    assert a.label == 1
    with pytest.raises(ValueError):
        a.features[0] = 3.0


def test_sample_validation():
    with pytest.raises(DimensionError):
        TimeSeriesSample(np.zeros((2, 2, 2)))
    with pytest.raises(DimensionError):
        TimeSeriesSample([])
    with pytest.raises(InputError):
        TimeSeriesSample([0.0, np.nan])
    with pytest.raises(InputError):
        TimeSeriesSample([0.0], label=-1)
    with pytest.raises(InputError):
        TimeSeriesSample([0.0], label=0.5)


def test_lambda_validation():
    with pytest.raises(DimensionError):
        augment_recursive([1.0, 2.0, 3.0], [0.5])
    with pytest.raises(DomainError):
        augment_recursive([1.0, 2.0], [1.0])
    with pytest.raises(DomainError):
        augment_recursive([1.0, 2.0], [-0.1])
    with pytest.raises(IndexRangeError):
        closed_form_coefficients([0.5], 2)


def test_single_point_series():
    out = augment_recursive([3.5], []).features
    np.testing.assert_array_equal(out, [3.5])


def test_pure_python_fallback_is_selectable():
    import os
    import subprocess
    import sys

    env = dict(os.environ, RIMAUG_PURE_PYTHON="1")
    code = "import rimaug, numpy as np; print(rimaug.BACKEND, rimaug.augment_recursive([1., 2., 4.], [.5, .5]).features)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split()[0] == "python" and "2.75" in out

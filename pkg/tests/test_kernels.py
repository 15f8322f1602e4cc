import math

import numpy as np
import pytest

from msvr_forecast import InputError, KernelConfig, gram, kernel_eval


def test_config_validation():
    with pytest.raises(InputError):
        KernelConfig(gamma=0.0)
    with pytest.raises(InputError):
        KernelConfig(gamma=-1.0)
    with pytest.raises(InputError):
        KernelConfig(kind="linear")


def test_zero_distance_is_one():
    cfg = KernelConfig(gamma=3.7)
    assert kernel_eval((0.3, 0.7), (0.3, 0.7), cfg) == 1.0


def test_closed_form_value():
    # ||(0,0)-(1,1)||^2 = 2, gamma = 0.5 -> exp(-1)
    cfg = KernelConfig(gamma=0.5)
    assert kernel_eval((0.0, 0.0), (1.0, 1.0), cfg) == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert kernel_eval((0.0, 0.0), (1.0, 1.0), cfg) == pytest.approx(0.367879, abs=1e-6)


def test_near_zero_distance_continuity():
    cfg = KernelConfig(gamma=1.0)
    value = kernel_eval((2.0,), (2.0000001,), cfg)
    assert 1.0 - 1e-10 < value <= 1.0


def test_symmetry_exact():
    cfg = KernelConfig(gamma=2.0)
    rng = np.random.default_rng(1)
    for _ in range(10):
        x, y = rng.normal(size=3), rng.normal(size=3)
        assert kernel_eval(x, y, cfg) == kernel_eval(y, x, cfg)


def test_dimension_mismatch():
    cfg = KernelConfig()
    with pytest.raises(InputError):
        kernel_eval((1.0, 2.0), (1.0,), cfg)
    with pytest.raises(InputError):
        gram(np.ones((2, 2)), np.ones((2, 3)), cfg)


def test_gram_single_identical_input():
    cfg = KernelConfig(gamma=1.0)
    np.testing.assert_array_equal(gram([[0.5, 0.5]], [[0.5, 0.5]], cfg), [[1.0]])


def test_gram_matches_elementwise_eval():
    cfg = KernelConfig(gamma=0.5)
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    expected = np.array([[1.0, math.exp(-1.0)], [math.exp(-1.0), 1.0]])
    np.testing.assert_allclose(gram(pts, pts, cfg), expected, atol=1e-15)


def test_gram_self_symmetric_unit_diagonal():
    cfg = KernelConfig(gamma=1.3)
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(3, 4))
    K = gram(pts, pts, cfg)
    np.testing.assert_allclose(K, K.T, atol=1e-12)
    np.testing.assert_allclose(np.diag(K), 1.0, atol=1e-12)
    assert np.all(K > 0) and np.all(K <= 1.0)


def test_gram_positive_definite_with_jitter():
    cfg = KernelConfig(gamma=0.8)
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(20, 3))
    K = gram(pts, pts, cfg) + 1e-10 * np.eye(20)
    np.linalg.cholesky(K)  # raises if not positive definite


def test_gram_rectangular_shape():
    cfg = KernelConfig(gamma=1.0)
    rows = np.random.default_rng(3).normal(size=(4, 2))
    cols = np.random.default_rng(4).normal(size=(6, 2))
    K = gram(rows, cols, cfg)
    assert K.shape == (4, 6)
    assert K[2, 5] == pytest.approx(kernel_eval(rows[2], cols[5], cfg), abs=1e-15)

import numpy as np
import pytest

from dimmatic.nn import losses as module


def test_mse_loss_of_equal_arrays_is_zero():
    values = np.array([[0.2, 0.4]], dtype=np.float32)

    loss, grad = module.mse_loss(values, values.copy())

    assert loss == 0
    assert np.all(grad == 0)


def test_mse_loss_averages_squared_residuals():
    loss, grad = module.mse_loss(np.array([1.0, 0.0]), np.array([0.0, 0.0]))

    assert loss == 0.5
    np.testing.assert_allclose(grad, [1.0, 0.0])


def test_mse_loss_matches_naive_summation():
    rng = np.random.default_rng(4)
    predictions = rng.random((3, 5))
    targets = rng.random((3, 5))
    expected = 0.0

    for row in range(3):
        for column in range(5):
            expected += (predictions[row, column] - targets[row, column]) ** 2

    loss, grad = module.mse_loss(predictions, targets)

    assert abs(loss - expected / 15) < 1e-6


def test_mse_loss_with_mismatched_shapes_raises():
    with pytest.raises(ValueError):
        module.mse_loss(np.zeros(3), np.zeros(4))


def test_cross_entropy_loss_of_uniform_logits_is_log_class_count():
    loss, grad = module.cross_entropy_loss(np.zeros((1, 10)), [3])

    assert abs(loss - np.log(10)) < 1e-6
    assert abs(grad[0, 3] + 0.9) < 1e-6


def test_cross_entropy_loss_of_huge_confident_logit_is_near_zero():
    loss, grad = module.cross_entropy_loss(np.array([[1000.0, 0.0]], dtype=np.float32), [0])

    assert np.isfinite(loss)
    assert loss < 1e-6
    assert np.all(np.isfinite(grad))


def test_cross_entropy_loss_matches_unstabilized_softmax():
    rng = np.random.default_rng(5)
    logits = rng.standard_normal((4, 10))
    labels = np.array([0, 3, 9, 5])
    probabilities = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    expected = -np.mean(np.log(probabilities[np.arange(4), labels]))

    loss, grad = module.cross_entropy_loss(logits, labels)

    assert abs(loss - expected) < 1e-5


def test_cross_entropy_loss_with_label_out_of_range_raises():
    with pytest.raises(ValueError):
        module.cross_entropy_loss(np.zeros((1, 10)), [10])


def test_cross_entropy_loss_with_negative_label_raises():
    with pytest.raises(ValueError):
        module.cross_entropy_loss(np.zeros((1, 10)), [-1])

import numpy as np
import pytest

from dimmatic.nn import optimizer as module


def test_adam_step_with_zero_gradient_leaves_parameters_unchanged():
    state = module.make_adam_state(3)
    params = np.array([1.0, -2.0, 0.5], dtype=np.float32)

    module.adam_step(state, params, np.zeros(3, dtype=np.float32))

    np.testing.assert_array_equal(params, [1.0, -2.0, 0.5])
    assert state.step == 1


def test_adam_step_first_step_moves_by_learning_rate():
    state = module.make_adam_state(1)
    params = np.array([0.0])

    module.adam_step(state, params, np.array([1.0]))

    assert abs(params[0] + 1e-3) < 1e-8


def test_adam_step_increments_step_by_one_per_update():
    state = module.make_adam_state(2)
    params = np.zeros(2)

    for expected_step in range(1, 4):
        module.adam_step(state, params, np.ones(2))
        assert state.step == expected_step


def test_adam_step_descends_scalar_quadratic():
    state = module.make_adam_state(1)
    params = np.array([1.0])

    for step in range(500):
        module.adam_step(state, params, 2 * params)

    assert abs(params[0]) < 0.1


def test_adam_step_with_non_finite_gradient_raises_divergence_error():
    state = module.make_adam_state(2)

    with pytest.raises(module.Divergence_error):
        module.adam_step(state, np.zeros(2), np.array([0.0, np.nan]))

    assert state.step == 0


def test_adam_step_with_mismatched_lengths_raises():
    state = module.make_adam_state(2)

    with pytest.raises(ValueError):
        module.adam_step(state, np.zeros(2), np.zeros(3))


def test_divergence_error_string_includes_epoch_once_known():
    error = module.Divergence_error('Non-finite loss')
    error.epoch = 4

    assert str(error) == 'Epoch 4: Non-finite loss'

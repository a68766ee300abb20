import numpy as np
import pytest

from dimmatic.attacks import common
from dimmatic.attacks import decision as module
from dimmatic.models import baseline
from dimmatic.nn import network as nn_network


def threshold_classifier(pixel_weights, threshold):
    weights = np.zeros((len(pixel_weights), 2), dtype=np.float32)
    weights[:, 1] = pixel_weights
    network = nn_network.Network(
        (nn_network.dense(len(pixel_weights), 2),),
        np.concatenate((weights.reshape(-1), np.array([0, -threshold], dtype=np.float32))),
    )

    return baseline.Network_classifier(network, image_shape=(1, 1, len(pixel_weights)))


def image(*pixels):
    return np.array(pixels, dtype=np.float32).reshape(1, 1, len(pixels))


def test_reset_pixels_keeps_only_pixels_needed_to_stay_adversarial():
    model = common.Query_counter(threshold_classifier([1, 1, 1, 1], 1.5))

    result = module.reset_pixels(
        model, image(0, 0, 0, 0), 0, image(1, 1, 1, 1), np.random.default_rng(0)
    )

    assert np.count_nonzero(result) == 2
    assert model.is_adversarial(result[np.newaxis], 0)[0]


def test_reset_pixels_does_not_modify_its_input():
    adversarial = image(1, 1, 1, 1)

    module.reset_pixels(
        common.Query_counter(threshold_classifier([1, 1, 1, 1], 1.5)),
        image(0, 0, 0, 0),
        0,
        adversarial,
        np.random.default_rng(0),
    )

    np.testing.assert_array_equal(adversarial, image(1, 1, 1, 1))


def test_pointwise_reaches_minimal_pixel_count():
    result = module.pointwise(
        threshold_classifier([1, 1, 1, 1], 1.5),
        image(0, 0, 0, 0),
        0,
        common.Attack_config('L0', repeats=3, seed=2),
    )

    assert result.success
    assert result.distances[0] == 2


def test_pointwise_with_more_repeats_is_no_worse():
    model = threshold_classifier([1, 1, 1, 1, 1, 1], 2.5)

    once = module.pointwise(model, image(0, 0, 0, 0, 0, 0), 0, common.Attack_config('L0', seed=5))
    thrice = module.pointwise(
        model, image(0, 0, 0, 0, 0, 0), 0, common.Attack_config('L0', repeats=3, seed=5)
    )

    assert thrice.distances[0] <= once.distances[0]


def test_boundary_proposals_contract_towards_original():
    original = np.array([[[0.5, 0.5]]])
    current = np.array([[[0.6, 0.5]]])

    spherical, contracted = module.boundary_proposals(
        np.random.default_rng(0), original, current, 0.1, 0.1
    )

    assert np.sqrt(np.square(spherical - original).sum()) == pytest.approx(0.1)
    assert np.sqrt(np.square(contracted - original).sum()) == pytest.approx(0.09)


def test_adapt_step_grows_on_success_and_shrinks_on_failure():
    assert module.adapt_step(1.0, [True] * 8 + [False] * 2) == module.BOUNDARY_STEP_ADAPTATION
    assert module.adapt_step(1.0, [False] * 10) == 1 / module.BOUNDARY_STEP_ADAPTATION
    assert module.adapt_step(1.0, [True] * 3 + [False] * 7) == 1.0


def test_boundary_attack_approaches_linear_boundary():
    exact = 0.2 / np.sqrt(2)
    config = common.Attack_config('L2', steps=module.BOUNDARY_MAX_QUERIES, seed=3)

    result = module.boundary_attack(threshold_classifier([1, 1], 1.2), image(0.5, 0.5), 0, config)

    assert result.success
    assert exact - 1e-5 <= result.distances[2] <= exact * 1.2
    assert result.queries <= module.BOUNDARY_MAX_QUERIES


def test_boundary_attack_without_adversarial_start_fails():
    config = common.Attack_config('L2', steps=module.BOUNDARY_MAX_QUERIES)

    result = module.boundary_attack(threshold_classifier([1, 1], 5), image(0.5, 0.5), 0, config)

    assert not result.success
    assert result.queries == 1 + module.BOUNDARY_START_ATTEMPTS

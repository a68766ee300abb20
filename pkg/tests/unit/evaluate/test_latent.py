import numpy as np
import pytest

from dimmatic.evaluate import latent as module
from dimmatic.models import autoencoder, dim
from dimmatic.nn import network as nn_network


def small_dim(binarize=False):
    return dim.Dim_classifier(
        autoencoder.build_internal_model_bank((9, 5, 3), class_count=3, seed=1),
        nn_network.build_network((nn_network.dense(9, 9), nn_network.sigmoid()), seed=2),
        binarize_input=binarize,
        binarize_denoised=binarize,
        image_shape=(1, 3, 3),
    )


def images(count, seed=0):
    return np.random.default_rng(seed).random((count, 1, 3, 3)).astype(np.float32)


def test_extract_latents_has_bottleneck_width():
    latents = module.extract_latents(small_dim(), images(4), 1)

    assert latents.shape == (4, 3)
    assert np.all(np.isfinite(latents))


def test_extract_latents_of_identical_images_are_identical():
    batch = np.repeat(images(1), 3, axis=0)

    latents = module.extract_latents(small_dim(), batch, 0)

    np.testing.assert_array_equal(latents[0], latents[1])
    np.testing.assert_array_equal(latents[0], latents[2])


def test_extract_latents_differ_between_internal_models():
    model = small_dim()

    assert not np.allclose(
        module.extract_latents(model, images(2), 0), module.extract_latents(model, images(2), 2)
    )


def test_extract_latents_with_binarization_ignores_subthreshold_detail():
    model = small_dim(binarize=True)
    batch = images(3)

    np.testing.assert_array_equal(
        module.extract_latents(model, batch, 0),
        module.extract_latents(model, (batch >= 0.5).astype(np.float32), 0),
    )


def test_extract_latents_in_batches_matches_single_batch(monkeypatch):
    model = small_dim()
    whole = module.extract_latents(model, images(5), 1)
    monkeypatch.setattr(module, 'LATENT_BATCH_SIZE', 2)

    np.testing.assert_allclose(module.extract_latents(model, images(5), 1), whole, rtol=1e-6)


@pytest.mark.parametrize('model_index', (-1, 3))
def test_extract_latents_with_index_out_of_range_raises(model_index):
    with pytest.raises(ValueError):
        module.extract_latents(small_dim(), images(2), model_index)

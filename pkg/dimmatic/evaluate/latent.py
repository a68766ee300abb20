import logging

import numpy as np

from dimmatic.models import classifier

logger = logging.getLogger(__name__)

LATENT_BATCH_SIZE = 500


def model_inputs(dim, images):
    '''
    Given a Dim_classifier and images, return the flat inputs its internal models receive: the
    images after the optional input binarization, the denoiser and the optional binarization of the
    denoised image.
    '''
    flat = images.reshape(len(images), -1)
    binarized = classifier.apply_binarizer(dim.input_binarizer, flat)[0]
    denoised = dim.denoise(binarized)[0]

    return classifier.apply_binarizer(dim.denoised_binarizer, denoised)[0]


def extract_latents(dim, images, model_index):
    '''
    Given a Dim_classifier, images, and the index of one of its internal models, return that
    model's bottleneck activations for every image, shaped (N, bottleneck width).

    Raise ValueError if the index doesn't name an internal model.
    '''
    if not 0 <= model_index < dim.class_count:
        raise ValueError(
            f'{dim.name}: Internal model index {model_index} is outside [0, {dim.class_count})'
        )

    latents = [
        dim.bank.encode(model_index, model_inputs(dim, images[start : start + LATENT_BATCH_SIZE]))
        for start in range(0, len(images), LATENT_BATCH_SIZE)
    ]
    logger.debug(f'{dim.name}: Extracted latents of {len(images)} images from model {model_index}')

    return np.concatenate(latents).astype(np.float64)

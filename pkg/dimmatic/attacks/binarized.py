import logging

import numpy as np

from dimmatic.attacks import common
from dimmatic.data import augment
from dimmatic.models import proxy

logger = logging.getLogger(__name__)


def finetune_binarized(image, adversarial, threshold=augment.BINARIZE_THRESHOLD):
    '''
    Given an original image and an adversarial image against a model that binarizes its input, move
    every changed pixel to whichever of its original value, 0 (when it binarizes to 0) or the
    threshold (when it binarizes to 1) is closest to the original without changing the pixel's
    binarized value. A pixel stays put if none of those is closer.

    The binarized adversarial image is unchanged, and no pixel moves away from its original value.
    '''
    original = np.asarray(image, dtype=np.float64)
    candidate = np.asarray(adversarial, dtype=np.float64)
    binarized = candidate >= threshold

    replacement = np.where(binarized, threshold, 0.0)
    replacement = np.where((original >= threshold) == binarized, original, replacement)
    closer = np.abs(replacement - original) < np.abs(candidate - original)

    return np.where((candidate != original) & closer, replacement, candidate).astype(
        np.asarray(adversarial).dtype
    )


def attack_binarized_model(model, image, label, base_attack, config, alphas=proxy.PROXY_ALPHAS):
    '''
    Given a Classifier with hard binarization, an image and its label, an attack function built by
    attack_function(), and an Attack_config, attack the model and return the best Attack_result.

    A gradient attack runs once against a sigmoid proxy of the model for every steepness in alphas.
    Any other attack runs once against the model itself. Every candidate is fine-tuned with
    finetune_binarized() and then re-validated against the hard model. The successful candidate
    with the smallest distance in the config's norm wins.
    '''
    counter = common.Query_counter(model)
    image = np.asarray(image, dtype=np.float32)

    if counter.is_adversarial(image[np.newaxis], label)[0]:
        return common.Attack_result(
            image.copy(), True, np.zeros(len(common.NORMS)), counter.queries
        )

    core = base_attack.__wrapped__

    if getattr(base_attack, 'uses_gradients', False):
        sources = [(alpha, proxy.sigmoid_proxy(model, alpha)) for alpha in alphas]
    else:
        sources = [(None, model)]

    norm_index = common.NORM_INDEX[config.norm]
    best = common.failure(0)

    for alpha, source in sources:
        source_counter = common.Query_counter(source)
        stream_keys = () if alpha is None else (alpha,)
        candidate = core(
            source_counter, image, label, config, common.attack_stream(config.seed, *stream_keys)
        )
        counter.queries += source_counter.queries

        if candidate is None:
            continue

        result = common.validated_result(
            counter, image, label, finetune_binarized(image, candidate), config
        )

        if result.success and result.distances[norm_index] < best.distances[norm_index]:
            best = result

        logger.debug(
            f'{model.name}: Proxy steepness {alpha} {"succeeded" if result.success else "failed"}'
        )

    return best._replace(queries=counter.queries)

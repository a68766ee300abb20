import logging

import numpy as np
import scipy.ndimage

from dimmatic.attacks import common

logger = logging.getLogger(__name__)

TARGET_KINDS = ('inverted', 'gray', 'blurred', 'uniform_noise')
STRATEGIES = ('direct', 'linear', 'binary')
RESOLUTION = 1e-3
SEARCH_CHUNK_SIZE = 100


def blend_target(rng, image, target_kind):
    '''
    Return the image to blend towards for the given target kind, or None for "blurred", which
    blurs instead of blending.
    '''
    if target_kind == 'inverted':
        return 1 - image

    if target_kind == 'gray':
        return np.full_like(image, 0.5)

    if target_kind == 'uniform_noise':
        return rng.uniform(0, 1, size=image.shape).astype(image.dtype)

    if target_kind == 'blurred':
        return None

    raise ValueError(f'Unknown blend target {target_kind}')


def blend(image, target, factor):
    '''
    Return (1 - factor) * image + factor * target clamped to [0, 1]. Without a target, blur the
    image's spatial axes with a Gaussian whose width is the factor times the larger image side.
    '''
    if target is None:
        sigma = factor * max(image.shape[-2:])
        blurred = scipy.ndimage.gaussian_filter(
            image.astype(np.float64), sigma=(0,) * (image.ndim - 2) + (sigma, sigma)
        )
        return np.clip(blurred, 0, 1).astype(image.dtype)

    return np.clip((1 - factor) * image + factor * target, 0, 1).astype(image.dtype)


def find_blend_factor(is_adversarial, strategy, resolution=RESOLUTION, direct_factor=1.0):
    '''
    Given a function mapping an array of blend factors to an array of adversarial flags, a search
    strategy and a resolution, return the smallest adversarial blend factor found, or None.

    "direct" only tries direct_factor. "linear" tries every multiple of the resolution in
    increasing order. "binary" bisects [0, 1] until the bracket is no wider than the resolution.
    '''
    if strategy == 'direct':
        return direct_factor if is_adversarial(np.array([direct_factor]))[0] else None

    if strategy == 'linear':
        factors = np.arange(1, int(round(1 / resolution)) + 1) * resolution

        for start in range(0, len(factors), SEARCH_CHUNK_SIZE):
            chunk = factors[start : start + SEARCH_CHUNK_SIZE]
            flags = is_adversarial(chunk)

            if np.any(flags):
                return float(chunk[int(np.argmax(flags))])

        return None

    if strategy == 'binary':
        if not is_adversarial(np.array([1.0]))[0]:
            return None

        lower, upper = 0.0, 1.0

        while upper - lower > resolution:
            middle = (lower + upper) / 2

            if is_adversarial(np.array([middle]))[0]:
                upper = middle
            else:
                lower = middle

        return upper

    raise ValueError(f'Unknown blend search strategy {strategy}')


def direct_factor(image, target, config):
    '''
    Return the blend factor of a direct attack: the whole way to the target when unbounded,
    otherwise as far as the epsilon budget reaches.
    '''
    if config.epsilon is None or target is None:
        return 1.0

    length = common.perturbation_norms(image, target)[common.NORM_INDEX[config.norm]]

    return min(1.0, config.epsilon / length) if length > 0 else 1.0


@common.attack_function()
def blend_search(model, image, label, config, rng):
    '''
    Blend the image towards a target (its inversion, mid-gray, uniform noise, or a blurred copy)
    and return the blend with the smallest factor that fools the model. The target kind and search
    strategy come from the config's options.
    '''
    target_kind = common.option(config, 'target_kind', 'gray')
    strategy = common.option(config, 'strategy', 'binary')
    resolution = common.option(config, 'resolution', RESOLUTION)
    target = blend_target(rng, image, target_kind)

    def is_adversarial(factors):
        candidates = np.stack([blend(image, target, factor) for factor in factors])

        return model.is_adversarial(candidates, label)

    factor = find_blend_factor(
        is_adversarial, strategy, resolution, direct_factor(image, target, config)
    )

    if factor is None:
        logger.debug(f'{model.name}: No {target_kind} blend fools the model')
        return None

    return blend(image, target, factor)


def blend_search_attack(model, image, label, target_kind, strategy, config):
    '''
    Run blend_search() with the given target kind and strategy.
    '''
    if target_kind not in TARGET_KINDS:
        raise ValueError(f'Unknown blend target {target_kind}')

    if strategy not in STRATEGIES:
        raise ValueError(f'Unknown blend search strategy {strategy}')

    options = dict(config.options or {}, target_kind=target_kind, strategy=strategy)

    return blend_search(model, image, label, config._replace(options=options))

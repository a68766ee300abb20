import logging

import numpy as np

from dimmatic.attacks import common

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ('gaussian', 'uniform')
SALT_AND_PEPPER_STEPS = 1000

# Candidates evaluated per model call while searching increasing noise levels.
SEARCH_CHUNK_SIZE = 100

BISECTION_ITERATIONS = 60


def noise_direction(rng, distribution, shape):
    if distribution == 'gaussian':
        return rng.standard_normal(shape)

    if distribution == 'uniform':
        return rng.uniform(-1, 1, size=shape)

    raise ValueError(f'Unknown noise distribution {distribution}')


def clipped_length(image, direction, scale):
    return np.sqrt(np.square(np.clip(image + scale * direction, 0, 1) - image).sum())


def clipping_aware_scale(image, direction, epsilon):
    '''
    Given an image, a noise direction and an L2 epsilon, return the factor to scale the direction by
    so that the perturbation left after clamping to [0, 1] has an L2 norm of epsilon. If clamping
    makes epsilon unreachable, return a factor that reaches the largest attainable norm.
    '''
    image = image.astype(np.float64)
    upper = epsilon / np.sqrt(np.square(direction).sum())

    for attempt in range(BISECTION_ITERATIONS):
        if clipped_length(image, direction, upper) >= epsilon:
            break

        upper *= 2
    else:
        return upper

    lower = 0.0

    for iteration in range(BISECTION_ITERATIONS):
        middle = (lower + upper) / 2

        if clipped_length(image, direction, middle) < epsilon:
            lower = middle
        else:
            upper = middle

    return lower


def noise_perturbation(rng, image, config):
    distribution = common.option(config, 'distribution', 'gaussian')
    direction = noise_direction(rng, distribution, image.shape)

    if config.norm == 'Linf':
        if distribution == 'uniform':
            return config.epsilon * direction

        return config.epsilon * direction / np.abs(direction).max()

    if config.norm == 'L2':
        if common.option(config, 'clipping_aware', False):
            return direction * clipping_aware_scale(image, direction, config.epsilon)

        return direction * config.epsilon / np.sqrt(np.square(direction).sum())

    raise ValueError(f'Noise attacks do not support the {config.norm} norm')


@common.attack_function()
def noise_attack(model, image, label, config, rng):
    '''
    Add random noise of the configured distribution at the epsilon budget. Clipping-aware variants
    rescale the noise so the budget holds after clamping, and repeated variants draw up to `repeats`
    times and keep the first draw that fools the model.
    '''
    if not config.epsilon:
        return None

    for repeat in range(config.repeats):
        candidate = np.clip(image + noise_perturbation(rng, image, config), 0, 1).astype(
            image.dtype
        )

        if model.is_adversarial(candidate[np.newaxis], label)[0]:
            logger.debug(f'{model.name}: Noise draw {repeat + 1} is adversarial')
            return candidate

    return None


def salt_and_pepper_candidates(rng, image, probabilities):
    '''
    Return one salt and pepper image per probability: each pixel turns black with half that
    probability and white with the other half.
    '''
    draws = rng.random((len(probabilities),) + image.shape)
    halves = (np.asarray(probabilities) / 2).reshape((-1,) + (1,) * image.ndim)
    candidates = np.broadcast_to(image, draws.shape).copy()
    candidates[draws < halves] = 0
    candidates[draws > 1 - halves] = 1

    return candidates.astype(image.dtype)


def salt_and_pepper_search(model, image, label, steps, repeats, rng):
    '''
    Raise the salt and pepper density from zero to one in the given number of steps until the model
    is fooled, `repeats` times. Return the adversarial image with the fewest changed pixels, or None
    if no density fooled the model.
    '''
    probabilities = np.linspace(0, 1, steps + 1)[1:]
    chunk_count = max(1, -(-steps // SEARCH_CHUNK_SIZE))
    best = None
    best_count = np.inf

    for repeat in range(repeats):
        for chunk in np.array_split(probabilities, chunk_count):
            candidates = salt_and_pepper_candidates(rng, image, chunk)
            adversarial = model.is_adversarial(candidates, label)

            if not np.any(adversarial):
                continue

            candidate = candidates[int(np.argmax(adversarial))]
            count = np.count_nonzero(candidate != image)

            if count < best_count:
                best, best_count = candidate, count

            break

    return best


@common.attack_function()
def salt_and_pepper(model, image, label, config, rng):
    return salt_and_pepper_search(
        model,
        image,
        label,
        common.option(config, 'search_steps', SALT_AND_PEPPER_STEPS),
        config.repeats,
        rng,
    )

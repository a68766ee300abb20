import collections
import logging

import numpy as np

from dimmatic.attacks import blend, common, noise

logger = logging.getLogger(__name__)

POINTWISE_REPEATS = 10

BOUNDARY_MAX_QUERIES = 5000
BOUNDARY_SPHERICAL_STEP = 1e-2
BOUNDARY_SOURCE_STEP = 1e-2
BOUNDARY_MIN_SOURCE_STEP = 1e-7
BOUNDARY_STEP_ADAPTATION = 1.5
BOUNDARY_ADAPTATION_WINDOW = 10
BOUNDARY_START_ATTEMPTS = 100


def reset_pixels(model, image, label, adversarial, rng):
    '''
    Given a model, the original image and label, an adversarial image and a random generator, reset
    the adversarial image's changed pixels to their original values one at a time in random order,
    keeping each reset that leaves the image adversarial. Repeat until a full pass keeps nothing.
    Return the result.
    '''
    current = adversarial.copy()
    flat = current.reshape(-1)
    original = image.reshape(-1)

    while True:
        changed = np.flatnonzero(flat != original)
        rng.shuffle(changed)
        improved = False

        for index in changed:
            value = flat[index]
            flat[index] = original[index]

            if model.is_adversarial(current[np.newaxis], label)[0]:
                improved = True
            else:
                flat[index] = value

        if not improved:
            return current


@common.attack_function()
def pointwise(model, image, label, config, rng):
    '''
    Start from an adversarial salt and pepper image, then reset single pixels to their original
    values while the image stays adversarial. Run `repeats` times and keep the result with the
    fewest changed pixels.
    '''
    search_steps = common.option(config, 'search_steps', noise.SALT_AND_PEPPER_STEPS)
    best = None
    best_count = np.inf

    for repeat in range(config.repeats):
        start = noise.salt_and_pepper_search(model, image, label, search_steps, 1, rng)

        if start is None:
            logger.debug(f'{model.name}: Pointwise run {repeat + 1} found no starting point')
            continue

        candidate = reset_pixels(model, image, label, start, rng)
        count = np.count_nonzero(candidate != image)

        if count < best_count:
            best, best_count = candidate, count

    return best


def boundary_start(model, image, label, rng, attempts=BOUNDARY_START_ATTEMPTS):
    '''
    Draw uniform noise images until one fools the model, then binary search the blend between the
    original image and that noise down to the decision boundary. Return the blended image, or None
    if no draw fooled the model.
    '''
    for attempt in range(attempts):
        target = rng.uniform(0, 1, size=image.shape).astype(image.dtype)

        if model.is_adversarial(target[np.newaxis], label)[0]:
            break
    else:
        return None

    def is_adversarial(factors):
        candidates = np.stack([blend.blend(image, target, factor) for factor in factors])

        return model.is_adversarial(candidates, label)

    factor = blend.find_blend_factor(is_adversarial, 'binary')

    return blend.blend(image, target, factor)


def boundary_proposals(rng, original, current, spherical_step, source_step):
    '''
    Return a tuple of (spherical candidate, contracted candidate): the first moves the current point
    orthogonally and back onto its sphere around the original, the second additionally moves
    towards the original by the source step as a fraction of the distance.
    '''
    difference = original - current
    distance = np.sqrt(np.square(difference).sum())
    unit = difference / distance

    perturbation = rng.standard_normal(original.shape)
    perturbation -= np.sum(perturbation * unit) * unit
    perturbation *= spherical_step * distance / np.sqrt(np.square(perturbation).sum())

    offset = current + perturbation - original
    spherical = original + offset * distance / np.sqrt(np.square(offset).sum())
    contracted = spherical + source_step * (original - spherical)

    return np.clip(spherical, 0, 1), np.clip(contracted, 0, 1)


def adapt_step(step, successes):
    rate = np.mean(successes)

    if rate > 0.5:
        return step * BOUNDARY_STEP_ADAPTATION

    if rate < 0.2:
        return step / BOUNDARY_STEP_ADAPTATION

    return step


@common.attack_function()
def boundary_attack(model, image, label, config, rng):
    '''
    Random walk along the decision boundary towards the original image: propose an orthogonal step
    on the sphere around the original plus a contraction towards it, and accept the contraction only
    if it stays adversarial and gets closer. Both step sizes adapt to their recent success rates.
    Stop after `steps` queries and return the closest adversarial point visited.
    '''
    max_queries = config.steps
    start = boundary_start(model, image, label, rng)

    if start is None:
        logger.debug(f'{model.name}: Boundary attack found no adversarial starting point')
        return None

    original = image.astype(np.float64)
    current = start.astype(np.float64)
    distance = np.sqrt(np.square(current - original).sum())
    spherical_step = common.option(config, 'spherical_step', BOUNDARY_SPHERICAL_STEP)
    source_step = common.option(config, 'source_step', BOUNDARY_SOURCE_STEP)
    spherical_successes = collections.deque(maxlen=BOUNDARY_ADAPTATION_WINDOW)
    source_successes = collections.deque(maxlen=BOUNDARY_ADAPTATION_WINDOW)

    while model.queries + 2 <= max_queries and source_step > BOUNDARY_MIN_SOURCE_STEP:
        if distance == 0:
            break

        spherical, contracted = boundary_proposals(
            rng, original, current, spherical_step, source_step
        )
        candidates = np.stack((spherical, contracted)).astype(image.dtype)
        adversarial = model.is_adversarial(candidates, label)
        contracted_distance = np.sqrt(np.square(candidates[1] - original).sum())
        accepted = bool(adversarial[1]) and contracted_distance < distance

        if accepted:
            current = candidates[1].astype(np.float64)
            distance = contracted_distance

        spherical_successes.append(bool(adversarial[0]))
        source_successes.append(accepted)

        if len(spherical_successes) == BOUNDARY_ADAPTATION_WINDOW:
            factor = adapt_step(1.0, spherical_successes)
            spherical_step *= factor
            source_step *= factor
            spherical_successes.clear()

        if len(source_successes) == BOUNDARY_ADAPTATION_WINDOW:
            source_step = adapt_step(source_step, source_successes)
            source_successes.clear()

    logger.debug(f'{model.name}: Boundary attack ended at L2 distance {distance:.6f}')

    return current.astype(image.dtype)

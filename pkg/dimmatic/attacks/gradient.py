import logging
import math

import numpy as np

from dimmatic.attacks import common
from dimmatic.nn import optimizer

logger = logging.getLogger(__name__)

DEEPFOOL_OVERSHOOT = 0.02
DEEPFOOL_STEPS = 50

DDN_INITIAL_EPSILON = 1.0
DDN_GAMMA = 0.05
DDN_MAX_STEP = 1.0
DDN_MIN_STEP = 0.01

CARLINI_WAGNER_SEARCH_STEPS = 5
CARLINI_WAGNER_STEPS = 200
CARLINI_WAGNER_LEARNING_RATE = 1e-2
CARLINI_WAGNER_INITIAL_CONST = 1e-3
CARLINI_WAGNER_UPPER_CONST = 1e10


def single_loss_gradient(model, image, label):
    scores, gradient = common.loss_gradient(model, image[np.newaxis], np.array([label]))

    return scores[0], gradient[0]


@common.attack_function(uses_gradients=True)
def fgm(model, image, label, config, rng):
    '''
    Take one step of size epsilon along the normalized loss gradient: the gradient scaled to unit
    length for L2 (FGM), its sign for Linf (FGSM).
    '''
    scores, gradient = single_loss_gradient(model, image, label)

    if not np.any(gradient):
        logger.debug(f'{model.name}: Zero loss gradient, no direction to step in')
        return None

    direction = common.normalize_gradient(gradient[np.newaxis], config.norm)[0]

    return common.project(image, image + config.epsilon * direction, config.norm, config.epsilon)


@common.attack_function(uses_gradients=True)
def iterative_gradient(model, image, label, config, rng):
    '''
    Take repeated normalized gradient steps, projecting back onto the epsilon ball after each one.
    With random_start this is PGD, without it BIM. Stop at the first iterate that's adversarial.
    '''
    step_size = config.step_size or config.epsilon / 10
    adversarial = image

    if config.random_start:
        adversarial = common.project(
            image,
            image + common.random_perturbation(rng, image.shape, config.norm, config.epsilon),
            config.norm,
            config.epsilon,
        )

    for step in range(config.steps):
        scores, gradient = single_loss_gradient(model, adversarial, label)

        if np.argmax(scores) != label:
            return adversarial

        direction = common.normalize_gradient(gradient[np.newaxis], config.norm)[0]
        adversarial = common.project(
            image, adversarial + step_size * direction, config.norm, config.epsilon
        )

    return adversarial


def class_gradients(model, image):
    '''
    Return a tuple of (scores shaped (K,), gradient of every class score with respect to the image
    shaped (K,) + image shape) from one forward pass.
    '''
    scores, trace = model.forward(image[np.newaxis])
    selectors = np.eye(model.class_count)

    return scores[0].astype(np.float64), np.stack(
        [model.input_gradient(trace, selector[np.newaxis])[0] for selector in selectors]
    ).astype(np.float64)


def deepfool_step(scores, gradients, label, norm):
    '''
    Given class scores, their input gradients, the true label and a norm, linearize every other
    class's boundary and return the smallest step that crosses the nearest one.
    '''
    others = np.array([index for index in range(len(scores)) if index != label])
    score_gaps = np.abs(scores[others] - scores[label])
    weight_gaps = (gradients[others] - gradients[label]).reshape(len(others), -1)

    if norm == 'L2':
        lengths = np.sqrt(np.square(weight_gaps).sum(axis=1))
    elif norm == 'Linf':
        lengths = np.abs(weight_gaps).sum(axis=1)
    else:
        raise ValueError(f'DeepFool does not support the {norm} norm')

    distances = np.divide(
        score_gaps, lengths, out=np.full(len(others), np.inf), where=lengths > 0
    )
    nearest = int(np.argmin(distances))

    if not np.isfinite(distances[nearest]):
        return None

    weights = weight_gaps[nearest]
    gap = score_gaps[nearest] + 1e-4

    if norm == 'L2':
        step = gap / np.square(weights).sum() * weights
    else:
        step = gap / lengths[nearest] * np.sign(weights)

    return step.reshape(gradients.shape[1:])


@common.attack_function(uses_gradients=True)
def deepfool(model, image, label, config, rng):
    '''
    Repeatedly linearize the model around the current iterate and step across the nearest class
    boundary, accumulating the steps and overshooting their sum slightly.
    '''
    overshoot = common.option(config, 'overshoot', DEEPFOOL_OVERSHOOT)
    total = np.zeros(image.shape, dtype=np.float64)
    candidate = image

    for step in range(config.steps):
        scores, gradients = class_gradients(model, candidate)

        if np.argmax(scores) != label:
            return candidate

        increment = deepfool_step(scores, gradients, label, config.norm)

        if increment is None:
            logger.debug(f'{model.name}: No class boundary to step towards')
            return None

        total += increment
        candidate = np.clip(image + (1 + overshoot) * total, 0, 1).astype(image.dtype)

    return candidate


@common.attack_function(uses_gradients=True)
def ddn(model, image, label, config, rng):
    '''
    Decoupled direction and norm: step along the normalized gradient with a cosine-annealed step
    size, then rescale the perturbation to a norm bound that shrinks while the iterate is
    adversarial and grows while it isn't. Return the smallest adversarial iterate.
    '''
    gamma = common.option(config, 'gamma', DDN_GAMMA)
    bound = common.option(config, 'initial_epsilon', DDN_INITIAL_EPSILON)
    original = image.astype(np.float64)
    delta = np.zeros_like(original)
    best = None
    best_length = np.inf

    for step in range(config.steps):
        step_size = DDN_MIN_STEP + (DDN_MAX_STEP - DDN_MIN_STEP) * (
            1 + math.cos(math.pi * step / config.steps)
        ) / 2
        candidate = np.clip(original + delta, 0, 1).astype(image.dtype)
        scores, gradient = single_loss_gradient(model, candidate, label)
        adversarial = np.argmax(scores) != label
        length = np.sqrt(np.square(candidate - original).sum())

        if adversarial and length < best_length:
            best, best_length = candidate, length

        bound *= (1 - gamma) if adversarial else (1 + gamma)
        delta = delta + step_size * common.normalize_gradient(gradient[np.newaxis], 'L2')[0]
        delta_length = np.sqrt(np.square(delta).sum())

        if delta_length > 0:
            delta *= bound / delta_length

        delta = np.clip(original + delta, 0, 1) - original

    if config.steps:
        candidate = np.clip(original + delta, 0, 1).astype(image.dtype)
        length = np.sqrt(np.square(candidate - original).sum())

        if length < best_length and model.is_adversarial(candidate[np.newaxis], label)[0]:
            best = candidate

    return best


def carlini_wagner_round(model, image, label, const, config):
    '''
    Run one inner optimization of the Carlini-Wagner objective at a fixed constant. Return a tuple
    of (smallest adversarial image found or None, its squared L2 distance).
    '''
    steps = config.steps
    learning_rate = config.step_size or CARLINI_WAGNER_LEARNING_RATE
    confidence = common.option(config, 'confidence', 0.0)
    original = image.astype(np.float64).reshape(-1)
    variables = np.arctanh(np.clip(2 * original - 1, -1 + 1e-6, 1 - 1e-6))
    state = optimizer.make_adam_state(len(variables), learning_rate=learning_rate)
    best = None
    best_squared = np.inf

    for step in range(steps):
        candidate = ((np.tanh(variables) + 1) / 2).astype(image.dtype)
        squared = float(np.square(candidate - original).sum())
        scores, trace = model.forward(candidate.reshape((1,) + image.shape))
        scores = scores[0].astype(np.float64)

        if np.argmax(scores) != label and squared < best_squared:
            best, best_squared = candidate.reshape(image.shape), squared

        others = scores.copy()
        others[label] = -np.inf
        strongest = int(np.argmax(others))
        score_grads = np.zeros((1, len(scores)))

        if scores[label] - others[strongest] > -confidence:
            score_grads[0, label] = const
            score_grads[0, strongest] = -const

        candidate_grad = 2 * (candidate - original) + model.input_gradient(
            trace, score_grads
        ).reshape(-1)
        optimizer.adam_step(
            state, variables, candidate_grad * (1 - np.square(np.tanh(variables))) / 2
        )

    return best, best_squared


@common.attack_function(uses_gradients=True)
def carlini_wagner_l2(model, image, label, config, rng):
    '''
    Minimize the squared L2 perturbation plus a constant times the true class's score margin over
    the strongest other class, in tanh space so every iterate stays in [0, 1]. Binary search the
    constant over several rounds and return the smallest adversarial image from any round.
    '''
    const = common.option(config, 'initial_const', CARLINI_WAGNER_INITIAL_CONST)
    search_steps = common.option(config, 'binary_search_steps', CARLINI_WAGNER_SEARCH_STEPS)
    lower = 0.0
    upper = CARLINI_WAGNER_UPPER_CONST
    best = None
    best_squared = np.inf

    for search_step in range(search_steps):
        candidate, squared = carlini_wagner_round(model, image, label, const, config)

        if candidate is not None:
            if squared < best_squared:
                best, best_squared = candidate, squared

            upper = min(upper, const)
            const = (lower + upper) / 2
        else:
            lower = max(lower, const)
            const = const * 10 if upper >= CARLINI_WAGNER_UPPER_CONST else (lower + upper) / 2

        logger.debug(f'{model.name}: Carlini-Wagner round {search_step + 1}, next constant {const}')

    return best

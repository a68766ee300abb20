import collections
import functools
import logging
import zlib

import numpy as np

from dimmatic.nn import losses

logger = logging.getLogger(__name__)

NORMS = ('L0', 'L1', 'L2', 'Linf')
NORM_INDEX = {norm: index for index, norm in enumerate(NORMS)}

# Slack allowed on an epsilon-bounded perturbation for float32 rounding.
BUDGET_TOLERANCE = 1e-6

Attack_config = collections.namedtuple(
    'Attack_config',
    ('norm', 'epsilon', 'steps', 'step_size', 'random_start', 'repeats', 'seed', 'options'),
    defaults=(None, 1, None, False, 1, 0, None),
)

Attack_result = collections.namedtuple(
    'Attack_result', ('adversarial', 'success', 'distances', 'queries')
)


def make_attack_config(
    norm,
    epsilon=None,
    steps=1,
    step_size=None,
    random_start=False,
    repeats=1,
    seed=0,
    options=None,
):
    '''
    Return an Attack_config after checking its fields.

    Raise ValueError if the norm is unknown, a bounded epsilon isn't positive, or steps or repeats
    are below one.
    '''
    if norm not in NORMS:
        raise ValueError(f'Unknown norm {norm}, expected one of {", ".join(NORMS)}')

    if epsilon is not None and epsilon <= 0:
        raise ValueError(f'Attack epsilon must be positive, got {epsilon}')

    if steps < 1:
        raise ValueError(f'Attack steps must be at least 1, got {steps}')

    if repeats < 1:
        raise ValueError(f'Attack repeats must be at least 1, got {repeats}')

    return Attack_config(
        norm, epsilon, steps, step_size, random_start, repeats, seed, dict(options or {})
    )


def option(config, name, default):
    return (config.options or {}).get(name, default)


def sample_seed(seed, attack_name, sample_index):
    '''
    Derive the seed of one sample's attack run from the global seed, the attack name and the
    sample's index, so that results don't depend on how samples are scheduled.
    '''
    sequence = np.random.SeedSequence([seed, zlib.crc32(attack_name.encode()), sample_index])

    return int(sequence.generate_state(1, np.uint64)[0])


def attack_stream(seed, *keys):
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def perturbation_norms(original, adversarial):
    '''
    Return the L0, L1, L2 and Linf norms of the difference between two images as a float64 array.
    '''
    delta = (
        np.asarray(adversarial, dtype=np.float64) - np.asarray(original, dtype=np.float64)
    ).reshape(-1)
    magnitudes = np.abs(delta)

    return np.array(
        (
            np.count_nonzero(delta),
            magnitudes.sum(),
            np.sqrt(np.square(delta).sum()),
            magnitudes.max(initial=0),
        ),
        dtype=np.float64,
    )


def failure(queries):
    return Attack_result(None, False, np.full(len(NORMS), np.inf), queries)


class Query_counter:
    '''
    Wrap a classifier and count the images sent through it, whether for a prediction or for a
    gradient.
    '''

    def __init__(self, model):
        self.model = model
        self.queries = 0

    @property
    def name(self):
        return self.model.name

    @property
    def class_count(self):
        return self.model.class_count

    @property
    def image_shape(self):
        return self.model.image_shape

    @property
    def loss(self):
        return self.model.loss

    def predict(self, images):
        self.queries += len(images)

        return self.model.predict(images)

    def is_adversarial(self, images, label):
        return self.predict(images) != label

    def forward(self, images):
        self.queries += len(images)

        return self.model.forward(images)

    def input_gradient(self, trace, score_grads):
        return self.model.input_gradient(trace, score_grads)


def score_loss(scores, labels, loss):
    '''
    Given class scores shaped (N, K), true labels, and a loss name, return a tuple of (per-sample
    loss, gradient with respect to the scores). Increasing the loss pushes a sample towards
    misclassification.

    The "cross_entropy" loss is the softmax negative log-likelihood of the true label. The "margin"
    loss is the strongest other score minus the true score, for models whose scores aren't logits.
    '''
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    rows = np.arange(len(labels))

    if loss == 'cross_entropy':
        log_probabilities = losses.log_softmax(scores)
        grads = np.exp(log_probabilities)
        grads[rows, labels] -= 1

        return -log_probabilities[rows, labels], grads

    if loss == 'margin':
        others = scores.copy()
        others[rows, labels] = -np.inf
        strongest = np.argmax(others, axis=1)
        grads = np.zeros_like(scores)
        grads[rows, strongest] = 1
        grads[rows, labels] -= 1

        return others[rows, strongest] - scores[rows, labels], grads

    raise ValueError(f'Unknown attack loss {loss}')


def loss_gradient(model, images, labels):
    '''
    Given a model, images shaped (N,) + image shape, and their labels, return a tuple of (scores,
    gradient of the model's attack loss with respect to the images).
    '''
    scores, trace = model.forward(images)
    values, score_grads = score_loss(scores, labels, model.loss)

    return scores, model.input_gradient(trace, score_grads)


def normalize_gradient(gradient, norm):
    '''
    Given a batch of gradients and a norm, return the steepest ascent direction of unit size in
    that norm for every sample: the sign for Linf, the gradient scaled to unit length for L2 or L1.
    Zero gradients give zero directions.
    '''
    flat = np.asarray(gradient, dtype=np.float64).reshape(len(gradient), -1)

    if norm == 'Linf':
        return np.sign(flat).reshape(gradient.shape)

    if norm == 'L2':
        lengths = np.sqrt(np.square(flat).sum(axis=1, keepdims=True))
    elif norm == 'L1':
        lengths = np.abs(flat).sum(axis=1, keepdims=True)
    else:
        raise ValueError(f'Cannot take a gradient step in the {norm} norm')

    return np.divide(flat, lengths, out=np.zeros_like(flat), where=lengths > 0).reshape(
        gradient.shape
    )


def project(original, candidate, norm, epsilon):
    '''
    Given an original image, a candidate image, a norm and an epsilon, return the candidate moved
    into the epsilon ball around the original and clamped to [0, 1], with the original's dtype.
    '''
    original64 = np.asarray(original, dtype=np.float64)
    delta = np.asarray(candidate, dtype=np.float64) - original64

    if norm == 'Linf':
        delta = np.clip(delta, -epsilon, epsilon)
    elif norm == 'L2':
        length = np.sqrt(np.square(delta).sum())

        if length > epsilon:
            delta *= epsilon / length
    else:
        raise ValueError(f'Cannot project onto a {norm} ball')

    return np.clip(original64 + delta, 0, 1).astype(original.dtype)


def random_perturbation(rng, shape, norm, epsilon):
    '''
    Draw a perturbation uniformly from the epsilon ball of the given norm.
    '''
    if norm == 'Linf':
        return rng.uniform(-epsilon, epsilon, size=shape)

    if norm == 'L2':
        direction = rng.standard_normal(shape)
        radius = epsilon * rng.uniform() ** (1 / direction.size)

        return direction * radius / np.sqrt(np.square(direction).sum())

    raise ValueError(f'Cannot draw a random start in the {norm} norm')


def validated_result(model, image, label, candidate, config):
    '''
    Given a (counting) model, the original image and label, an attack's candidate or None, and the
    Attack_config, re-check the candidate against the model and the budget. Return the
    Attack_result.
    '''
    if candidate is None:
        return failure(model.queries)

    candidate = np.clip(np.asarray(candidate).reshape(image.shape), 0, 1).astype(np.float32)

    if not model.is_adversarial(candidate[np.newaxis], label)[0]:
        return failure(model.queries)

    distances = perturbation_norms(image, candidate)

    if (
        config.epsilon is not None
        and distances[NORM_INDEX[config.norm]] > config.epsilon + BUDGET_TOLERANCE
    ):
        logger.debug(
            f'{model.name}: Discarding a candidate at {config.norm} distance {distances[NORM_INDEX[config.norm]]} over budget {config.epsilon}'
        )
        return failure(model.queries)

    return Attack_result(candidate, True, distances, model.queries)


def attack_function(uses_gradients=False):
    '''
    Decorate an attack core taking (counting model, image, label, Attack_config, random generator)
    and returning a candidate image or None. The decorated function takes (model, image, label,
    Attack_config) and returns a validated Attack_result. An image the model already misclassifies
    is an immediate success with zero perturbation.

    The core stays reachable as the decorated function's __wrapped__ attribute.
    '''

    def decorator(core):
        @functools.wraps(core)
        def run(model, image, label, config):
            counter = Query_counter(model)
            image = np.asarray(image, dtype=np.float32)

            if counter.is_adversarial(image[np.newaxis], label)[0]:
                return Attack_result(image.copy(), True, np.zeros(len(NORMS)), counter.queries)

            candidate = core(counter, image, label, config, attack_stream(config.seed))

            return validated_result(counter, image, label, candidate, config)

        run.uses_gradients = uses_gradients

        return run

    return decorator

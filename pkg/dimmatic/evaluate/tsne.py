import collections
import logging
import zlib

import numpy as np
import scipy.spatial.distance
import sklearn.metrics

logger = logging.getLogger(__name__)

PERPLEXITY = 30
ITERATIONS = 1000
LEARNING_RATE = 200.0
EXAGGERATION = 12.0
EXAGGERATION_ITERATIONS = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
MIN_GAIN = 0.01
INITIAL_SCALE = 1e-4
ENTROPY_TOLERANCE = 1e-4
BINARY_SEARCH_STEPS = 200
MACHINE_EPSILON = np.finfo(np.float64).eps

Latent_embedding = collections.namedtuple(
    'Latent_embedding', ('points', 'labels', 'model_index', 'initial_kl', 'final_kl')
)


class Tsne_error(ValueError):
    '''
    Raised when latents can't be embedded: too few points for the perplexity, no spread at all, or
    an optimization that didn't lower the divergence.
    '''


def conditional_probabilities(squared_distances, perplexity):
    '''
    Given a square matrix of squared distances and a perplexity, return the matrix of conditional
    probabilities p(j|i). Every row's Gaussian precision is found by binary search so that the row's
    entropy matches log(perplexity) to within ENTROPY_TOLERANCE.
    '''
    count = len(squared_distances)
    target = np.log(perplexity)
    probabilities = np.zeros((count, count))

    for row in range(count):
        distances = np.delete(squared_distances[row], row)
        distances = distances - distances.min()
        precision = 1.0
        lower, upper = 0.0, np.inf

        for step in range(BINARY_SEARCH_STEPS):
            weights = np.exp(-distances * precision)
            total = max(weights.sum(), MACHINE_EPSILON)
            entropy = np.log(total) + precision * np.sum(distances * weights) / total
            difference = entropy - target

            if abs(difference) <= ENTROPY_TOLERANCE:
                break

            if difference > 0:
                lower = precision
                precision = precision * 2 if np.isinf(upper) else (precision + upper) / 2
            else:
                upper = precision
                precision = (precision + lower) / 2
        else:
            logger.debug(f'Point {row}: Perplexity search stopped {difference:.2e} nats away')

        probabilities[row, np.arange(count) != row] = weights / total

    return probabilities


def joint_probabilities(latents, perplexity):
    '''
    Given latents shaped (N, D) and a perplexity, return the symmetrized joint probabilities as a
    condensed vector over point pairs.
    '''
    squared_distances = scipy.spatial.distance.squareform(
        scipy.spatial.distance.pdist(latents, 'sqeuclidean')
    )
    conditional = conditional_probabilities(squared_distances, perplexity)
    joint = scipy.spatial.distance.squareform(conditional + conditional.T, checks=False)

    return np.maximum(joint / joint.sum(), MACHINE_EPSILON)


def kl_divergence(points, joint):
    '''
    Given 2-D points and condensed joint probabilities, return a tuple of (KL divergence between
    the joint probabilities and the points' Student-t similarities, its gradient by point).
    '''
    kernel = 1.0 / (1.0 + scipy.spatial.distance.pdist(points, 'sqeuclidean'))
    similarities = np.maximum(kernel / kernel.sum(), MACHINE_EPSILON)
    divergence = np.dot(joint, np.log(joint / similarities))

    # Joint probabilities and similarities each sum to one over unordered pairs.
    forces = scipy.spatial.distance.squareform((joint - similarities) * kernel)
    gradient = 2.0 * (forces.sum(axis=1)[:, np.newaxis] * points - forces @ points)

    return divergence, gradient


def initial_points(latents, seed):
    '''
    Draw every point's starting position from its own stream, keyed on the seed and the bytes of
    its latent, so that reordering the latents reorders the embedding the same way.
    '''
    return np.stack(
        [
            np.random.default_rng([seed, zlib.crc32(np.ascontiguousarray(latent).tobytes())])
            .normal(0, INITIAL_SCALE, 2)
            for latent in latents
        ]
    )


def tsne_embed(
    latents, labels, perplexity=PERPLEXITY, iterations=ITERATIONS, seed=0, model_index=None
):
    '''
    Given latents shaped (N, D), their class labels, a perplexity, an iteration count and a seed,
    run exact t-SNE and return a Latent_embedding with 2-D points.

    Optimization is gradient descent with per-coordinate gains, momentum INITIAL_MOMENTUM and then
    FINAL_MOMENTUM, and the joint probabilities exaggerated for the first EXAGGERATION_ITERATIONS.

    Raise Tsne_error if there are fewer than three points per unit of perplexity, all the latents
    are identical, or the final divergence isn't below the initial one.
    '''
    latents = np.asarray(latents, dtype=np.float64)
    labels = np.asarray(labels)
    count = len(latents)

    if perplexity <= 0:
        raise Tsne_error(f'Perplexity must be positive, got {perplexity}')

    if count < 3 * perplexity:
        raise Tsne_error(
            f'Perplexity {perplexity} needs at least {int(np.ceil(3 * perplexity))} points, got {count}'
        )

    if len(labels) != count:
        raise Tsne_error(f'Got {len(labels)} labels for {count} latents')

    if not np.any(np.ptp(latents, axis=0)):
        raise Tsne_error('All latents are identical, nothing to embed')

    joint = joint_probabilities(latents, perplexity)
    points = initial_points(latents, seed)
    initial_kl = kl_divergence(points, joint)[0]
    update = np.zeros_like(points)
    gains = np.ones_like(points)

    for iteration in range(iterations):
        exaggerated = iteration < EXAGGERATION_ITERATIONS
        momentum = INITIAL_MOMENTUM if exaggerated else FINAL_MOMENTUM
        gradient = kl_divergence(points, joint * EXAGGERATION if exaggerated else joint)[1]

        same_direction = (update * gradient) >= 0
        gains = np.where(same_direction, gains * 0.8, gains + 0.2)
        np.clip(gains, MIN_GAIN, None, out=gains)

        update = momentum * update - LEARNING_RATE * gains * gradient
        points = points + update
        points -= points.mean(axis=0)

        if iteration + 1 == EXAGGERATION_ITERATIONS:
            logger.debug(
                f'Model {model_index}: KL divergence {kl_divergence(points, joint)[0]:.4f} after early exaggeration'
            )

    final_kl = kl_divergence(points, joint)[0]

    if not np.all(np.isfinite(points)) or not final_kl < initial_kl:
        raise Tsne_error(
            f'Model {model_index}: t-SNE did not converge (KL divergence {initial_kl:.4f} to {final_kl:.4f})'
        )

    logger.debug(f'Model {model_index}: KL divergence {initial_kl:.4f} down to {final_kl:.4f}')

    return Latent_embedding(points, labels, model_index, float(initial_kl), float(final_kl))


def class_silhouette(embedding, own_class):
    '''
    Given a Latent_embedding and a class, return the silhouette score of that class's points against
    the points of all other classes.

    Raise Tsne_error if either side is empty.
    '''
    own = embedding.labels == own_class

    if own.all() or not own.any():
        raise Tsne_error(f'Class {own_class} needs both its own points and others for a silhouette')

    return float(sklearn.metrics.silhouette_score(embedding.points, own.astype(int)))

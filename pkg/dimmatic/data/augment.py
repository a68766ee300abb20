import collections

import numpy as np

BINARIZE_THRESHOLD = 0.5

# Stream identifiers, so each augmentation channel draws from its own independent stream.
LINF_CHANNEL = 0
L0_CHANNEL = 1
BRIGHTNESS_CHANNEL = 2
SHUFFLE_CHANNEL = 3

Noise_spec = collections.namedtuple(
    'Noise_spec', ('linf_halfwidth', 'l0_flip_prob', 'seed'), defaults=(0.5, 1 / 12, 0)
)


def make_noise_spec(linf_halfwidth=0.5, l0_flip_prob=1 / 12, seed=0):
    '''
    Return a validated Noise_spec.

    Raise ValueError if the halfwidth is negative or the flip probability is outside [0, 0.5].
    '''
    if linf_halfwidth < 0:
        raise ValueError(f'L-infinity noise halfwidth must be non-negative, got {linf_halfwidth}')

    if not 0 <= l0_flip_prob <= 0.5:
        raise ValueError(f'L0 flip probability must lie in [0, 0.5], got {l0_flip_prob}')

    return Noise_spec(float(linf_halfwidth), float(l0_flip_prob), int(seed))


def sample_stream(seed, *keys):
    '''
    Return a numpy Generator derived from the seed and the given non-negative integer keys. The same
    seed and keys always produce the same stream.
    '''
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(key) for key in keys)]))


def per_image_uniform(seed, channel, epoch, indices, shape):
    '''
    Return an array shaped (len(indices),) + shape of uniform [0, 1) draws, where row n comes from
    the stream for (seed, channel, epoch, indices[n]). The draws for an image don't depend on which
    other images share its batch.
    '''
    return np.stack(
        [
            sample_stream(seed, channel, epoch, index).random(shape, dtype=np.float64)
            for index in indices
        ]
    )


def default_indices(images, indices):
    return np.arange(len(images)) if indices is None else np.asarray(indices)


def linf_offsets(images, spec, epoch, indices):
    draws = per_image_uniform(spec.seed, LINF_CHANNEL, epoch, indices, images.shape[1:])

    return (2 * draws - 1) * spec.linf_halfwidth


def l0_offsets(images, spec, epoch, indices):
    draws = per_image_uniform(spec.seed, L0_CHANNEL, epoch, indices, images.shape[1:])
    probability = spec.l0_flip_prob

    return (draws < probability).astype(np.float64) - (
        (draws >= probability) & (draws < 2 * probability)
    ).astype(np.float64)


def add_linf_noise(images, spec, epoch=0, indices=None):
    '''
    Given images with pixels in [0, 1] and a Noise_spec, add independent uniform noise in
    [-halfwidth, halfwidth] to every pixel and clamp back into [0, 1].
    '''
    indices = default_indices(images, indices)
    noisy = images + linf_offsets(images, spec, epoch, indices)

    return np.clip(noisy, 0, 1).astype(images.dtype)


def add_l0_noise(images, spec, epoch=0, indices=None):
    '''
    Given images with pixels in [0, 1] and a Noise_spec, independently add 1 to each pixel with the
    flip probability, subtract 1 with the same probability, and clamp back into [0, 1]. Affected
    pixels therefore saturate to white or black.
    '''
    indices = default_indices(images, indices)
    noisy = images + l0_offsets(images, spec, epoch, indices)

    return np.clip(noisy, 0, 1).astype(images.dtype)


def add_training_noise(images, spec, epoch=0, indices=None):
    '''
    Apply both training noise channels, L-infinity first and then L0, with a single clamp at the
    end.
    '''
    indices = default_indices(images, indices)
    noisy = images + linf_offsets(images, spec, epoch, indices) + l0_offsets(
        images, spec, epoch, indices
    )

    return np.clip(noisy, 0, 1).astype(images.dtype)


def brightness_factors(seed, epoch, indices):
    return np.array(
        [sample_stream(seed, BRIGHTNESS_CHANNEL, epoch, index).random() for index in indices]
    )


def brightness_jitter(images, seed, epoch=0, indices=None):
    '''
    Multiply every image by its own brightness factor drawn uniformly from [0, 1]. Return a tuple of
    (scaled images, factors).
    '''
    indices = default_indices(images, indices)
    factors = brightness_factors(seed, epoch, indices)
    scale = factors.reshape((len(images),) + (1,) * (images.ndim - 1))

    return (images * scale).astype(images.dtype), factors


def binarize(images, threshold=BINARIZE_THRESHOLD):
    '''
    Map pixels at or above the threshold to 1 and the rest to 0.
    '''
    return (images >= threshold).astype(images.dtype)

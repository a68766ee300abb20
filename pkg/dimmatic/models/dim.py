import collections
import logging

import numpy as np

from dimmatic.models import architectures, classifier
from dimmatic.nn import network as nn_network

logger = logging.getLogger(__name__)

Dim_trace = collections.namedtuple(
    'Dim_trace',
    (
        'count',
        'input_cache',
        'denoiser_trace',
        'clamp_mask',
        'denoised_cache',
        'bank_inputs',
        'bank_trace',
        'reconstructions',
        'denominators',
        'intensities',
    ),
)


class Dim_classifier(classifier.Classifier):
    '''
    A reconstruction-based classifier: an optional denoiser cleans the input, then one internal
    model per class tries to reconstruct it. The class score is each reconstruction's L1 norm
    relative to the L1 norm of what the internal models were given.

    Binarization can act on the raw input and on the denoised image. Setting exactly one of the two
    requires allow_mixed.
    '''

    BINARIZER_ATTRIBUTES = ('input_binarizer', 'denoised_binarizer')
    loss = 'margin'

    def __init__(
        self,
        bank,
        denoiser=None,
        binarize_input=False,
        binarize_denoised=False,
        name='dim',
        image_shape=architectures.IMAGE_SHAPE,
        allow_mixed=False,
    ):
        if binarize_input != binarize_denoised and not allow_mixed:
            raise ValueError(
                f'{name}: Binarizing only the input or only the denoised image is not supported'
            )

        super().__init__(name, image_shape)
        self.bank = bank
        self.denoiser = denoiser
        self.class_count = bank.class_count
        self.input_binarizer = classifier.Hard_binarizer() if binarize_input else None
        self.denoised_binarizer = classifier.Hard_binarizer() if binarize_denoised else None

    def denoise(self, flat_images):
        '''
        Return a tuple of (clamped denoiser output, denoiser trace, mask of unclamped pixels). Without
        a denoiser, pass the input through.
        '''
        if self.denoiser is None:
            return flat_images, None, None

        raw, trace = nn_network.forward(self.denoiser, flat_images)
        mask = (raw > 0) & (raw < 1)

        return np.clip(raw, 0, 1), trace, mask

    def forward(self, images):
        count = len(images)
        flat = images.reshape(count, -1)

        binarized, input_cache = classifier.apply_binarizer(self.input_binarizer, flat)
        denoised, denoiser_trace, clamp_mask = self.denoise(binarized)
        bank_inputs, denoised_cache = classifier.apply_binarizer(self.denoised_binarizer, denoised)

        reconstructions, bank_trace = self.bank.reconstruct(bank_inputs)
        numerators = np.abs(reconstructions).sum(axis=2, dtype=np.float64)
        denominators = np.abs(bank_inputs).sum(axis=1, dtype=np.float64)
        nonzero = denominators > 0
        intensities = np.zeros_like(numerators)
        intensities[:, nonzero] = numerators[:, nonzero] / denominators[nonzero]

        trace = Dim_trace(
            count,
            input_cache,
            denoiser_trace,
            clamp_mask,
            denoised_cache,
            bank_inputs,
            bank_trace,
            reconstructions,
            denominators,
            intensities,
        )

        return intensities.T, trace

    def input_gradient(self, trace, score_grads):
        '''
        Backpropagate through the intensity ratio, both L1 norms, the internal models, the optional
        binarizations and the denoiser with its output clamp.
        '''
        grads = np.asarray(score_grads, dtype=np.float64).T
        nonzero = trace.denominators > 0
        inverse = np.where(nonzero, 1 / np.where(nonzero, trace.denominators, 1), 0)

        reconstruction_grads = (grads * inverse)[:, :, np.newaxis] * np.sign(
            trace.reconstructions
        )
        denominator_grads = -(grads * trace.intensities).sum(axis=0) * inverse
        dtype = trace.bank_inputs.dtype

        bank_input_grad = self.bank.input_gradient(
            trace.bank_trace, reconstruction_grads.astype(dtype)
        ) + (denominator_grads[:, np.newaxis] * np.sign(trace.bank_inputs)).astype(dtype)

        denoised_grad = classifier.backward_binarizer(
            self.denoised_binarizer, trace.denoised_cache, bank_input_grad
        )

        if self.denoiser is not None:
            denoised_grad = nn_network.backward(
                self.denoiser,
                trace.denoiser_trace,
                denoised_grad * trace.clamp_mask,
                parameter_gradients=False,
            )[1]

        input_grad = classifier.backward_binarizer(
            self.input_binarizer, trace.input_cache, denoised_grad
        )

        return input_grad.reshape((trace.count,) + self.image_shape)


def relative_intensity(dim, images):
    '''
    Given a Dim_classifier and images, return the relative intensity of every class per image,
    shaped (N, K). Images whose internal model input is entirely black get all-zero intensities.
    '''
    return dim.scores(images)


def dim_predict(dim, images):
    '''
    Given a Dim_classifier and images, return a tuple of (predicted classes, degenerate mask). An
    image is degenerate when all of its intensities are zero, in which case it's predicted as class
    0.
    '''
    intensities = relative_intensity(dim, images)
    degenerate = ~np.any(intensities > 0, axis=1)

    if np.any(degenerate):
        logger.debug(f'{dim.name}: {int(degenerate.sum())} images have all-zero intensities')

    return np.argmax(intensities, axis=1), degenerate

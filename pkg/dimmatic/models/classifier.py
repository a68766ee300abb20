import copy

import numpy as np

from dimmatic.data import augment
from dimmatic.nn import layers as layer_functions


class Hard_binarizer:
    '''
    Thresholds pixels to 0 or 1. Its gradient is zero almost everywhere, so a model using it isn't
    usefully differentiable.
    '''

    def __init__(self, threshold=augment.BINARIZE_THRESHOLD):
        self.threshold = threshold

    def forward(self, values):
        return augment.binarize(values, self.threshold), None

    def backward(self, cache, grad):
        return np.zeros_like(grad)


class Sigmoid_binarizer:
    '''
    A differentiable stand-in for Hard_binarizer: 1 / (1 + exp(-alpha * (x - threshold))).
    '''

    def __init__(self, alpha, threshold=augment.BINARIZE_THRESHOLD):
        if alpha <= 0:
            raise ValueError(f'Sigmoid proxy steepness must be positive, got {alpha}')

        self.alpha = float(alpha)
        self.threshold = threshold
        self.dims = {'alpha': self.alpha, 'threshold': threshold}

    def forward(self, values):
        return layer_functions.sigmoid_forward(None, self.dims, values)

    def backward(self, cache, grad):
        return layer_functions.sigmoid_backward(None, self.dims, cache, grad, None)


def apply_binarizer(binarizer, values):
    if binarizer is None:
        return values, None

    return binarizer.forward(values)


def backward_binarizer(binarizer, cache, grad):
    if binarizer is None:
        return grad

    return binarizer.backward(cache, grad)


class Classifier:
    '''
    Base class for every model the attacks and the evaluation harness can query. Subclasses list the
    attributes holding their optional binarizers in BINARIZER_ATTRIBUTES and implement forward() and
    input_gradient().
    '''

    BINARIZER_ATTRIBUTES = ()
    loss = 'cross_entropy'
    class_count = 10

    def __init__(self, name, image_shape):
        self.name = name
        self.image_shape = tuple(image_shape)

    def binarizers(self):
        return [
            getattr(self, attribute)
            for attribute in self.BINARIZER_ATTRIBUTES
            if getattr(self, attribute) is not None
        ]

    @property
    def binarizes(self):
        return bool(self.binarizers())

    @property
    def differentiable(self):
        return not any(isinstance(binarizer, Hard_binarizer) for binarizer in self.binarizers())

    def forward(self, images):
        '''
        Given images shaped (N,) + image_shape, return a tuple of (class scores shaped (N, K),
        trace for input_gradient()).
        '''
        raise NotImplementedError()

    def input_gradient(self, trace, score_grads):
        '''
        Given the trace from forward() and the gradient of a scalar loss with respect to the
        scores, return the gradient with respect to the input images.
        '''
        raise NotImplementedError()

    def scores(self, images):
        return self.forward(images)[0]

    def predict(self, images):
        '''
        Return the highest scoring class per image, breaking ties toward the lowest class index.
        '''
        return np.argmax(self.scores(images), axis=1)

    def replace_binarizers(self, make_binarizer):
        model = copy.copy(self)

        for attribute in self.BINARIZER_ATTRIBUTES:
            if getattr(self, attribute) is not None:
                setattr(model, attribute, make_binarizer())

        return model

    def with_proxy(self, alpha):
        '''
        Return a copy of this model with every binarization replaced by a sigmoid of the given
        steepness. The copy shares this model's networks.
        '''
        return self.replace_binarizers(lambda: Sigmoid_binarizer(alpha))

    def hard_model(self):
        return self.replace_binarizers(Hard_binarizer)

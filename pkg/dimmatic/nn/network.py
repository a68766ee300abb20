import collections
import logging

import numpy as np

from dimmatic.nn import layers as layer_functions

logger = logging.getLogger(__name__)

Layer_spec = collections.namedtuple('Layer_spec', ('kind', 'dims'))


class Shape_error(ValueError):
    '''
    Raised when a network's layers don't chain together, or when an input doesn't match what a
    network expects.
    '''


def dense(in_features, out_features):
    return Layer_spec('dense', {'in_features': in_features, 'out_features': out_features})


def conv2d(in_channels, out_channels, kernel_size, stride, in_height, in_width):
    '''
    Return a Layer_spec for a valid (unpadded) 2D convolution, with its output size derived from the
    given input size.
    '''
    return Layer_spec(
        'conv2d',
        {
            'in_channels': in_channels,
            'out_channels': out_channels,
            'kernel_size': kernel_size,
            'stride': stride,
            'in_height': in_height,
            'in_width': in_width,
            'out_height': layer_functions.conv2d_output_size(in_height, kernel_size, stride),
            'out_width': layer_functions.conv2d_output_size(in_width, kernel_size, stride),
        },
    )


def maxpool2d(channels, in_height, in_width, size=2):
    return Layer_spec(
        'maxpool2d',
        {
            'channels': channels,
            'size': size,
            'in_height': in_height,
            'in_width': in_width,
            'out_height': in_height // size,
            'out_width': in_width // size,
        },
    )


def relu():
    return Layer_spec('relu', {})


def tanh():
    return Layer_spec('tanh', {})


def sigmoid(alpha=1.0, threshold=0.0):
    return Layer_spec('sigmoid', {'alpha': float(alpha), 'threshold': float(threshold)})


def flatten(channels, height, width):
    return Layer_spec('flatten', {'channels': channels, 'height': height, 'width': width})


def infer_shapes(layers):
    '''
    Given a sequence of Layer_spec instances, return a tuple of (input shape, output shape) for the
    whole chain, excluding the batch axis.

    Raise Shape_error if a layer's declared input doesn't match the previous layer's output, or if no
    layer in the chain declares an input shape at all.
    '''
    input_shape = None
    current_shape = None

    for index, layer in enumerate(layers):
        functions = layer_functions.functions_for_kind(layer.kind)
        expected_shape = functions.input_shape(layer.dims)

        if expected_shape is not None:
            if current_shape is None and input_shape is None:
                input_shape = expected_shape
            elif current_shape != expected_shape:
                raise Shape_error(
                    f'Layer {index} ({layer.kind}) expects input shape {expected_shape} but receives {current_shape}'
                )

        current_shape = functions.output_shape(layer.dims, expected_shape or current_shape)

    if input_shape is None:
        raise Shape_error('Cannot infer the input shape of a network without shaped layers')

    return input_shape, current_shape


class Network:
    '''
    An ordered chain of layers whose parameters all live in one flat weight vector. Each parameter
    of each layer is a reshaped view into that vector, so updating the vector in place updates
    every layer.
    '''

    def __init__(self, layers, weights, input_shape=None, output_shape=None):
        self.layers = tuple(layers)

        if input_shape is None or output_shape is None:
            input_shape, output_shape = infer_shapes(self.layers)

        self.input_shape = tuple(input_shape)
        self.output_shape = tuple(output_shape)
        self.parameter_count = parameter_count(self.layers)

        if weights.ndim != 1 or len(weights) != self.parameter_count:
            raise Shape_error(
                f'Expected {self.parameter_count} weights for these layers, got {weights.size}'
            )

        self.weights = weights
        self.layer_parameters = parameter_views(self.layers, self.weights)

    @property
    def dtype(self):
        return self.weights.dtype

    def slice(self, start, stop):
        '''
        Return a new Network made of the layers in the given half-open range, sharing this
        network's weight storage.
        '''
        offset = parameter_count(self.layers[:start])
        count = parameter_count(self.layers[start:stop])

        return Network(self.layers[start:stop], self.weights[offset : offset + count])

    def copy(self):
        return Network(self.layers, self.weights.copy(), self.input_shape, self.output_shape)

    def astype(self, dtype):
        return Network(
            self.layers, self.weights.astype(dtype), self.input_shape, self.output_shape
        )


def parameter_count(layers):
    return sum(
        int(np.prod(shape))
        for layer in layers
        for name, shape in layer_functions.functions_for_kind(layer.kind).parameter_shapes(
            layer.dims
        )
    )


def parameter_views(layers, flat):
    '''
    Given a sequence of Layer_spec instances and a flat vector long enough to hold all of their
    parameters, return a list with one dict per layer mapping parameter name to a reshaped view into
    the vector.
    '''
    views = []
    offset = 0

    for layer in layers:
        params = {}

        for name, shape in layer_functions.functions_for_kind(layer.kind).parameter_shapes(
            layer.dims
        ):
            size = int(np.prod(shape))
            params[name] = flat[offset : offset + size].reshape(shape)
            offset += size

        views.append(params)

    return views


def glorot_bound(name, shape):
    if len(shape) == 2:
        fan_in, fan_out = shape
    else:
        receptive = int(np.prod(shape[2:]))
        fan_in, fan_out = shape[1] * receptive, shape[0] * receptive

    return np.sqrt(6.0 / (fan_in + fan_out))


def build_network(layers, seed=0, dtype=np.float32):
    '''
    Given a sequence of Layer_spec instances, a seed, and a dtype, return a new Network with
    Glorot-uniform weights and zero biases.

    Raise Shape_error if the layers don't chain.
    '''
    layers = tuple(layers)
    input_shape, output_shape = infer_shapes(layers)
    weights = np.zeros(parameter_count(layers), dtype=dtype)
    rng = np.random.default_rng(seed)

    for params in parameter_views(layers, weights):
        for name, view in params.items():
            if name == 'weight':
                bound = glorot_bound(name, view.shape)
                view[...] = rng.uniform(-bound, bound, size=view.shape)

    logger.debug(f'Built a {len(layers)} layer network with {len(weights)} parameters')

    return Network(layers, weights, input_shape, output_shape)


Forward_trace = collections.namedtuple('Forward_trace', ('network', 'caches'))


def check_input(network, inputs):
    if tuple(inputs.shape[1:]) != network.input_shape:
        raise Shape_error(
            f'Network expects inputs shaped (N, {", ".join(str(size) for size in network.input_shape)}) but got {inputs.shape}'
        )


def forward(network, inputs):
    '''
    Given a Network and a batch of inputs with a leading batch axis, run the batch through every
    layer. Return a tuple of (outputs, Forward_trace), where the trace holds the per-layer caches
    needed by backward().

    Raise Shape_error if the inputs don't match the network's input shape.
    '''
    check_input(network, inputs)

    current = inputs.astype(network.dtype, copy=False)
    caches = []

    for layer, params in zip(network.layers, network.layer_parameters):
        current, cache = layer_functions.LAYER_KIND_TO_FUNCTIONS[layer.kind].forward(
            params, layer.dims, current
        )
        caches.append(cache)

    return current, Forward_trace(network, caches)


def predict(network, inputs):
    '''
    Like forward(), but return only the outputs.
    '''
    return forward(network, inputs)[0]


def backward(network, trace, output_grad, parameter_gradients=True):
    '''
    Given a Network, the Forward_trace from a forward() call on it, and the gradient of a scalar loss
    with respect to the network's outputs, return a tuple of (flat parameter gradient, input
    gradient). The parameter gradient is laid out like the network's weights, or is None if
    parameter_gradients is False.

    Raise ValueError if the trace is missing or came from a different network.
    '''
    if trace is None:
        raise ValueError('backward() requires the trace from a prior forward() call')

    if trace.network is not network and trace.network.weights is not network.weights:
        raise ValueError('The given trace was produced by a different network')

    flat_grads = None
    grad_views = [None] * len(network.layers)

    if parameter_gradients:
        flat_grads = np.zeros_like(network.weights)
        grad_views = parameter_views(network.layers, flat_grads)

    current = output_grad.astype(network.dtype, copy=False)

    for index in reversed(range(len(network.layers))):
        layer = network.layers[index]
        current = layer_functions.LAYER_KIND_TO_FUNCTIONS[layer.kind].backward(
            network.layer_parameters[index],
            layer.dims,
            trace.caches[index],
            current,
            grad_views[index],
        )

    return flat_grads, current

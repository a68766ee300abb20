import collections

import numpy as np

# Per-kind dimension names, in the order they're serialized into checkpoints.
LAYER_DIM_NAMES = {
    'dense': ('in_features', 'out_features'),
    'conv2d': (
        'in_channels',
        'out_channels',
        'kernel_size',
        'stride',
        'in_height',
        'in_width',
        'out_height',
        'out_width',
    ),
    'maxpool2d': ('channels', 'size', 'in_height', 'in_width', 'out_height', 'out_width'),
    'relu': (),
    'tanh': (),
    'sigmoid': ('alpha', 'threshold'),
    'flatten': ('channels', 'height', 'width'),
}

# Dims stored as 32-bit reals rather than integers.
FLOAT_DIM_NAMES = frozenset(('alpha', 'threshold'))


def dense_parameter_shapes(dims):
    return (
        ('weight', (dims['in_features'], dims['out_features'])),
        ('bias', (dims['out_features'],)),
    )


def dense_input_shape(dims):
    return (dims['in_features'],)


def dense_output_shape(dims, input_shape):
    return (dims['out_features'],)


def dense_forward(params, dims, inputs):
    return inputs @ params['weight'] + params['bias'], inputs


def dense_backward(params, dims, cache, output_grad, param_grads):
    if param_grads is not None:
        param_grads['weight'][...] = cache.T @ output_grad
        param_grads['bias'][...] = output_grad.sum(axis=0, dtype=np.float64)

    return output_grad @ params['weight'].T


def im2col(images, kernel_size, stride, out_height, out_width):
    '''
    Given a batch of images shaped (N, C, H, W), unfold every kernel window into a row and return a
    matrix shaped (N * out_height * out_width, C * kernel_size * kernel_size).
    '''
    count, channels = images.shape[:2]
    columns = np.empty(
        (count, channels, kernel_size, kernel_size, out_height, out_width), dtype=images.dtype
    )

    for row in range(kernel_size):
        row_stop = row + stride * out_height
        for column in range(kernel_size):
            column_stop = column + stride * out_width
            columns[:, :, row, column] = images[
                :, :, row:row_stop:stride, column:column_stop:stride
            ]

    return columns.transpose(0, 4, 5, 1, 2, 3).reshape(count * out_height * out_width, -1)


def col2im(columns, input_shape, kernel_size, stride, out_height, out_width):
    '''
    Inverse of im2col() for gradients: fold the rows back into an image batch of the given input
    shape, summing wherever kernel windows overlap.
    '''
    count, channels, height, width = input_shape
    columns = columns.reshape(
        count, out_height, out_width, channels, kernel_size, kernel_size
    ).transpose(0, 3, 4, 5, 1, 2)
    images = np.zeros(input_shape, dtype=columns.dtype)

    for row in range(kernel_size):
        row_stop = row + stride * out_height
        for column in range(kernel_size):
            column_stop = column + stride * out_width
            images[:, :, row:row_stop:stride, column:column_stop:stride] += columns[
                :, :, row, column
            ]

    return images


def conv2d_output_size(size, kernel_size, stride):
    return (size - kernel_size) // stride + 1


def conv2d_parameter_shapes(dims):
    kernel_size = dims['kernel_size']

    return (
        ('weight', (dims['out_channels'], dims['in_channels'], kernel_size, kernel_size)),
        ('bias', (dims['out_channels'],)),
    )


def conv2d_input_shape(dims):
    return (dims['in_channels'], dims['in_height'], dims['in_width'])


def conv2d_output_shape(dims, input_shape):
    return (dims['out_channels'], dims['out_height'], dims['out_width'])


def conv2d_forward(params, dims, inputs):
    out_height, out_width = dims['out_height'], dims['out_width']
    columns = im2col(inputs, dims['kernel_size'], dims['stride'], out_height, out_width)
    kernel = params['weight'].reshape(dims['out_channels'], -1)
    outputs = columns @ kernel.T + params['bias']
    outputs = outputs.reshape(len(inputs), out_height, out_width, -1).transpose(0, 3, 1, 2)

    return np.ascontiguousarray(outputs), (columns, inputs.shape)


def conv2d_backward(params, dims, cache, output_grad, param_grads):
    columns, input_shape = cache
    out_channels = dims['out_channels']
    flat_grad = output_grad.transpose(0, 2, 3, 1).reshape(-1, out_channels)
    kernel = params['weight'].reshape(out_channels, -1)

    if param_grads is not None:
        param_grads['weight'][...] = (flat_grad.T @ columns).reshape(params['weight'].shape)
        param_grads['bias'][...] = flat_grad.sum(axis=0, dtype=np.float64)

    return col2im(
        flat_grad @ kernel,
        input_shape,
        dims['kernel_size'],
        dims['stride'],
        dims['out_height'],
        dims['out_width'],
    )


def maxpool2d_input_shape(dims):
    return (dims['channels'], dims['in_height'], dims['in_width'])


def maxpool2d_output_shape(dims, input_shape):
    return (dims['channels'], dims['out_height'], dims['out_width'])


def maxpool2d_forward(params, dims, inputs):
    size = dims['size']
    out_height, out_width = dims['out_height'], dims['out_width']
    count, channels = inputs.shape[:2]
    windows = (
        inputs[:, :, : out_height * size, : out_width * size]
        .reshape(count, channels, out_height, size, out_width, size)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(count, channels, out_height, out_width, size * size)
    )
    # Ties route the gradient to the first maximum only.
    winners = windows.argmax(axis=-1)[..., np.newaxis]

    return np.take_along_axis(windows, winners, axis=-1)[..., 0], (winners, inputs.shape)


def maxpool2d_backward(params, dims, cache, output_grad, param_grads):
    winners, input_shape = cache
    size = dims['size']
    out_height, out_width = dims['out_height'], dims['out_width']
    count, channels = input_shape[:2]
    window_grads = np.zeros(
        (count, channels, out_height, out_width, size * size), dtype=output_grad.dtype
    )
    np.put_along_axis(window_grads, winners, output_grad[..., np.newaxis], axis=-1)

    input_grad = np.zeros(input_shape, dtype=output_grad.dtype)
    input_grad[:, :, : out_height * size, : out_width * size] = (
        window_grads.reshape(count, channels, out_height, out_width, size, size)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(count, channels, out_height * size, out_width * size)
    )

    return input_grad


def no_parameters(dims):
    return ()


def elementwise_input_shape(dims):
    return None


def elementwise_output_shape(dims, input_shape):
    return input_shape


def relu_forward(params, dims, inputs):
    mask = inputs > 0

    return inputs * mask, mask


def relu_backward(params, dims, cache, output_grad, param_grads):
    return output_grad * cache


def tanh_forward(params, dims, inputs):
    outputs = np.tanh(inputs)

    return outputs, outputs


def tanh_backward(params, dims, cache, output_grad, param_grads):
    return output_grad * (1 - cache * cache)


def sigmoid_forward(params, dims, inputs):
    '''
    Compute 1 / (1 + exp(-alpha * (x - threshold))) through tanh, which can't overflow.
    '''
    scaled = dims.get('alpha', 1.0) * (inputs - dims.get('threshold', 0.0))
    outputs = (0.5 * (1 + np.tanh(0.5 * scaled))).astype(inputs.dtype)

    return outputs, outputs


def sigmoid_backward(params, dims, cache, output_grad, param_grads):
    return output_grad * (dims.get('alpha', 1.0) * cache * (1 - cache)).astype(cache.dtype)


def flatten_input_shape(dims):
    return (dims['channels'], dims['height'], dims['width'])


def flatten_output_shape(dims, input_shape):
    return (dims['channels'] * dims['height'] * dims['width'],)


def flatten_forward(params, dims, inputs):
    return inputs.reshape(len(inputs), -1), inputs.shape


def flatten_backward(params, dims, cache, output_grad, param_grads):
    return output_grad.reshape(cache)


Layer_functions = collections.namedtuple(
    'Layer_functions', ('parameter_shapes', 'input_shape', 'output_shape', 'forward', 'backward')
)

LAYER_KIND_TO_FUNCTIONS = {
    'dense': Layer_functions(
        dense_parameter_shapes, dense_input_shape, dense_output_shape, dense_forward, dense_backward
    ),
    'conv2d': Layer_functions(
        conv2d_parameter_shapes,
        conv2d_input_shape,
        conv2d_output_shape,
        conv2d_forward,
        conv2d_backward,
    ),
    'maxpool2d': Layer_functions(
        no_parameters,
        maxpool2d_input_shape,
        maxpool2d_output_shape,
        maxpool2d_forward,
        maxpool2d_backward,
    ),
    'relu': Layer_functions(
        no_parameters, elementwise_input_shape, elementwise_output_shape, relu_forward, relu_backward
    ),
    'tanh': Layer_functions(
        no_parameters, elementwise_input_shape, elementwise_output_shape, tanh_forward, tanh_backward
    ),
    'sigmoid': Layer_functions(
        no_parameters,
        elementwise_input_shape,
        elementwise_output_shape,
        sigmoid_forward,
        sigmoid_backward,
    ),
    'flatten': Layer_functions(
        no_parameters, flatten_input_shape, flatten_output_shape, flatten_forward, flatten_backward
    ),
}


def functions_for_kind(kind):
    '''
    Given a layer kind string, return its Layer_functions.

    Raise ValueError if the kind is unknown.
    '''
    try:
        return LAYER_KIND_TO_FUNCTIONS[kind]
    except KeyError:
        raise ValueError(f'Unknown layer kind: {kind}')

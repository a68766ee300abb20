import logging
import struct

import numpy as np

from dimmatic.nn import layers as layer_functions
from dimmatic.nn import network as nn_network

logger = logging.getLogger(__name__)

MAGIC = b'DIMC'
FORMAT_VERSION = 1

LAYER_KIND_TO_TAG = {
    'dense': 1,
    'conv2d': 2,
    'maxpool2d': 3,
    'relu': 4,
    'tanh': 5,
    'sigmoid': 6,
    'flatten': 7,
}
TAG_TO_LAYER_KIND = {tag: kind for kind, tag in LAYER_KIND_TO_TAG.items()}


class Checkpoint_error(ValueError):
    '''
    Raised when checkpoint bytes can't be decoded into a network.
    '''


def float_to_bits(value):
    return struct.unpack('<I', struct.pack('<f', value))[0]


def bits_to_float(bits):
    return struct.unpack('<f', struct.pack('<I', bits))[0]


def save_checkpoint(network):
    '''
    Given a Network, return its checkpoint encoding as bytes. Weights are always stored as
    little-endian 32-bit floats, whatever the network's dtype.
    '''
    chunks = [MAGIC, struct.pack('<II', FORMAT_VERSION, len(network.layers))]

    for layer in network.layers:
        names = layer_functions.LAYER_DIM_NAMES[layer.kind]
        values = [
            float_to_bits(layer.dims[name])
            if name in layer_functions.FLOAT_DIM_NAMES
            else int(layer.dims[name])
            for name in names
        ]
        chunks.append(
            struct.pack(f'<II{len(values)}I', LAYER_KIND_TO_TAG[layer.kind], len(values), *values)
        )

    chunks.append(struct.pack('<Q', len(network.weights)))
    chunks.append(network.weights.astype('<f4').tobytes())

    return b''.join(chunks)


class Reader:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def unpack(self, layout):
        size = struct.calcsize(layout)

        if self.offset + size > len(self.data):
            raise Checkpoint_error(f'Checkpoint is truncated at byte {self.offset}')

        values = struct.unpack_from(layout, self.data, self.offset)
        self.offset += size

        return values


def load_checkpoint(data, dtype=np.float32):
    '''
    Given checkpoint bytes as produced by save_checkpoint(), return the decoded Network with weights
    converted to the given dtype.

    Raise Checkpoint_error if the magic is wrong, the version is unsupported, a layer tag or its
    dimension count is invalid, the data is truncated or has trailing bytes, or the weight count
    doesn't match the layers.
    '''
    reader = Reader(bytes(data))

    (magic,) = reader.unpack('<4s')
    if magic != MAGIC:
        raise Checkpoint_error(f'Not a checkpoint: bad magic {magic!r}')

    version, layer_count = reader.unpack('<II')
    if version != FORMAT_VERSION:
        raise Checkpoint_error(f'Unsupported checkpoint version {version}')

    layers = []

    for index in range(layer_count):
        tag, dim_count = reader.unpack('<II')
        kind = TAG_TO_LAYER_KIND.get(tag)

        if kind is None:
            raise Checkpoint_error(f'Layer {index} has unknown tag {tag}')

        names = layer_functions.LAYER_DIM_NAMES[kind]
        if dim_count != len(names):
            raise Checkpoint_error(
                f'Layer {index} ({kind}) has {dim_count} dimensions, expected {len(names)}'
            )

        values = reader.unpack(f'<{dim_count}I')
        layers.append(
            nn_network.Layer_spec(
                kind,
                {
                    name: bits_to_float(value)
                    if name in layer_functions.FLOAT_DIM_NAMES
                    else value
                    for name, value in zip(names, values)
                },
            )
        )

    (weight_count,) = reader.unpack('<Q')
    expected_count = nn_network.parameter_count(layers)

    if weight_count != expected_count:
        raise Checkpoint_error(
            f'Checkpoint holds {weight_count} weights but its layers need {expected_count}'
        )

    if reader.offset + 4 * weight_count > len(reader.data):
        raise Checkpoint_error('Checkpoint is truncated in its weights')

    if reader.offset + 4 * weight_count < len(reader.data):
        raise Checkpoint_error(
            f'Checkpoint has {len(reader.data) - reader.offset - 4 * weight_count} trailing bytes'
        )

    weights = np.frombuffer(reader.data, dtype='<f4', count=weight_count, offset=reader.offset)

    try:
        return nn_network.Network(layers, weights.astype(dtype))
    except nn_network.Shape_error as error:
        raise Checkpoint_error(f'Checkpoint layers do not chain: {error}')


def write_checkpoint(network, path):
    logger.debug(f'{path}: Writing checkpoint')

    with open(path, 'wb') as checkpoint_file:
        checkpoint_file.write(save_checkpoint(network))


def read_checkpoint(path, dtype=np.float32):
    logger.debug(f'{path}: Reading checkpoint')

    with open(path, 'rb') as checkpoint_file:
        return load_checkpoint(checkpoint_file.read(), dtype)

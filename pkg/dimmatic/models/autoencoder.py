import collections

import numpy as np

from dimmatic.models import architectures
from dimmatic.nn import network as nn_network

Bank_trace = collections.namedtuple('Bank_trace', ('encoder_trace', 'decoder_traces'))


def split_autoencoder(network):
    '''
    Given a full autoencoder Network with a symmetric layout, return (encoder, decoder) Networks
    sharing its weights.
    '''
    length = len(network.layers) // 2

    return network.slice(0, length), network.slice(length, len(network.layers))


class Internal_model_bank:
    '''
    K independent autoencoders, where autoencoder i reconstructs inputs of class i.
    '''

    def __init__(self, networks):
        if not networks:
            raise ValueError('An internal model bank needs at least one autoencoder')

        self.networks = list(networks)

    @property
    def class_count(self):
        return len(self.networks)

    def reconstruct(self, inputs):
        '''
        Given flat inputs shaped (N, P), return a tuple of (reconstructions shaped (K, N, P), trace).
        '''
        outputs = []
        traces = []

        for network in self.networks:
            output, trace = nn_network.forward(network, inputs)
            outputs.append(output)
            traces.append(trace)

        return np.stack(outputs), Bank_trace(None, traces)

    def input_gradient(self, trace, output_grads):
        return sum(
            nn_network.backward(network, decoder_trace, grad, parameter_gradients=False)[1]
            for network, decoder_trace, grad in zip(
                self.networks, trace.decoder_traces, output_grads
            )
        )

    def encode(self, index, inputs):
        if not 0 <= index < self.class_count:
            raise IndexError(f'Internal model index {index} is outside [0, {self.class_count})')

        return nn_network.predict(split_autoencoder(self.networks[index])[0], inputs)


class Shared_encoder_bank:
    '''
    One encoder shared by K decoders, where decoder i reconstructs inputs of class i.
    '''

    def __init__(self, encoder, decoders):
        if not decoders:
            raise ValueError('A shared encoder bank needs at least one decoder')

        self.encoder = encoder
        self.decoders = list(decoders)

    @property
    def class_count(self):
        return len(self.decoders)

    @property
    def networks(self):
        return [self.encoder] + self.decoders

    def reconstruct(self, inputs):
        latents, encoder_trace = nn_network.forward(self.encoder, inputs)
        outputs = []
        traces = []

        for decoder in self.decoders:
            output, trace = nn_network.forward(decoder, latents)
            outputs.append(output)
            traces.append(trace)

        return np.stack(outputs), Bank_trace(encoder_trace, traces)

    def input_gradient(self, trace, output_grads):
        latent_grad = sum(
            nn_network.backward(decoder, decoder_trace, grad, parameter_gradients=False)[1]
            for decoder, decoder_trace, grad in zip(
                self.decoders, trace.decoder_traces, output_grads
            )
        )

        return nn_network.backward(
            self.encoder, trace.encoder_trace, latent_grad, parameter_gradients=False
        )[1]

    def encode(self, index, inputs):
        if not 0 <= index < self.class_count:
            raise IndexError(f'Internal model index {index} is outside [0, {self.class_count})')

        return nn_network.predict(self.encoder, inputs)


def build_internal_model_bank(
    widths=architectures.INTERNAL_MODEL_WIDTHS, class_count=architectures.CLASS_COUNT, seed=0
):
    return Internal_model_bank(
        [
            nn_network.build_network(architectures.autoencoder_layers(widths), seed=seed + index)
            for index in range(class_count)
        ]
    )


def build_shared_encoder_bank(
    widths=architectures.INTERNAL_MODEL_WIDTHS, class_count=architectures.CLASS_COUNT, seed=0
):
    return Shared_encoder_bank(
        nn_network.build_network(architectures.encoder_layers(widths), seed=seed),
        [
            nn_network.build_network(architectures.decoder_layers(widths), seed=seed + 1 + index)
            for index in range(class_count)
        ],
    )

import collections

from dimmatic.models import architectures, classifier
from dimmatic.nn import network as nn_network

Network_trace = collections.namedtuple('Network_trace', ('count', 'input_cache', 'network_trace'))


class Network_classifier(classifier.Classifier):
    '''
    A classifier whose scores are the logits of a single Network, with optional binarization of its
    input. Serves the convolutional and adversarially trained baselines.
    '''

    BINARIZER_ATTRIBUTES = ('input_binarizer',)

    def __init__(
        self, network, binarize_input=False, name='cnn', image_shape=architectures.IMAGE_SHAPE
    ):
        super().__init__(name, image_shape)
        self.network = network
        self.class_count = network.output_shape[0]
        self.input_binarizer = classifier.Hard_binarizer() if binarize_input else None

    def forward(self, images):
        count = len(images)
        inputs = images.reshape((count,) + self.network.input_shape)
        binarized, input_cache = classifier.apply_binarizer(self.input_binarizer, inputs)
        logits, network_trace = nn_network.forward(self.network, binarized)

        return logits, Network_trace(count, input_cache, network_trace)

    def input_gradient(self, trace, score_grads):
        input_grad = nn_network.backward(
            self.network, trace.network_trace, score_grads, parameter_gradients=False
        )[1]
        input_grad = classifier.backward_binarizer(
            self.input_binarizer, trace.input_cache, input_grad
        )

        return input_grad.reshape((trace.count,) + self.image_shape)

from dimmatic.models import architectures as module
from dimmatic.nn import network as nn_network


def dense_widths(layers):
    return [
        (layer.dims['in_features'], layer.dims['out_features'])
        for layer in layers
        if layer.kind == 'dense'
    ]


def test_autoencoder_layers_for_denoiser_match_widths():
    layers = module.autoencoder_layers(module.DENOISER_WIDTHS)

    assert dense_widths(layers) == [
        (784, 560),
        (560, 280),
        (280, 140),
        (140, 70),
        (70, 140),
        (140, 280),
        (280, 560),
        (560, 784),
    ]


def test_autoencoder_layers_have_linear_bottleneck_and_tanh_output():
    layers = module.autoencoder_layers(module.INTERNAL_MODEL_WIDTHS)
    kinds = [layer.kind for layer in layers]

    assert kinds[6] == 'dense'
    assert kinds[7] == 'dense'
    assert kinds[-1] == 'tanh'
    assert kinds.count('relu') == 6
    assert nn_network.infer_shapes(layers) == ((784,), (784,))


def test_encoder_layers_end_at_bottleneck_width():
    layers = module.encoder_layers(module.INTERNAL_MODEL_WIDTHS)

    assert nn_network.infer_shapes(layers) == ((784,), (10,))
    assert layers[-1].kind == 'dense'


def test_cnn_layers_use_kernel_sizes_and_reduce_to_one_pixel():
    layers = module.cnn_layers()
    convolutions = [layer for layer in layers if layer.kind == 'conv2d']

    assert [layer.dims['kernel_size'] for layer in convolutions] == [5, 4, 3, 5]
    assert [layer.dims['out_height'] for layer in convolutions] == [24, 11, 5, 1]
    assert nn_network.infer_shapes(layers) == ((1, 28, 28), (10,))


def test_madry_layers_have_two_convolutions_two_pools_and_two_dense_layers():
    layers = module.madry_layers()
    kinds = [layer.kind for layer in layers]

    assert kinds.count('conv2d') == 2
    assert kinds.count('maxpool2d') == 2
    assert kinds.count('dense') == 2
    assert dense_widths(layers) == [(1024, 1024), (1024, 10)]
    assert nn_network.infer_shapes(layers) == ((1, 28, 28), (10,))

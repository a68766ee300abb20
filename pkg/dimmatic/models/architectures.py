from dimmatic.nn import network as nn_network

IMAGE_SHAPE = (1, 28, 28)
PIXEL_COUNT = 784
CLASS_COUNT = 10

DENOISER_WIDTHS = (784, 560, 280, 140, 70)
INTERNAL_MODEL_WIDTHS = (784, 256, 64, 12, 10)
CNN_CHANNELS = (32, 64, 64, 128)
CNN_KERNEL_SIZES = (5, 4, 3, 5)
CNN_STRIDES = (1, 2, 2, 1)


def encoder_layers(widths):
    '''
    Given a sequence of widths from the input down to the bottleneck, return dense layers with ReLU
    between them and a linear bottleneck.
    '''
    layers = []

    for index, (in_features, out_features) in enumerate(zip(widths, widths[1:])):
        if index:
            layers.append(nn_network.relu())
        layers.append(nn_network.dense(in_features, out_features))

    return layers


def decoder_layers(widths):
    '''
    Given the same widths passed to encoder_layers(), return the mirrored decoder: dense layers with
    ReLU between them and a tanh output.
    '''
    mirrored = tuple(reversed(widths))
    layers = []

    for index, (in_features, out_features) in enumerate(zip(mirrored, mirrored[1:])):
        if index:
            layers.append(nn_network.relu())
        layers.append(nn_network.dense(in_features, out_features))

    layers.append(nn_network.tanh())

    return layers


def autoencoder_layers(widths):
    return encoder_layers(widths) + decoder_layers(widths)


def cnn_layers(
    channels=CNN_CHANNELS,
    kernel_sizes=CNN_KERNEL_SIZES,
    strides=CNN_STRIDES,
    image_shape=IMAGE_SHAPE,
    class_count=CLASS_COUNT,
):
    '''
    Return the vanilla convolutional baseline: valid convolutions with ReLU, then a dense head over
    the flattened feature map.
    '''
    in_channels, height, width = image_shape
    layers = []

    for out_channels, kernel_size, stride in zip(channels, kernel_sizes, strides):
        layer = nn_network.conv2d(in_channels, out_channels, kernel_size, stride, height, width)
        layers.extend((layer, nn_network.relu()))
        in_channels, height, width = out_channels, layer.dims['out_height'], layer.dims['out_width']

    layers.append(nn_network.flatten(in_channels, height, width))
    layers.append(nn_network.dense(in_channels * height * width, class_count))

    return layers


def madry_layers(
    channels=(32, 64), kernel_size=5, hidden=1024, image_shape=IMAGE_SHAPE, class_count=CLASS_COUNT
):
    '''
    Return the adversarial-training baseline: two convolution and max-pooling stages followed by two
    dense layers.
    '''
    in_channels, height, width = image_shape
    layers = []

    for out_channels in channels:
        convolution = nn_network.conv2d(in_channels, out_channels, kernel_size, 1, height, width)
        height, width = convolution.dims['out_height'], convolution.dims['out_width']
        pool = nn_network.maxpool2d(out_channels, height, width)
        layers.extend((convolution, nn_network.relu(), pool))
        in_channels, height, width = out_channels, pool.dims['out_height'], pool.dims['out_width']

    layers.append(nn_network.flatten(in_channels, height, width))
    layers.append(nn_network.dense(in_channels * height * width, hidden))
    layers.append(nn_network.relu())
    layers.append(nn_network.dense(hidden, class_count))

    return layers

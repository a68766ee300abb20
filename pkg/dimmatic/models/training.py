import collections
import logging

import numpy as np

import dimmatic.execute
from dimmatic.data import augment
from dimmatic.models import architectures, autoencoder, baseline, dim
from dimmatic.nn import losses
from dimmatic.nn import network as nn_network
from dimmatic.nn import optimizer

logger = logging.getLogger(__name__)

DEFAULT_EPOCHS = 20
DEFAULT_BATCH_SIZE = 128
DEFAULT_LEARNING_RATE = 1e-3

MADRY_EPSILON = 0.3
MADRY_STEPS = 40
MADRY_STEP_SIZE = 0.01

# Stream identifier for the random start of adversarial training's inner attack.
MADRY_START_CHANNEL = 4

Training_trace = collections.namedtuple('Training_trace', ('initial_loss', 'epoch_losses'))

Training_options = collections.namedtuple(
    'Training_options',
    ('epochs', 'batch_size', 'learning_rate', 'seed'),
    defaults=(DEFAULT_EPOCHS, DEFAULT_BATCH_SIZE, DEFAULT_LEARNING_RATE, 0),
)


def check_loss(loss):
    if not np.isfinite(loss):
        raise optimizer.Divergence_error(f'Non-finite loss {loss}')


def dataset_loss(batch_step, data, epoch, batch_size):
    '''
    Return the mean loss of the given batch step over the whole dataset at the given epoch's
    augmentation, without computing gradients.
    '''
    total = 0.0

    for indices, batch in data.minibatches(batch_size):
        loss, grads = batch_step(indices, batch, epoch, False)
        total += loss * len(indices)

    return total / len(data)


def fit(subject, parameters, batch_step, data, options):
    '''
    Given a subject name for logging, a list of flat parameter vectors, a batch step function, an
    Image_batch, and Training_options, train the parameters in place with Adam and return a
    Training_trace.

    The batch step is called as batch_step(indices, batch, epoch, gradients) and returns (loss, list
    of gradients congruent to the parameters), or (loss, None) when gradients is False. Each epoch's
    loss is the mean loss over the whole dataset after that epoch's updates.

    Raise Divergence_error, with its epoch set, if a loss or gradient isn't finite.
    '''
    states = [
        optimizer.make_adam_state(len(vector), learning_rate=options.learning_rate)
        for vector in parameters
    ]
    initial_loss = dataset_loss(batch_step, data, 0, options.batch_size)
    epoch_losses = []
    logger.debug(f'{subject}: Initial loss {initial_loss:.6f}')

    try:
        check_loss(initial_loss)
    except optimizer.Divergence_error as error:
        error.epoch = 0
        raise

    for epoch in range(options.epochs):
        rng = augment.sample_stream(options.seed, augment.SHUFFLE_CHANNEL, epoch)

        try:
            for indices, batch in data.minibatches(options.batch_size, rng):
                loss, grads = batch_step(indices, batch, epoch, True)
                check_loss(loss)

                for state, vector, grad in zip(states, parameters, grads):
                    optimizer.adam_step(state, vector, grad)

            epoch_loss = dataset_loss(batch_step, data, epoch, options.batch_size)
            check_loss(epoch_loss)
        except optimizer.Divergence_error as error:
            error.epoch = epoch + 1
            raise

        epoch_losses.append(epoch_loss)
        logger.info(f'{subject}: Epoch {epoch + 1}/{options.epochs} loss {epoch_loss:.6f}')

    return Training_trace(initial_loss, epoch_losses)


def train_denoiser(
    data, noise_spec, options=Training_options(), widths=architectures.DENOISER_WIDTHS
):
    '''
    Given an Image_batch, a Noise_spec, and Training_options, train an autoencoder to map noisy
    images back to their clean versions under mean squared error. Return a tuple of (Network,
    Training_trace).
    '''
    network = nn_network.build_network(architectures.autoencoder_layers(widths), options.seed)
    clean = data.flat_images

    def batch_step(indices, batch, epoch, gradients):
        noisy = augment.add_training_noise(batch.images, noise_spec, epoch, indices)
        outputs, trace = nn_network.forward(network, noisy.reshape(len(indices), -1))
        loss, loss_grad = losses.mse_loss(outputs, clean[indices])

        if not gradients:
            return loss, None

        return loss, [nn_network.backward(network, trace, loss_grad)[0]]

    trace = fit('denoiser', [network.weights], batch_step, data, options)

    return network, trace


def denoise_dataset(denoiser, data, batch_size=DEFAULT_BATCH_SIZE):
    '''
    Return the flat, clamped denoiser outputs for every image in the given Image_batch, or the flat
    images themselves if there's no denoiser.
    '''
    flat = data.flat_images

    if denoiser is None:
        return flat

    return np.concatenate(
        [
            np.clip(nn_network.predict(denoiser, flat[start : start + batch_size]), 0, 1)
            for start in range(0, len(flat), batch_size)
        ]
    )


def internal_model_batch(inputs, clean, labels, noise_spec, seed, indices, epoch, image_shape):
    '''
    Return a tuple of (noisy brightness-jittered inputs, brightness-scaled clean images, labels) for
    one minibatch of internal model training. Noise is added first and brightness is tuned after.
    '''
    count = len(indices)
    noisy = augment.add_training_noise(
        inputs[indices].reshape((count,) + image_shape), noise_spec, epoch, indices
    )
    jittered, factors = augment.brightness_jitter(noisy, seed, epoch, indices)
    scaled_clean = clean[indices] * factors[:, np.newaxis].astype(clean.dtype)

    return jittered.reshape(count, -1), scaled_clean, labels[indices]


def train_internal_model(
    index,
    data,
    noise_spec,
    options=Training_options(),
    denoiser=None,
    widths=architectures.INTERNAL_MODEL_WIDTHS,
    denoised=None,
):
    '''
    Given a class index, a labeled Image_batch, a Noise_spec, Training_options, and an optional
    frozen denoiser, train an autoencoder to reconstruct images of that class and to output black
    for every other class. Inputs are the denoised images plus training noise, then brightness
    jitter. Return a tuple of (Network, Training_trace).

    Precomputed denoiser outputs can be passed as denoised to share them across classes.
    '''
    network = nn_network.build_network(
        architectures.autoencoder_layers(widths), options.seed + index
    )
    inputs = denoise_dataset(denoiser, data) if denoised is None else denoised
    clean = data.flat_images
    image_shape = data.images.shape[1:]

    def batch_step(indices, batch, epoch, gradients):
        noisy, scaled_clean, labels = internal_model_batch(
            inputs, clean, data.labels, noise_spec, options.seed, indices, epoch, image_shape
        )
        targets = scaled_clean * (labels == index)[:, np.newaxis].astype(clean.dtype)
        outputs, trace = nn_network.forward(network, noisy)
        loss, loss_grad = losses.mse_loss(outputs, targets)

        if not gradients:
            return loss, None

        return loss, [nn_network.backward(network, trace, loss_grad)[0]]

    trace = fit(f'internal model {index}', [network.weights], batch_step, data, options)

    return network, trace


def train_internal_models(
    data,
    noise_spec,
    options=Training_options(),
    denoiser=None,
    class_count=architectures.CLASS_COUNT,
    widths=architectures.INTERNAL_MODEL_WIDTHS,
    workers=1,
):
    '''
    Train one internal model per class, optionally in parallel. Return a tuple of
    (Internal_model_bank, list of Training_trace in class order).
    '''
    denoised = denoise_dataset(denoiser, data)
    results = dimmatic.execute.execute_in_pool(
        lambda index: train_internal_model(
            index, data, noise_spec, options, widths=widths, denoised=denoised
        ),
        range(class_count),
        workers,
        description='internal model',
    )

    return (
        autoencoder.Internal_model_bank([network for network, trace in results]),
        [trace for network, trace in results],
    )


def train_shared_bank(
    data,
    noise_spec,
    options=Training_options(),
    denoiser=None,
    class_count=architectures.CLASS_COUNT,
    widths=architectures.INTERNAL_MODEL_WIDTHS,
):
    '''
    Train a single encoder with one decoder per class, all jointly, on the same targets as the
    separate internal models. Return a tuple of (Shared_encoder_bank, Training_trace).
    '''
    bank = autoencoder.build_shared_encoder_bank(widths, class_count, options.seed)
    inputs = denoise_dataset(denoiser, data)
    clean = data.flat_images
    image_shape = data.images.shape[1:]

    def batch_step(indices, batch, epoch, gradients):
        noisy, scaled_clean, labels = internal_model_batch(
            inputs, clean, data.labels, noise_spec, options.seed, indices, epoch, image_shape
        )
        latents, encoder_trace = nn_network.forward(bank.encoder, noisy)
        total = 0.0
        decoder_grads = []
        latent_grad = np.zeros_like(latents)

        for index, decoder in enumerate(bank.decoders):
            targets = scaled_clean * (labels == index)[:, np.newaxis].astype(clean.dtype)
            outputs, trace = nn_network.forward(decoder, latents)
            loss, loss_grad = losses.mse_loss(outputs, targets)
            total += loss / class_count

            if gradients:
                param_grad, input_grad = nn_network.backward(
                    decoder, trace, loss_grad / class_count
                )
                decoder_grads.append(param_grad)
                latent_grad += input_grad

        if not gradients:
            return total, None

        encoder_grad = nn_network.backward(bank.encoder, encoder_trace, latent_grad)[0]

        return total, [encoder_grad] + decoder_grads

    trace = fit(
        'shared internal model',
        [network.weights for network in bank.networks],
        batch_step,
        data,
        options,
    )

    return bank, trace


def linf_pgd_batch(network, images, labels, epsilon, steps, step_size, rng):
    '''
    Given a classifier Network, a batch of images and labels, and L-infinity PGD settings, return
    adversarial images from a random start within the epsilon ball. With zero steps, return the
    images unchanged.
    '''
    if steps <= 0:
        return images

    adversarial = np.clip(
        images + rng.uniform(-epsilon, epsilon, size=images.shape).astype(images.dtype), 0, 1
    )

    for step in range(steps):
        logits, trace = nn_network.forward(network, adversarial)
        loss, loss_grad = losses.cross_entropy_loss(logits, labels)
        input_grad = nn_network.backward(network, trace, loss_grad, parameter_gradients=False)[1]
        adversarial = adversarial + step_size * np.sign(input_grad).astype(images.dtype)
        adversarial = np.clip(
            np.clip(adversarial, images - epsilon, images + epsilon), 0, 1
        ).astype(images.dtype)

    return adversarial


def train_classifier_network(
    kind,
    layers,
    data,
    options=Training_options(),
    binarize_input=False,
    adversarial_steps=0,
    adversarial_epsilon=MADRY_EPSILON,
    adversarial_step_size=MADRY_STEP_SIZE,
):
    '''
    Train a logits Network with cross-entropy, optionally on binarized inputs and optionally on
    L-infinity PGD adversarial examples of each batch. Return a tuple of (Network, Training_trace).
    '''
    network = nn_network.build_network(layers, options.seed)

    def batch_step(indices, batch, epoch, gradients):
        inputs = augment.binarize(batch.images) if binarize_input else batch.images

        if gradients and adversarial_steps:
            rng = augment.sample_stream(
                options.seed, MADRY_START_CHANNEL, epoch, int(indices[0]), len(indices)
            )
            inputs = linf_pgd_batch(
                network,
                inputs,
                batch.labels,
                adversarial_epsilon,
                adversarial_steps,
                adversarial_step_size,
                rng,
            )

        logits, trace = nn_network.forward(network, inputs)
        loss, loss_grad = losses.cross_entropy_loss(logits, batch.labels)

        if not gradients:
            return loss, None

        return loss, [nn_network.backward(network, trace, loss_grad)[0]]

    trace = fit(kind, [network.weights], batch_step, data, options)

    return network, trace


def train_baseline(kind, data, options=Training_options(), adversarial_steps=MADRY_STEPS):
    '''
    Given a baseline kind ("cnn", "bicnn", or "madry"), an Image_batch, and Training_options, train
    and return a tuple of (Network_classifier, Training_trace).

    Raise ValueError for an unknown kind.
    '''
    if kind in ('cnn', 'bicnn'):
        network, trace = train_classifier_network(
            kind, architectures.cnn_layers(), data, options, binarize_input=(kind == 'bicnn')
        )
    elif kind == 'madry':
        network, trace = train_classifier_network(
            kind,
            architectures.madry_layers(),
            data,
            options,
            adversarial_steps=adversarial_steps,
        )
    else:
        raise ValueError(f'Unknown baseline kind: {kind}')

    return baseline.Network_classifier(network, binarize_input=(kind == 'bicnn'), name=kind), trace


MODEL_KINDS = ('dim', 'bidim', 'cnn', 'bicnn', 'madry', 'single_im', 'dn_single_im', 'im_only')
BASELINE_KINDS = ('cnn', 'bicnn', 'madry')
DENOISED_KINDS = ('dim', 'bidim', 'dn_single_im')
SHARED_ENCODER_KINDS = ('single_im', 'dn_single_im')

Trained_model = collections.namedtuple('Trained_model', ('classifier', 'traces'))


def train_model(kind, data, noise_spec, options=Training_options(), workers=1, **kwargs):
    '''
    Given a model kind, an Image_batch, a Noise_spec, Training_options, and a worker count for the
    internal models, train everything the kind needs. Return a Trained_model with the assembled
    classifier and a dict from network name to Training_trace.

    Raise ValueError for an unknown kind.
    '''
    if kind not in MODEL_KINDS:
        raise ValueError(f'Unknown model kind: {kind}')

    if kind in BASELINE_KINDS:
        model, trace = train_baseline(kind, data, options, **kwargs)
        return Trained_model(model, {'network': trace})

    traces = {}
    denoiser = None

    if kind in DENOISED_KINDS:
        denoiser, traces['denoiser'] = train_denoiser(data, noise_spec, options)

    if kind in SHARED_ENCODER_KINDS:
        bank, traces['shared'] = train_shared_bank(data, noise_spec, options, denoiser)
    else:
        bank, bank_traces = train_internal_models(
            data, noise_spec, options, denoiser, workers=workers
        )
        traces.update(
            (f'internal_model_{index}', trace) for index, trace in enumerate(bank_traces)
        )

    binarize = kind == 'bidim'

    return Trained_model(
        dim.Dim_classifier(
            bank, denoiser, binarize_input=binarize, binarize_denoised=binarize, name=kind
        ),
        traces,
    )

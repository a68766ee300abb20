import logging
import os

import dimmatic.config.render
from dimmatic.models import architectures, autoencoder, baseline, dim
from dimmatic.nn import checkpoint

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = 'manifest.yaml'
CHECKPOINT_EXTENSION = '.dimc'
BUNDLE_FORMAT_VERSION = 1

# Kinds that share trained weights and differ only in inference-time binarization.
SHARED_WEIGHT_KINDS = {'dim': 'bidim', 'bidim': 'dim'}


class Bundle_error(ValueError):
    '''
    Raised when a model bundle's manifest is missing pieces or doesn't fit the requested model kind.
    '''


def model_networks(model):
    '''
    Given a classifier, return a dict from network name to Network covering everything needed to
    rebuild it.
    '''
    if isinstance(model, baseline.Network_classifier):
        return {'network': model.network}

    networks = {}

    if model.denoiser is not None:
        networks['denoiser'] = model.denoiser

    if isinstance(model.bank, autoencoder.Shared_encoder_bank):
        networks['encoder'] = model.bank.encoder
        networks.update(
            (f'decoder_{index}', decoder) for index, decoder in enumerate(model.bank.decoders)
        )
    else:
        networks.update(
            (f'internal_model_{index}', network)
            for index, network in enumerate(model.bank.networks)
        )

    return networks


def save_bundle(model, directory, extra=None):
    '''
    Given a classifier, a target directory, and optional extra manifest fields, write one checkpoint
    per network plus a manifest naming them and the model's binarization flags. Return the list of
    written checkpoint paths.
    '''
    os.makedirs(directory, exist_ok=True)
    networks = model_networks(model)
    paths = []

    for name, network in networks.items():
        path = os.path.join(directory, name + CHECKPOINT_EXTENSION)
        checkpoint.write_checkpoint(network, path)
        paths.append(path)

    manifest = {
        'format_version': BUNDLE_FORMAT_VERSION,
        'kind': model.name,
        'binarize_input': getattr(model, 'input_binarizer', None) is not None,
        'binarize_denoised': getattr(model, 'denoised_binarizer', None) is not None,
        'networks': {name: name + CHECKPOINT_EXTENSION for name in networks},
    }
    manifest.update(extra or {})
    dimmatic.config.render.write_yaml(os.path.join(directory, MANIFEST_FILENAME), manifest)
    logger.info(f'{model.name}: Saved {len(networks)} checkpoints to {directory}')

    return paths


def read_bundle_manifest(directory):
    path = os.path.join(directory, MANIFEST_FILENAME)

    if not os.path.exists(path):
        raise Bundle_error(f'{directory}: No {MANIFEST_FILENAME} found')

    manifest = dimmatic.config.render.read_yaml(path)

    if manifest.get('format_version') != BUNDLE_FORMAT_VERSION:
        raise Bundle_error(
            f'{directory}: Unsupported bundle format version {manifest.get("format_version")}'
        )

    return manifest


def check_image_input(network, name, directory):
    if network.input_shape not in ((architectures.PIXEL_COUNT,), architectures.IMAGE_SHAPE):
        raise Bundle_error(
            f'{directory}: Network {name} expects inputs shaped {network.input_shape}, not images'
        )


def load_model(directory, kind=None):
    '''
    Given a bundle directory and an optional requested model kind, load the checkpoints named by the
    bundle's manifest and assemble the classifier. A "bidim" request on a "dim" bundle (or the
    reverse) loads the same weights with the binarization flags switched.

    Raise Bundle_error if the manifest is missing, doesn't fit the requested kind, or names
    networks that don't chain. Raise Checkpoint_error if a checkpoint is corrupt.
    '''
    manifest = read_bundle_manifest(directory)
    stored_kind = manifest['kind']
    kind = kind or stored_kind

    if kind != stored_kind and SHARED_WEIGHT_KINDS.get(stored_kind) != kind:
        raise Bundle_error(f'{directory}: Bundle holds a {stored_kind} model, not {kind}')

    networks = {
        name: checkpoint.read_checkpoint(os.path.join(directory, filename))
        for name, filename in manifest['networks'].items()
    }
    binarize = (kind == 'bidim') if kind != stored_kind else None

    if 'network' in networks:
        check_image_input(networks['network'], 'network', directory)
        return baseline.Network_classifier(
            networks['network'],
            binarize_input=manifest['binarize_input'] if binarize is None else binarize,
            name=kind,
        )

    denoiser = networks.get('denoiser')
    bank_input = (architectures.PIXEL_COUNT,)

    if denoiser is not None:
        check_image_input(denoiser, 'denoiser', directory)
        bank_input = denoiser.output_shape

    if 'encoder' in networks:
        decoders = [
            networks[f'decoder_{index}']
            for index in range(count_prefixed(networks, 'decoder_'))
        ]
        bank = autoencoder.Shared_encoder_bank(networks['encoder'], decoders)
        first_networks = [networks['encoder']]
    else:
        bank = autoencoder.Internal_model_bank(
            [
                networks[f'internal_model_{index}']
                for index in range(count_prefixed(networks, 'internal_model_'))
            ]
        )
        first_networks = bank.networks

    for network in first_networks:
        if network.input_shape != bank_input:
            raise Bundle_error(
                f'{directory}: Internal models expect inputs shaped {network.input_shape} but receive {bank_input}'
            )

    return dim.Dim_classifier(
        bank,
        denoiser,
        binarize_input=manifest['binarize_input'] if binarize is None else binarize,
        binarize_denoised=manifest['binarize_denoised'] if binarize is None else binarize,
        name=kind,
    )


def count_prefixed(networks, prefix):
    '''
    Return how many consecutively numbered networks with the given name prefix exist, starting at 0.

    Raise Bundle_error if there are none.
    '''
    count = 0

    while f'{prefix}{count}' in networks:
        count += 1

    if not count:
        raise Bundle_error(f'Bundle has no {prefix}0 network')

    return count

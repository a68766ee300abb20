import hashlib
import logging
import os

import pandas

try:
    import importlib_metadata
except ModuleNotFoundError:  # pragma: nocover
    import importlib.metadata as importlib_metadata

import dimmatic.config.render

logger = logging.getLogger(__name__)

RUN_MANIFEST_FILENAME = 'run.yaml'
LOSSES_FILENAME = 'losses.csv'


def dimmatic_version():
    try:
        return importlib_metadata.version('dimmatic')
    except importlib_metadata.PackageNotFoundError:
        return 'unknown'


def blob_hash(path):
    '''
    Return the hex SHA-1 of the given file hashed the way git hashes a blob, so that it matches
    "git hash-object" on the same file.
    '''
    with open(path, 'rb') as content_file:
        data = content_file.read()

    return hashlib.sha1(b'blob %d\0' % len(data) + data).hexdigest()


def content_hashes(directory, paths):
    '''
    Given a directory and the paths of files within it, return a tuple of (dict from relative path
    to blob hash, combined hash of all of them). The combined hash covers the sorted relative paths
    and their blob hashes, so it changes when any file is renamed or altered.
    '''
    hashes = {os.path.relpath(path, directory): blob_hash(path) for path in sorted(paths)}
    combined = hashlib.sha1(
        ''.join(f'{name} {digest}\n' for name, digest in sorted(hashes.items())).encode('utf-8')
    ).hexdigest()

    return hashes, combined


def write_run_manifest(directory, action, config, content_paths=(), extra=None):
    '''
    Given a run directory, the action name, the effective configuration, the paths of the files the
    run produced, and optional extra fields, write the run manifest: dimmatic's version, the seed,
    the configuration echo, and the content hashes of the produced files. Return the manifest path.
    '''
    hashes, combined = content_hashes(directory, content_paths)
    manifest = {
        'dimmatic_version': dimmatic_version(),
        'action': action,
        'seed': config['seed'],
        'config': config,
        'content': hashes,
        'content_hash': combined,
    }
    manifest.update(extra or {})
    path = os.path.join(directory, RUN_MANIFEST_FILENAME)
    dimmatic.config.render.write_yaml(path, manifest)
    logger.debug(f'{action}: Wrote run manifest {path} with content hash {combined}')

    return path


def loss_frame(traces):
    '''
    Given a dict from network name to Training_trace, return a pandas.DataFrame with the columns
    network, epoch and loss. Epoch 0 holds the loss before training.
    '''
    rows = []

    for name, trace in traces.items():
        rows.append({'network': name, 'epoch': 0, 'loss': trace.initial_loss})
        rows.extend(
            {'network': name, 'epoch': epoch, 'loss': loss}
            for epoch, loss in enumerate(trace.epoch_losses, start=1)
        )

    return pandas.DataFrame(rows, columns=['network', 'epoch', 'loss'])


def write_losses(directory, traces):
    path = os.path.join(directory, LOSSES_FILENAME)
    loss_frame(traces).to_csv(path, index=False)

    return path

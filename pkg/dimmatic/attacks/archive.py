import collections
import logging
import os

import numpy as np

import dimmatic.config.render
from dimmatic.attacks import common

logger = logging.getLogger(__name__)

ARCHIVE_FORMAT_VERSION = 1
MANIFEST_FILENAME = 'manifest.yaml'
RECORDS_FILENAME = 'records.bin'
CLEAN_FILENAME = 'clean.yaml'

Archive = collections.namedtuple(
    'Archive', ('manifest', 'indices', 'success', 'images', 'distances')
)
Clean_predictions = collections.namedtuple(
    'Clean_predictions', ('indices', 'labels', 'predictions')
)


class Archive_error(ValueError):
    '''
    Raised when an adversarial archive is missing, malformed, or disagrees with its manifest.
    '''


def record_dtype(pixel_count):
    '''
    Return the little-endian record layout: u32 sample index, u32 success flag, the adversarial
    image as f32 pixels, and its L0, L1, L2 and Linf distances as f64.
    '''
    return np.dtype(
        [
            ('index', '<u4'),
            ('success', '<u4'),
            ('image', '<f4', (pixel_count,)),
            ('distances', '<f8', (len(common.NORMS),)),
        ]
    )


def config_echo(config):
    return {
        name: (dict(value) if isinstance(value, dict) else value)
        for name, value in config._asdict().items()
    }


def write_archive(directory, model_name, attack_name, config, indices, results, image_shape):
    '''
    Given a directory, the model and attack names, the Attack_config, the dataset indices of the
    attacked samples, their Attack_results, and the image shape, write the archive's manifest and
    records. Failed samples get zero pixels and infinite distances. Return the directory.
    '''
    pixel_count = int(np.prod(image_shape))
    records = np.zeros(len(results), dtype=record_dtype(pixel_count))

    records['index'] = list(indices)
    records['success'] = [int(result.success) for result in results]

    for position, result in enumerate(results):
        records['distances'][position] = result.distances

        if result.success:
            records['image'][position] = np.asarray(
                result.adversarial, dtype=np.float32
            ).reshape(-1)

    os.makedirs(directory, exist_ok=True)

    with open(os.path.join(directory, RECORDS_FILENAME), 'wb') as records_file:
        records_file.write(records.tobytes())

    dimmatic.config.render.write_yaml(
        os.path.join(directory, MANIFEST_FILENAME),
        {
            'format_version': ARCHIVE_FORMAT_VERSION,
            'model': model_name,
            'attack': attack_name,
            'norm': config.norm,
            'epsilon': config.epsilon,
            'image_shape': list(image_shape),
            'sample_count': len(results),
            'config': config_echo(config),
        },
    )
    logger.debug(f'{model_name}: Wrote {len(results)} {attack_name} records to {directory}')

    return directory


def read_archive(directory):
    '''
    Given an archive directory, return its Archive with images shaped (N,) + image shape.

    Raise Archive_error if the manifest is missing or unsupported, names an unknown norm, or
    disagrees with the size of the records file.
    '''
    manifest_path = os.path.join(directory, MANIFEST_FILENAME)

    if not os.path.exists(manifest_path):
        raise Archive_error(f'{directory}: No {MANIFEST_FILENAME} found')

    manifest = dimmatic.config.render.read_yaml(manifest_path)

    if manifest.get('format_version') != ARCHIVE_FORMAT_VERSION:
        raise Archive_error(
            f'{directory}: Unsupported archive format version {manifest.get("format_version")}'
        )

    if manifest.get('norm') not in common.NORMS:
        raise Archive_error(f'{directory}: Unknown norm {manifest.get("norm")}')

    image_shape = tuple(manifest['image_shape'])
    dtype = record_dtype(int(np.prod(image_shape)))

    with open(os.path.join(directory, RECORDS_FILENAME), 'rb') as records_file:
        data = records_file.read()

    if len(data) != dtype.itemsize * manifest['sample_count']:
        raise Archive_error(
            f'{directory}: Expected {manifest["sample_count"]} records of {dtype.itemsize} bytes, found {len(data)} bytes'
        )

    records = np.frombuffer(data, dtype=dtype)

    return Archive(
        manifest,
        records['index'].astype(np.int64),
        records['success'].astype(bool),
        records['image'].reshape((len(records),) + image_shape),
        records['distances'].copy(),
    )


def revalidate_archive(archive, model, images, labels, tolerance=common.BUDGET_TOLERANCE):
    '''
    Given an Archive, the model it attacked, and the original images and labels in archive order,
    re-feed every successful adversarial image to the model and recompute its distances. Return a
    tuple of (count of successes the model doesn't confirm, count of records whose distances
    disagree).
    '''
    successes = np.flatnonzero(archive.success)

    if not len(successes):
        return 0, 0

    predictions = model.predict(archive.images[successes])
    false_successes = int(np.sum(predictions == np.asarray(labels)[successes]))
    distance_mismatches = sum(
        not np.allclose(
            common.perturbation_norms(images[position], archive.images[position]),
            archive.distances[position],
            rtol=0,
            atol=tolerance,
        )
        for position in successes
    )

    return false_successes, distance_mismatches


def write_clean_predictions(directory, indices, labels, predictions):
    dimmatic.config.render.write_yaml(
        os.path.join(directory, CLEAN_FILENAME),
        {
            'indices': [int(index) for index in indices],
            'labels': [int(label) for label in labels],
            'predictions': [int(prediction) for prediction in predictions],
        },
    )


def read_clean_predictions(directory):
    '''
    Return the Clean_predictions stored in a model's attack directory.

    Raise Archive_error if there are none or their lengths differ.
    '''
    path = os.path.join(directory, CLEAN_FILENAME)

    if not os.path.exists(path):
        raise Archive_error(f'{directory}: No {CLEAN_FILENAME} found')

    data = dimmatic.config.render.read_yaml(path)
    clean = Clean_predictions(
        *(np.asarray(data[field], dtype=np.int64) for field in Clean_predictions._fields)
    )

    if not len(clean.indices) == len(clean.labels) == len(clean.predictions):
        raise Archive_error(f'{directory}: Clean prediction lists differ in length')

    return clean


def find_archives(directory):
    '''
    Given a model's attack directory, return the paths of the archive subdirectories in it, sorted.
    '''
    return sorted(
        os.path.join(directory, name)
        for name in os.listdir(directory)
        if os.path.exists(os.path.join(directory, name, MANIFEST_FILENAME))
    )

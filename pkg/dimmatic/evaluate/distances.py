import collections
import logging
import os

import numpy as np

from dimmatic.attacks import archive as attack_archive
from dimmatic.attacks import common

logger = logging.getLogger(__name__)

Distance_table = collections.namedtuple(
    'Distance_table', ('model', 'attacks', 'norms', 'distances', 'indices', 'clean_correct')
)


def make_distance_table(model, attacks, norms, distances, clean_correct, indices=None):
    '''
    Given a model name, attack names with their norms, distances shaped (attacks, samples), and a
    mask of the samples the model classifies correctly without attack, return a Distance_table.
    Samples the model misclassifies get distance 0 under every attack.

    Raise ValueError if the shapes disagree, an attack repeats, a norm is unknown, or a distance is
    negative or NaN.
    '''
    attacks = tuple(attacks)
    norms = tuple(norms)
    distances = np.array(distances, dtype=np.float64).reshape(len(attacks), -1)
    clean_correct = np.asarray(clean_correct, dtype=bool)
    sample_count = len(clean_correct)
    indices = np.arange(sample_count) if indices is None else np.asarray(indices, dtype=np.int64)

    if len(norms) != len(attacks):
        raise ValueError(f'{model}: Got {len(norms)} norms for {len(attacks)} attacks')

    if len(set(attacks)) != len(attacks):
        raise ValueError(f'{model}: Attack names must be unique')

    unknown = sorted(set(norms) - set(common.NORMS))

    if unknown:
        raise ValueError(f'{model}: Unknown norms {", ".join(unknown)}')

    if distances.shape[1] != sample_count or len(indices) != sample_count:
        raise ValueError(
            f'{model}: Distances cover {distances.shape[1]} samples, clean predictions {sample_count}'
        )

    if np.any(np.isnan(distances)) or np.any(distances < 0):
        raise ValueError(f'{model}: Distances must be non-negative numbers')

    distances[:, ~clean_correct] = 0

    return Distance_table(model, attacks, norms, distances, indices, clean_correct)


def archive_distances(archive, clean_indices):
    '''
    Given an Archive and the dataset indices of the clean predictions, return the archive's
    distances in its own norm, ordered like the clean predictions.

    Raise ValueError if the archive doesn't cover exactly those samples.
    '''
    attack = archive.manifest['attack']

    if sorted(archive.indices.tolist()) != sorted(np.asarray(clean_indices).tolist()):
        raise ValueError(f'{attack}: Archive samples differ from the clean prediction samples')

    position = {int(index): offset for offset, index in enumerate(archive.indices)}
    norm_index = common.NORM_INDEX[archive.manifest['norm']]

    return np.array(
        [archive.distances[position[int(index)], norm_index] for index in clean_indices]
    )


def build_distance_table(model, clean, archives):
    '''
    Given a model name, its Clean_predictions, and its Archives, return the model's
    Distance_table. A failed attack has infinite distance.
    '''
    return make_distance_table(
        model,
        [archive.manifest['attack'] for archive in archives],
        [archive.manifest['norm'] for archive in archives],
        [archive_distances(archive, clean.indices) for archive in archives],
        clean.labels == clean.predictions,
        clean.indices,
    )


def load_distance_table(directory, model=None):
    '''
    Given a model's attack directory holding its clean predictions and one archive per attack,
    return its Distance_table. The model name defaults to the directory's name.

    Raise Archive_error if the directory has no archives.
    '''
    model = model or os.path.basename(os.path.normpath(directory))
    paths = attack_archive.find_archives(directory)

    if not paths:
        raise attack_archive.Archive_error(f'{directory}: No adversarial archives found')

    archives = [attack_archive.read_archive(path) for path in paths]
    logger.debug(f'{model}: Loaded {len(archives)} archives from {directory}')

    return build_distance_table(
        model, attack_archive.read_clean_predictions(directory), archives
    )

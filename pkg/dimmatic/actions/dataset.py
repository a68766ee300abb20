import logging

import numpy as np

import dimmatic.config.validate
from dimmatic.data import idx

logger = logging.getLogger(__name__)


def load_split(config, split):
    '''
    Given a parsed configuration and a split name ("train" or "test"), load that split's IDX files
    and return an Image_batch.

    Raise Idx_error if a file is malformed, or FileNotFoundError if it's gone.
    '''
    images_path = dimmatic.config.validate.dataset_path(config, f'{split}_images')
    labels_path = dimmatic.config.validate.dataset_path(config, f'{split}_labels')
    data = idx.load_idx(images_path, labels_path)
    logger.info(f'{split}: Loaded {len(data)} images from {images_path}')

    return data


def evaluation_indices(count, sample_count, seed):
    '''
    Given a dataset size, a subset size, and a seed, return the dataset indices of the first
    sample_count images under the seed's shuffle, in ascending order. A subset size above the
    dataset size takes the whole dataset.
    '''
    shuffled = np.random.default_rng(seed).permutation(count)

    return np.sort(shuffled[:sample_count])

import gzip
import logging
import struct

import numpy as np

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 2051
LABELS_MAGIC = 2049
CLASS_COUNT = 10


class Idx_error(ValueError):
    '''
    Raised when an IDX file has the wrong magic, inconsistent dimensions, or a truncated payload.
    '''


class Image_batch:
    '''
    A batch of single-channel images shaped (N, 1, H, W) with pixels in [0, 1], plus N integer labels
    in [0, 9].
    '''

    def __init__(self, images, labels):
        images = np.asarray(images, dtype=np.float32)
        labels = np.asarray(labels, dtype=np.int64)

        if images.ndim != 4 or images.shape[1] != 1:
            raise ValueError(f'Images must be shaped (N, 1, H, W), got {images.shape}')

        if len(images) < 1:
            raise ValueError('An image batch needs at least one image')

        if labels.shape != (len(images),):
            raise ValueError(f'Expected {len(images)} labels, got shape {labels.shape}')

        if np.any(images < 0) or np.any(images > 1):
            raise ValueError('Image pixels must lie in [0, 1]')

        if np.any(labels < 0) or np.any(labels >= CLASS_COUNT):
            raise ValueError(f'Labels must lie in [0, {CLASS_COUNT - 1}]')

        self.images = images
        self.labels = labels

    def __len__(self):
        return len(self.labels)

    @property
    def flat_images(self):
        return self.images.reshape(len(self.images), -1)

    def subset(self, indices):
        return Image_batch(self.images[indices], self.labels[indices])

    def of_class(self, label):
        return self.subset(np.flatnonzero(self.labels == label))

    def minibatches(self, batch_size, rng=None):
        '''
        Yield (indices, Image_batch) tuples covering this batch in chunks of at most batch_size,
        shuffled with the given numpy Generator if one is provided.
        '''
        order = np.arange(len(self)) if rng is None else rng.permutation(len(self))

        for start in range(0, len(self), batch_size):
            indices = order[start : start + batch_size]
            yield indices, self.subset(indices)


def open_maybe_gzipped(path):
    if str(path).endswith('.gz'):
        return gzip.open(path, 'rb')

    return open(path, 'rb')


def read_header(data, layout, path):
    size = struct.calcsize(layout)

    if len(data) < size:
        raise Idx_error(f'{path}: File is truncated in its header')

    return struct.unpack_from(layout, data)


def parse_images(data, path='images'):
    '''
    Given the bytes of an IDX image file, return a uint8 array shaped (N, 1, rows, columns).

    Raise Idx_error if the magic isn't 2051 or the payload is truncated.
    '''
    (magic,) = read_header(data, '>I', path)
    if magic != IMAGES_MAGIC:
        raise Idx_error(f'{path}: Expected image magic {IMAGES_MAGIC}, found {magic}')

    magic, count, rows, columns = read_header(data, '>IIII', path)
    expected_size = 16 + count * rows * columns

    if len(data) < expected_size:
        raise Idx_error(
            f'{path}: File is truncated, expected {expected_size} bytes but found {len(data)}'
        )

    pixels = np.frombuffer(data, dtype=np.uint8, count=count * rows * columns, offset=16)

    return pixels.reshape(count, 1, rows, columns)


def parse_labels(data, path='labels'):
    '''
    Given the bytes of an IDX label file, return a uint8 array of labels.

    Raise Idx_error if the magic isn't 2049 or the payload is truncated.
    '''
    (magic,) = read_header(data, '>I', path)
    if magic != LABELS_MAGIC:
        raise Idx_error(f'{path}: Expected label magic {LABELS_MAGIC}, found {magic}')

    magic, count = read_header(data, '>II', path)

    if len(data) < 8 + count:
        raise Idx_error(
            f'{path}: File is truncated, expected {8 + count} bytes but found {len(data)}'
        )

    return np.frombuffer(data, dtype=np.uint8, count=count, offset=8)


def load_idx(images_path, labels_path):
    '''
    Given paths to an IDX image file and an IDX label file (optionally gzipped), return an
    Image_batch with pixels scaled from bytes into [0, 1].

    Raise Idx_error if either file is malformed or their counts differ.
    '''
    with open_maybe_gzipped(images_path) as images_file:
        pixels = parse_images(images_file.read(), images_path)

    with open_maybe_gzipped(labels_path) as labels_file:
        labels = parse_labels(labels_file.read(), labels_path)

    if len(pixels) != len(labels):
        raise Idx_error(
            f'{images_path} holds {len(pixels)} images but {labels_path} holds {len(labels)} labels'
        )

    logger.debug(f'{images_path}: Loaded {len(pixels)} images')

    return Image_batch(pixels.astype(np.float32) / 255, labels)

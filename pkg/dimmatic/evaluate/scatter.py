import logging
import os

import matplotlib
import matplotlib.figure
import numpy as np
import pandas

logger = logging.getLogger(__name__)

SIZE_IN_POINTS = 800
POINTS_PER_INCH = 72
COLOR_MAP = 'tab10'
MARKER_SIZE = 6
SVG_HASH_SALT = 'dimmatic'


def class_colors(labels):
    '''
    Given class labels, return a dict from each distinct label, in sorted order, to its color.
    '''
    colors = matplotlib.colormaps[COLOR_MAP].colors
    distinct = sorted(set(np.asarray(labels).tolist()))

    return {label: colors[int(label) % len(colors)] for label in distinct}


def render_scatter(embedding, title=None):
    '''
    Given a Latent_embedding, return a matplotlib Figure plotting its points with one color per
    class and a legend of the classes.
    '''
    size = SIZE_IN_POINTS / POINTS_PER_INCH
    figure = matplotlib.figure.Figure(figsize=(size, size), dpi=POINTS_PER_INCH)
    axes = figure.subplots()

    for label, color in class_colors(embedding.labels).items():
        mask = embedding.labels == label
        axes.scatter(
            embedding.points[mask, 0],
            embedding.points[mask, 1],
            s=MARKER_SIZE,
            color=color,
            label=str(label),
        )

    axes.legend(title='Digit', loc='upper right', markerscale=2)
    axes.set_xticks([])
    axes.set_yticks([])

    if title:
        axes.set_title(title)

    return figure


def write_scatter(embedding, svg_path, csv_path, title=None):
    '''
    Write a Latent_embedding as an SVG scatter plot and as a CSV with the columns x, y and label,
    creating containing directories as needed. Return a tuple of the two paths.
    '''
    for path in (svg_path, csv_path):
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)

    # Fixed element ids and no date keep reruns byte-identical.
    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT}):
        render_scatter(embedding, title).savefig(svg_path, format='svg', metadata={'Date': None})

    pandas.DataFrame(
        {'x': embedding.points[:, 0], 'y': embedding.points[:, 1], 'label': embedding.labels}
    ).to_csv(csv_path, index=False)
    logger.debug(f'Model {embedding.model_index}: Wrote scatter to {svg_path} and {csv_path}')

    return svg_path, csv_path

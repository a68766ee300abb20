import logging
import os

import numpy as np
import pandas

from dimmatic.actions import dataset, manifest, paths
from dimmatic.evaluate import latent, scatter, tsne
from dimmatic.models import bundle, dim

logger = logging.getLogger(__name__)

SILHOUETTES_FILENAME = 'silhouettes.csv'


def embedding_filenames(directory, model_index):
    return (
        os.path.join(directory, f'model_{model_index}.svg'),
        os.path.join(directory, f'model_{model_index}.csv'),
    )


def run_tsne(config, tsne_arguments, global_arguments):
    '''
    Run the "tsne" action: for every internal model of the requested DIM-style model, embed the
    latents of the evaluation images in two dimensions, write a scatter SVG and its points as CSV,
    and record the silhouette of the model's own class against all others. Return the silhouettes
    as a pandas.DataFrame.

    Raise ValueError if the model has no internal models, or Tsne_error if there are too few
    images for the perplexity.
    '''
    kind = tsne_arguments.model or config['models']['kind']
    perplexity = tsne_arguments.perplexity or config['tsne']['perplexity']
    sample_count = tsne_arguments.sample_count or config['tsne']['sample_count']
    seed = config['seed']

    model = bundle.load_model(paths.model_directory(config, kind), kind)

    if not isinstance(model, dim.Dim_classifier):
        raise ValueError(f'{kind}: Model has no internal models to embed')

    test = dataset.load_split(config, 'test')
    subset = test.subset(dataset.evaluation_indices(len(test), sample_count, seed))

    if len(subset) < 3 * perplexity:
        raise tsne.Tsne_error(
            f'{kind}: Perplexity {perplexity} needs at least {int(np.ceil(3 * perplexity))} images, got {len(subset)}'
        )

    directory = paths.tsne_directory(config, kind)
    os.makedirs(directory, exist_ok=True)
    rows = []
    written = []

    for model_index in range(model.class_count):
        embedding = tsne.tsne_embed(
            latent.extract_latents(model, subset.images, model_index),
            subset.labels,
            perplexity=perplexity,
            iterations=config['tsne']['iterations'],
            seed=seed,
            model_index=model_index,
        )
        svg_path, csv_path = embedding_filenames(directory, model_index)
        scatter.write_scatter(
            embedding, svg_path, csv_path, title=f'{kind} internal model {model_index}'
        )
        silhouette = tsne.class_silhouette(embedding, model_index)
        logger.info(
            f'{kind}: Internal model {model_index} silhouette {silhouette:.3f}, KL divergence {embedding.initial_kl:.3f} to {embedding.final_kl:.3f}'
        )
        rows.append(
            {
                'model_index': model_index,
                'silhouette': silhouette,
                'initial_kl': embedding.initial_kl,
                'final_kl': embedding.final_kl,
            }
        )
        written.extend((svg_path, csv_path))

    silhouettes = pandas.DataFrame(rows)
    silhouettes_path = os.path.join(directory, SILHOUETTES_FILENAME)
    silhouettes.to_csv(silhouettes_path, index=False)
    manifest.write_run_manifest(
        directory,
        'tsne',
        config,
        written + [silhouettes_path],
        extra={'model': kind, 'perplexity': perplexity, 'sample_count': len(subset)},
    )
    logger.answer(
        f'{kind}: Embedded {model.class_count} internal models, lowest silhouette {silhouettes["silhouette"].min():.3f}'
    )

    return silhouettes

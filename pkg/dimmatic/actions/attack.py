import logging
import os

import numpy as np

from dimmatic.actions import dataset, manifest, paths
from dimmatic.attacks import archive as attack_archive
from dimmatic.attacks import registry
from dimmatic.models import bundle

logger = logging.getLogger(__name__)

PREDICTION_BATCH_SIZE = 500


def predict_in_batches(model, images):
    return np.concatenate(
        [
            model.predict(images[start : start + PREDICTION_BATCH_SIZE])
            for start in range(0, len(images), PREDICTION_BATCH_SIZE)
        ]
    )


def revalidate(kind, attack_name, path, model, subset):
    '''
    Re-read the archive at the given path, re-feed its adversarial images to the model, and warn
    about any success the model doesn't confirm or any stored distance that doesn't match. Return
    the count of false successes.
    '''
    false_successes, distance_mismatches = attack_archive.revalidate_archive(
        attack_archive.read_archive(path), model, subset.images, subset.labels
    )

    if false_successes:
        logger.warning(
            f'{kind}: {attack_name} archive holds {false_successes} adversarial images the model classifies correctly'
        )

    if distance_mismatches:
        logger.warning(
            f'{kind}: {attack_name} archive holds {distance_mismatches} records with stale distances'
        )

    return false_successes


def run_attack(config, attack_arguments, global_arguments):
    '''
    Run the "attack" action: load the requested model's bundle, take the evaluation subset of the
    test split, record the model's clean predictions on it, and run each selected attack over it,
    writing one adversarial archive per attack. Attacks computed externally are skipped with a note
    about where to import their archives. Return the model's attack directory.

    Raise Bundle_error or Checkpoint_error if the model can't be loaded.
    '''
    kind = attack_arguments.model or config['models']['kind']
    attack_names = registry.resolve_attack_names(
        attack_arguments.attacks or config['attacks']['selection']
    )
    sample_count = attack_arguments.sample_count or config['attacks']['sample_count']
    seed = config['seed']

    model = bundle.load_model(paths.model_directory(config, kind), kind)
    test = dataset.load_split(config, 'test')
    indices = dataset.evaluation_indices(len(test), sample_count, seed)
    subset = test.subset(indices)
    directory = paths.attack_directory(config, kind)

    predictions = predict_in_batches(model, subset.images)
    attack_archive.write_clean_predictions(directory, indices, subset.labels, predictions)
    logger.info(
        f'{kind}: Clean accuracy {100.0 * np.mean(predictions == subset.labels):.1f}% on {len(subset)} evaluation samples'
    )

    archive_paths = []

    for attack_name in attack_names:
        attack = registry.get_entry(attack_name)

        if attack.function is None:
            logger.warning(
                f'{kind}: {attack_name} is computed externally; import its archive into {directory} to report on it'
            )
            continue

        attack_config = registry.build_attack_config(
            attack, config['thresholds'], seed, config['attacks']['options'].get(attack_name)
        )
        logger.info(f'{kind}: Running {attack_name} on {len(subset)} samples')
        results = registry.attack_samples(
            attack,
            model,
            subset.images,
            subset.labels,
            indices,
            attack_config,
            workers=config['attacks']['workers'],
        )
        path = attack_archive.write_archive(
            os.path.join(directory, attack_name),
            kind,
            attack_name,
            attack_config,
            indices,
            results,
            subset.images.shape[1:],
        )
        archive_paths.extend(
            os.path.join(path, filename)
            for filename in (attack_archive.MANIFEST_FILENAME, attack_archive.RECORDS_FILENAME)
        )

        if config['evaluation']['revalidate']:
            revalidate(kind, attack_name, path, model, subset)

    manifest.write_run_manifest(
        directory,
        'attack',
        config,
        [os.path.join(directory, attack_archive.CLEAN_FILENAME)] + archive_paths,
        extra={'model': kind, 'attacks': list(attack_names), 'sample_count': len(subset)},
    )
    logger.answer(
        f'{kind}: Wrote {len(archive_paths) // 2} adversarial archives into {directory}'
    )

    return directory

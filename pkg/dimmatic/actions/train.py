import logging

from dimmatic.actions import dataset, manifest, paths
from dimmatic.data import augment
from dimmatic.models import bundle, training

logger = logging.getLogger(__name__)


def training_options(config):
    '''
    Given a parsed configuration, return its Training_options.
    '''
    section = config['training']

    return training.Training_options(
        epochs=section['epochs'],
        batch_size=section['batch_size'],
        learning_rate=section['learning_rate'],
        seed=config['seed'],
    )


def run_train(config, train_arguments, global_arguments):
    '''
    Run the "train" action: train the requested model kind on the training split, then write its
    checkpoints, a run manifest and the per-epoch loss log into the model's directory. Return the
    directory.

    Raise Divergence_error if training blows up.
    '''
    requested_kind = train_arguments.model or config['models']['kind']
    kind = paths.weights_kind(requested_kind)
    directory = paths.model_directory(config, kind)

    if kind != requested_kind:
        logger.info(f'{requested_kind}: Training {kind}, whose weights {requested_kind} shares')

    data = dataset.load_split(config, 'train')
    noise_spec = augment.make_noise_spec(
        linf_halfwidth=config['noise']['linf_halfwidth'],
        l0_flip_prob=config['noise']['l0_flip_probability'],
        seed=config['seed'],
    )
    extra = {}

    if kind in training.BASELINE_KINDS:
        extra['adversarial_steps'] = config['training']['adversarial_steps']

    logger.info(f'{kind}: Training on {len(data)} images with seed {config["seed"]}')
    trained = training.train_model(
        kind,
        data,
        noise_spec,
        training_options(config),
        workers=config['training']['workers'],
        **extra,
    )

    checkpoint_paths = bundle.save_bundle(trained.classifier, directory)
    losses_path = manifest.write_losses(directory, trained.traces)
    manifest.write_run_manifest(
        directory,
        'train',
        config,
        checkpoint_paths + [losses_path],
        extra={'model': kind},
    )
    logger.answer(f'{kind}: Trained {len(checkpoint_paths)} networks into {directory}')

    return directory

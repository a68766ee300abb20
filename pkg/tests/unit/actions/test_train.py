from argparse import Namespace

import numpy as np
import pytest
from flexmock import flexmock

from dimmatic.actions import train as module
from dimmatic.data import idx


def make_config(kind='dim'):
    return {
        'seed': 1,
        'models': {'kind': kind},
        'noise': {'linf_halfwidth': 0.5, 'l0_flip_probability': 0.1},
        'training': {
            'epochs': 2,
            'batch_size': 4,
            'learning_rate': 0.01,
            'adversarial_steps': 5,
            'workers': 3,
        },
        'output': {'directory': 'out'},
    }


def make_data():
    return idx.Image_batch(np.zeros((4, 1, 2, 2)), [0, 1, 2, 3])


def test_training_options_reads_training_section_and_seed():
    options = module.training_options(make_config())

    assert options == module.training.Training_options(
        epochs=2, batch_size=4, learning_rate=0.01, seed=1
    )


def test_run_train_writes_bundle_losses_and_run_manifest():
    config = make_config()
    data = make_data()
    noise_spec = flexmock()
    classifier = flexmock()
    traces = {'denoiser': flexmock()}
    flexmock(module.logger).answer = lambda message: None
    flexmock(module.dataset).should_receive('load_split').with_args(config, 'train').and_return(
        data
    )
    flexmock(module.augment).should_receive('make_noise_spec').with_args(
        linf_halfwidth=0.5, l0_flip_prob=0.1, seed=1
    ).and_return(noise_spec)
    flexmock(module.training).should_receive('train_model').with_args(
        'dim', data, noise_spec, module.training_options(config), workers=3
    ).and_return(module.training.Trained_model(classifier, traces)).once()
    flexmock(module.bundle).should_receive('save_bundle').with_args(
        classifier, 'out/models/dim'
    ).and_return(['out/models/dim/denoiser.dimc'])
    flexmock(module.manifest).should_receive('write_losses').with_args(
        'out/models/dim', traces
    ).and_return('out/models/dim/losses.csv')
    flexmock(module.manifest).should_receive('write_run_manifest').with_args(
        'out/models/dim',
        'train',
        config,
        ['out/models/dim/denoiser.dimc', 'out/models/dim/losses.csv'],
        extra={'model': 'dim'},
    ).once()

    assert module.run_train(config, Namespace(model=None), flexmock()) == 'out/models/dim'


def test_run_train_with_bidim_trains_shared_dim_weights():
    config = make_config(kind='cnn')
    flexmock(module.logger).answer = lambda message: None
    flexmock(module.dataset).should_receive('load_split').and_return(make_data())
    flexmock(module.augment).should_receive('make_noise_spec')
    flexmock(module.training).should_receive('train_model').with_args(
        'dim', object, object, object, workers=3
    ).and_return(module.training.Trained_model(flexmock(), {})).once()
    flexmock(module.bundle).should_receive('save_bundle').with_args(
        object, 'out/models/dim'
    ).and_return([])
    flexmock(module.manifest).should_receive('write_losses').and_return('losses.csv')
    flexmock(module.manifest).should_receive('write_run_manifest')

    assert module.run_train(config, Namespace(model='bidim'), flexmock()) == 'out/models/dim'


def test_run_train_with_baseline_passes_adversarial_steps():
    config = make_config(kind='madry')
    flexmock(module.logger).answer = lambda message: None
    flexmock(module.dataset).should_receive('load_split').and_return(make_data())
    flexmock(module.augment).should_receive('make_noise_spec')
    flexmock(module.training).should_receive('train_model').with_args(
        'madry', object, object, object, workers=3, adversarial_steps=5
    ).and_return(module.training.Trained_model(flexmock(), {})).once()
    flexmock(module.bundle).should_receive('save_bundle').and_return([])
    flexmock(module.manifest).should_receive('write_losses').and_return('losses.csv')
    flexmock(module.manifest).should_receive('write_run_manifest')

    module.run_train(config, Namespace(model=None), flexmock())


def test_run_train_propagates_divergence():
    config = make_config()
    flexmock(module.dataset).should_receive('load_split').and_return(make_data())
    flexmock(module.augment).should_receive('make_noise_spec')
    flexmock(module.training).should_receive('train_model').and_raise(
        module.training.optimizer.Divergence_error('NaN loss')
    )
    flexmock(module.bundle).should_receive('save_bundle').never()

    with pytest.raises(module.training.optimizer.Divergence_error):
        module.run_train(config, Namespace(model=None), flexmock())

import collections

import numpy as np
import pytest
from flexmock import flexmock

from dimmatic.attacks import common
from dimmatic.attacks import registry as module
from dimmatic.models import baseline
from dimmatic.nn import network as nn_network


def tilted_classifier(bias, binarize_input=False):
    network = nn_network.Network(
        (nn_network.dense(2, 2),),
        np.array([0, 0.6, 0, -0.8, 0, bias], dtype=np.float32),
    )

    return baseline.Network_classifier(
        network, binarize_input=binarize_input, image_shape=(1, 1, 2)
    )


def test_attacks_cover_every_norm_with_unique_names():
    counts = collections.Counter(attack.norm for attack in module.ATTACKS)

    assert len(module.ATTACKS) == 42
    assert counts == {'L2': 22, 'Linf': 12, 'L0': 2, 'L1': 6}
    assert len(module.ATTACK_NAME_TO_ENTRY) == len(module.ATTACKS)


def test_attack_names_start_with_their_norm():
    for attack in module.ATTACKS:
        assert attack.name.startswith(attack.norm.lower() + '_')


def test_fast_preset_only_holds_gradient_attacks():
    assert 'l2_pgd' in module.PRESETS['fast']
    assert 'l2_boundary' not in module.PRESETS['fast']
    assert 'l2_brendel_bethge' not in module.PRESETS['fast']


def test_table_preset_names_are_registered():
    assert len(module.PRESETS['table1']) == 15
    assert set(module.PRESETS['table1']) <= set(module.ATTACK_NAME_TO_ENTRY)


def test_resolve_attack_names_with_preset_returns_preset():
    assert module.resolve_attack_names('all') == module.PRESETS['all']


def test_resolve_attack_names_with_list_keeps_given_order():
    assert module.resolve_attack_names('linf_fgsm, l2_pgd') == ('linf_fgsm', 'l2_pgd')


@pytest.mark.parametrize('selection', ('l2_pgd,l3_pgd', '', ' , '))
def test_resolve_attack_names_with_unknown_or_empty_selection_raises(selection):
    with pytest.raises(ValueError):
        module.resolve_attack_names(selection)


def test_get_entry_with_unknown_name_raises():
    with pytest.raises(ValueError):
        module.get_entry('l2_unknown')


def test_build_attack_config_of_bounded_attack_uses_norm_threshold():
    config = module.build_attack_config(module.get_entry('linf_pgd'), seed=3)

    assert config.epsilon == 0.3
    assert config.steps == 50
    assert config.random_start
    assert config.seed == 3


def test_build_attack_config_of_minimization_attack_has_no_epsilon():
    config = module.build_attack_config(module.get_entry('l2_ddn'), thresholds={'L2': 2.0})

    assert config.epsilon is None
    assert config.steps == 100


def test_build_attack_config_honors_thresholds_and_overrides():
    config = module.build_attack_config(
        module.get_entry('l2_repeated_gaussian_noise'),
        thresholds={'L2': 2.0},
        overrides={'repeats': 7, 'options': {'clipping_aware': True}},
    )

    assert config.epsilon == 2.0
    assert config.repeats == 7
    assert config.options == {'distribution': 'gaussian', 'clipping_aware': True}


def test_build_attack_config_does_not_mutate_entry_defaults():
    attack = module.get_entry('l2_gaussian_noise')

    module.build_attack_config(attack, overrides={'options': {'clipping_aware': True}})

    assert attack.defaults['options']['clipping_aware'] is False


def test_run_attack_of_external_attack_raises():
    attack = module.get_entry('l2_brendel_bethge')

    with pytest.raises(ValueError):
        module.run_attack(
            attack, tilted_classifier(-0.1), np.zeros((1, 1, 2)), 0, common.Attack_config('L2')
        )


def test_run_attack_on_binarizing_model_goes_through_proxy_search():
    attack = module.get_entry('l2_fgm')
    model = tilted_classifier(-0.1, binarize_input=True)
    config = module.build_attack_config(attack)
    result = common.failure(0)
    flexmock(module.binarized).should_receive('attack_binarized_model').with_args(
        model, object, 0, attack.function, config
    ).and_return(result).once()

    assert module.run_attack(attack, model, np.zeros((1, 1, 2)), 0, config) is result


def test_attack_samples_is_independent_of_worker_count():
    attack = module.get_entry('l2_repeated_uniform_noise')
    model = tilted_classifier(-0.25)
    config = module.build_attack_config(attack, thresholds={'L2': 0.3}, seed=1)
    images = np.random.default_rng(0).random((6, 1, 1, 2)).astype(np.float32)
    labels = model.predict(images)

    serial = module.attack_samples(attack, model, images, labels, range(6), config)
    parallel = module.attack_samples(attack, model, images, labels, range(6), config, workers=3)

    for first, second in zip(serial, parallel):
        assert first.success == second.success
        np.testing.assert_array_equal(first.distances, second.distances)

import collections
import logging

import dimmatic.execute
from dimmatic.attacks import binarized, blend, common, decision, gradient, noise

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = {'L0': 12, 'L1': 8, 'L2': 1.5, 'Linf': 0.3}

Attack_entry = collections.namedtuple(
    'Attack_entry', ('name', 'norm', 'function', 'bounded', 'defaults')
)


def entry(name, norm, function, bounded=False, **defaults):
    return Attack_entry(name, norm, function, bounded, defaults)


def blend_entry(name, norm, target_kind, strategy, bounded=False):
    return entry(
        name,
        norm,
        blend.blend_search,
        bounded,
        options={'target_kind': target_kind, 'strategy': strategy},
    )


def noise_entry(name, norm, distribution, clipping_aware=False, repeats=1):
    return entry(
        name,
        norm,
        noise.noise_attack,
        True,
        repeats=repeats,
        options={'distribution': distribution, 'clipping_aware': clipping_aware},
    )


def external_entry(name, norm):
    '''
    An attack whose adversarial archives are produced elsewhere and imported for reporting.
    '''
    return entry(name, norm, None)


PGD = {'steps': 50, 'random_start': True}
BIM = {'steps': 50, 'random_start': False}
REPEATS = 100

ATTACKS = (
    blend_entry('l2_contrast_reduction', 'L2', 'gray', 'direct', bounded=True),
    entry('l2_ddn', 'L2', gradient.ddn, steps=100),
    entry('l2_pgd', 'L2', gradient.iterative_gradient, True, **PGD),
    entry('l2_bim', 'L2', gradient.iterative_gradient, True, **BIM),
    entry('l2_fgm', 'L2', gradient.fgm, True),
    noise_entry('l2_gaussian_noise', 'L2', 'gaussian'),
    noise_entry('l2_uniform_noise', 'L2', 'uniform'),
    noise_entry('l2_clipping_aware_gaussian_noise', 'L2', 'gaussian', clipping_aware=True),
    noise_entry('l2_clipping_aware_uniform_noise', 'L2', 'uniform', clipping_aware=True),
    noise_entry('l2_repeated_gaussian_noise', 'L2', 'gaussian', repeats=REPEATS),
    noise_entry('l2_repeated_uniform_noise', 'L2', 'uniform', repeats=REPEATS),
    noise_entry(
        'l2_clipping_aware_repeated_gaussian_noise',
        'L2',
        'gaussian',
        clipping_aware=True,
        repeats=REPEATS,
    ),
    noise_entry(
        'l2_clipping_aware_repeated_uniform_noise',
        'L2',
        'uniform',
        clipping_aware=True,
        repeats=REPEATS,
    ),
    entry('l2_deepfool', 'L2', gradient.deepfool, steps=gradient.DEEPFOOL_STEPS),
    blend_entry('l2_inversion', 'L2', 'inverted', 'direct'),
    blend_entry('l2_binary_search_contrast_reduction', 'L2', 'gray', 'binary'),
    blend_entry('l2_linear_search_contrast_reduction', 'L2', 'gray', 'linear'),
    blend_entry('l2_gaussian_blur', 'L2', 'blurred', 'binary'),
    blend_entry('l2_linear_search_blended_uniform_noise', 'L2', 'uniform_noise', 'linear'),
    entry(
        'l2_carlini_wagner',
        'L2',
        gradient.carlini_wagner_l2,
        steps=gradient.CARLINI_WAGNER_STEPS,
        step_size=gradient.CARLINI_WAGNER_LEARNING_RATE,
    ),
    external_entry('l2_brendel_bethge', 'L2'),
    entry('l2_boundary', 'L2', decision.boundary_attack, steps=decision.BOUNDARY_MAX_QUERIES),
    entry('linf_pgd', 'Linf', gradient.iterative_gradient, True, **PGD),
    entry('linf_bim', 'Linf', gradient.iterative_gradient, True, **BIM),
    entry('linf_fgsm', 'Linf', gradient.fgm, True),
    noise_entry('linf_uniform_noise', 'Linf', 'uniform'),
    noise_entry('linf_repeated_uniform_noise', 'Linf', 'uniform', repeats=REPEATS),
    entry('linf_deepfool', 'Linf', gradient.deepfool, steps=gradient.DEEPFOOL_STEPS),
    blend_entry('linf_inversion', 'Linf', 'inverted', 'direct'),
    blend_entry('linf_binary_search_contrast_reduction', 'Linf', 'gray', 'binary'),
    blend_entry('linf_linear_search_contrast_reduction', 'Linf', 'gray', 'linear'),
    blend_entry('linf_gaussian_blur', 'Linf', 'blurred', 'binary'),
    blend_entry('linf_linear_search_blended_uniform_noise', 'Linf', 'uniform_noise', 'linear'),
    external_entry('linf_brendel_bethge', 'Linf'),
    entry('l0_salt_and_pepper', 'L0', noise.salt_and_pepper),
    entry('l0_pointwise', 'L0', decision.pointwise, repeats=decision.POINTWISE_REPEATS),
    blend_entry('l1_inversion', 'L1', 'inverted', 'direct'),
    blend_entry('l1_binary_search_contrast_reduction', 'L1', 'gray', 'binary'),
    blend_entry('l1_linear_search_contrast_reduction', 'L1', 'gray', 'linear'),
    blend_entry('l1_gaussian_blur', 'L1', 'blurred', 'binary'),
    blend_entry('l1_linear_search_blended_uniform_noise', 'L1', 'uniform_noise', 'linear'),
    external_entry('l1_brendel_bethge', 'L1'),
)

ATTACK_NAME_TO_ENTRY = {attack.name: attack for attack in ATTACKS}

PRESETS = {
    'all': tuple(attack.name for attack in ATTACKS),
    'fast': tuple(
        attack.name
        for attack in ATTACKS
        if attack.function is not None and attack.function.uses_gradients
    ),
    'table1': (
        'l2_ddn',
        'l2_pgd',
        'l2_bim',
        'l2_fgm',
        'l2_deepfool',
        'l2_carlini_wagner',
        'l2_brendel_bethge',
        'l2_boundary',
        'linf_pgd',
        'linf_bim',
        'linf_fgsm',
        'linf_deepfool',
        'linf_brendel_bethge',
        'l0_pointwise',
        'l1_brendel_bethge',
    ),
}


def resolve_attack_names(selection):
    '''
    Given a preset name ("all", "fast", "table1") or a comma-separated list of attack names, return
    the tuple of attack names in registry order for presets or in the given order otherwise.

    Raise ValueError if any name is unknown.
    '''
    if selection in PRESETS:
        return PRESETS[selection]

    names = tuple(name.strip() for name in selection.split(',') if name.strip())
    unknown = [name for name in names if name not in ATTACK_NAME_TO_ENTRY]

    if unknown or not names:
        raise ValueError(
            f'Unknown attack {", ".join(unknown) or selection!r}; use a preset ({", ".join(PRESETS)}) or attack names'
        )

    return names


def get_entry(name):
    try:
        return ATTACK_NAME_TO_ENTRY[name]
    except KeyError:
        raise ValueError(f'Unknown attack {name}')


def build_attack_config(attack, thresholds=None, seed=0, overrides=None):
    '''
    Given an Attack_entry, thresholds per norm, a global seed, and a dict of overriding config
    fields, return the attack's Attack_config. Bounded attacks take their norm's threshold as
    epsilon. Overridden options merge into the entry's default options.
    '''
    thresholds = dict(DEFAULT_THRESHOLDS, **(thresholds or {}))
    fields = dict(attack.defaults)
    overrides = dict(overrides or {})
    options = dict(fields.pop('options', {}), **overrides.pop('options', {}))
    fields.update(overrides)

    if attack.bounded:
        fields.setdefault('epsilon', thresholds[attack.norm])

    return common.make_attack_config(attack.norm, seed=seed, options=options, **fields)


def run_attack(attack, model, image, label, config):
    '''
    Attack one image with the given Attack_entry. Models with hard binarization go through
    attack_binarized_model().
    '''
    if attack.function is None:
        raise ValueError(f'{attack.name}: Attack is computed externally and can only be imported')

    if model.binarizes:
        return binarized.attack_binarized_model(model, image, label, attack.function, config)

    return attack.function(model, image, label, config)


def attack_samples(attack, model, images, labels, indices, config, workers=1):
    '''
    Given an Attack_entry, a model, images, their labels and dataset indices, an Attack_config and a
    worker count, attack every image and return the Attack_results in input order. Each sample's
    seed derives from the config's seed, the attack name and the sample's index.
    '''

    def attack_sample(item):
        index, image, label = item
        sample_config = config._replace(
            seed=common.sample_seed(config.seed, attack.name, int(index))
        )

        return run_attack(attack, model, image, int(label), sample_config)

    results = dimmatic.execute.execute_in_pool(
        attack_sample,
        zip(indices, images, labels),
        workers,
        description=f'{attack.name} sample',
    )
    logger.info(
        f'{model.name}: {attack.name} succeeded on {sum(result.success for result in results)} of {len(results)} samples'
    )

    return results

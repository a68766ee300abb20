import collections

import numpy as np

from dimmatic.attacks import common

Per_norm_summary = collections.namedtuple(
    'Per_norm_summary',
    ('norm', 'epsilon', 'attack_accuracies', 'aggregate_accuracy', 'median_distance'),
)


def robust_fraction(distances, epsilon):
    '''
    Return the percentage of distances strictly above epsilon. A perturbation of exactly epsilon
    counts as a successful attack.
    '''
    if epsilon <= 0:
        raise ValueError(f'Threshold must be positive, got {epsilon}')

    distances = np.asarray(distances, dtype=np.float64)

    return 100.0 * np.count_nonzero(distances > epsilon) / len(distances)


def accuracy_at_threshold(table, attack, epsilon):
    '''
    Given a Distance_table, an attack name and a positive threshold, return the model's accuracy
    under that attack as a percentage.

    Raise ValueError if the table has no such attack or the threshold isn't positive.
    '''
    if attack not in table.attacks:
        raise ValueError(f'{table.model}: No distances for attack {attack}')

    return robust_fraction(table.distances[table.attacks.index(attack)], epsilon)


def aggregate_over_attacks(table, norm):
    '''
    Given a Distance_table and a norm, return every sample's smallest distance across the norm's
    attacks. A sample stays at infinity only when every attack failed on it.

    Raise ValueError if no attack uses the norm.
    '''
    rows = [position for position, attack_norm in enumerate(table.norms) if attack_norm == norm]

    if not rows:
        raise ValueError(f'{table.model}: No {norm} attacks to aggregate')

    return table.distances[rows].min(axis=0)


def median_distance(distances):
    '''
    Return the lower median of the given distances, where infinity sorts above every number.

    Raise ValueError if there are no distances.
    '''
    distances = np.sort(np.asarray(distances, dtype=np.float64))

    if not len(distances):
        raise ValueError('Cannot take the median of no distances')

    return float(distances[(len(distances) - 1) // 2])


def summarize(table, thresholds):
    '''
    Given a Distance_table and a dict from norm to threshold, return a dict from each norm the
    table's attacks use, in norm order, to its Per_norm_summary.
    '''
    summaries = {}

    for norm in common.NORMS:
        if norm not in table.norms:
            continue

        epsilon = thresholds[norm]
        aggregate = aggregate_over_attacks(table, norm)
        summaries[norm] = Per_norm_summary(
            norm,
            epsilon,
            {
                attack: accuracy_at_threshold(table, attack, epsilon)
                for attack, attack_norm in zip(table.attacks, table.norms)
                if attack_norm == norm
            },
            robust_fraction(aggregate, epsilon),
            median_distance(aggregate),
        )

    return summaries


def minimal_accuracy(summaries):
    '''
    Given a dict of Per_norm_summary values, return the lowest accuracy under any single attack.
    '''
    return min(
        accuracy
        for summary in summaries.values()
        for accuracy in summary.attack_accuracies.values()
    )


def clean_accuracy(table):
    return 100.0 * np.count_nonzero(table.clean_correct) / len(table.clean_correct)

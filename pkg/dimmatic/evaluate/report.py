import logging
import os

import numpy as np
import pandas

from dimmatic.attacks import common, registry
from dimmatic.evaluate import summary

logger = logging.getLogger(__name__)

CSV_FILENAME = 'report.csv'
MARKDOWN_FILENAME = 'report.md'
LEADING_COLUMNS = ('attack', 'norm', 'epsilon')
MINIMAL_ACCURACY_ROW = 'MINIMAL_ACCURACY'
CLEAN_ACCURACY_ROW = 'CLEAN_ACCURACY'


def aggregate_row_name(norm):
    return f'ALL_{norm.upper()}'


def median_row_name(norm):
    return f'MEDIAN_{norm.upper()}'


def ordered_attacks(tables, norm):
    '''
    Return the names of every attack in any of the tables that uses the given norm: registered
    attacks in registry order, then any others by name.
    '''
    present = {
        attack
        for table in tables
        for attack, attack_norm in zip(table.attacks, table.norms)
        if attack_norm == norm
    }
    registered = [attack.name for attack in registry.ATTACKS if attack.name in present]

    return registered + sorted(present - set(registered))


def per_model(summaries, norm, value):
    '''
    Given each model's summaries, a norm and a function from Per_norm_summary to a number, return
    the number for every model, or NaN for a model without attacks in that norm.
    '''
    return [value(per_norm[norm]) if norm in per_norm else np.nan for per_norm in summaries]


def build_report(tables, thresholds):
    '''
    Given Distance_tables, one per model, and a dict from norm to threshold, return a
    pandas.DataFrame with the columns attack, norm, epsilon and one column per model. Rows hold the
    accuracy under each attack grouped by norm, each norm's aggregate accuracy and median distance,
    then the minimal and clean accuracies. A model without an attack gets NaN.

    Raise ValueError if there are no tables or two share a model name.
    '''
    if not tables:
        raise ValueError('No distance tables to report on')

    models = [table.model for table in tables]

    if len(set(models)) != len(models):
        raise ValueError(f'Duplicate model names in report: {", ".join(models)}')

    thresholds = dict(registry.DEFAULT_THRESHOLDS, **(thresholds or {}))
    summaries = [summary.summarize(table, thresholds) for table in tables]
    rows = []

    def add_row(name, norm, epsilon, values):
        rows.append(dict(zip(LEADING_COLUMNS, (name, norm, epsilon)), **dict(zip(models, values))))

    for norm in common.NORMS:
        attacks = ordered_attacks(tables, norm)

        if not attacks:
            continue

        epsilon = thresholds[norm]

        for attack in attacks:
            add_row(
                attack,
                norm,
                epsilon,
                per_model(
                    summaries,
                    norm,
                    lambda per_norm: per_norm.attack_accuracies.get(attack, np.nan),
                ),
            )

        add_row(
            aggregate_row_name(norm),
            norm,
            epsilon,
            per_model(summaries, norm, lambda per_norm: per_norm.aggregate_accuracy),
        )
        add_row(
            median_row_name(norm),
            norm,
            epsilon,
            per_model(summaries, norm, lambda per_norm: per_norm.median_distance),
        )

    add_row(
        MINIMAL_ACCURACY_ROW,
        '',
        np.nan,
        [summary.minimal_accuracy(per_norm) for per_norm in summaries],
    )
    add_row(CLEAN_ACCURACY_ROW, '', np.nan, [summary.clean_accuracy(table) for table in tables])

    return pandas.DataFrame(rows, columns=list(LEADING_COLUMNS) + models)


def format_accuracy(value):
    return '' if np.isnan(value) else f'{value:.0f}%'


def format_distance(value):
    if np.isnan(value):
        return ''

    return '∞' if np.isinf(value) else f'{value:.2f}'


def render_markdown(report):
    '''
    Given a report pandas.DataFrame from build_report(), render it as a Markdown table with the
    attacks grouped by norm, and return it. Each norm's aggregate row shows "median / accuracy".
    '''
    models = list(report.columns[len(LEADING_COLUMNS) :])
    records = report.to_dict('records')
    by_name = {record['attack']: record for record in records}
    lines = ['| Attack | ' + ' | '.join(models) + ' |', '| --- |' + ' --- |' * len(models)]

    def add_line(label, cells):
        lines.append(f'| {label} | ' + ' | '.join(cells) + ' |')

    for record in records:
        name = record['attack']

        if name.startswith('MEDIAN_'):
            continue

        if name.startswith('ALL_'):
            medians = by_name[median_row_name(record['norm'])]
            add_line(
                f'**All {record["norm"]} attacks**',
                [
                    f'{format_distance(medians[model])} / {format_accuracy(record[model])}'
                    for model in models
                ],
            )
        elif name == MINIMAL_ACCURACY_ROW:
            add_line('**Minimal Accuracy**', [format_accuracy(record[model]) for model in models])
        elif name == CLEAN_ACCURACY_ROW:
            add_line('Clean Accuracy', [format_accuracy(record[model]) for model in models])
        else:
            add_line(
                f'{name} ({record["norm"]}, ε = {record["epsilon"]:g})',
                [format_accuracy(record[model]) for model in models],
            )

    return '\n'.join(lines) + '\n'


def write_report(report, directory):
    '''
    Write a report pandas.DataFrame as CSV and Markdown into the given directory, creating it as
    needed. Return a tuple of the two paths.
    '''
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, CSV_FILENAME)
    markdown_path = os.path.join(directory, MARKDOWN_FILENAME)

    report.to_csv(csv_path, index=False)

    with open(markdown_path, 'w') as markdown_file:
        markdown_file.write(render_markdown(report))

    logger.debug(f'Wrote {len(report)} report rows to {csv_path} and {markdown_path}')

    return csv_path, markdown_path


def read_report(path):
    return pandas.read_csv(path, float_precision='round_trip')

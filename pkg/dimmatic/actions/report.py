import logging

from dimmatic.actions import manifest, paths
from dimmatic.evaluate import distances, report

logger = logging.getLogger(__name__)


def run_report(config, report_arguments, global_arguments):
    '''
    Run the "report" action: load the distance table of every requested model from its attack
    directory, including any imported archives there, and write the accuracy report as CSV and
    Markdown. Log the Markdown table as the answer. Return the report pandas.DataFrame.

    Raise Archive_error if a model has no archives.
    '''
    models = report_arguments.models or config['evaluation']['models']
    tables = []

    for model in models:
        table = distances.load_distance_table(paths.attack_directory(config, model), model)
        logger.info(
            f'{model}: {len(table.attacks)} attacks over {len(table.clean_correct)} samples'
        )
        tables.append(table)

    frame = report.build_report(tables, config['thresholds'])
    directory = paths.report_directory(config)
    csv_path, markdown_path = report.write_report(frame, directory)
    manifest.write_run_manifest(
        directory, 'report', config, [csv_path, markdown_path], extra={'models': list(models)}
    )
    logger.answer(report.render_markdown(frame).rstrip('\n'))

    return frame

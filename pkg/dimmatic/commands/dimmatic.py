import logging
import sys

import colorama

try:
    import importlib_metadata
except ModuleNotFoundError:  # pragma: nocover
    import importlib.metadata as importlib_metadata

import dimmatic.actions.attack
import dimmatic.actions.report
import dimmatic.actions.train
import dimmatic.actions.tsne
from dimmatic.commands.arguments import parse_arguments
from dimmatic.config import validate
from dimmatic.logger import add_custom_log_levels, configure_logging, should_do_markup
from dimmatic.verbosity import verbosity_to_log_level

logger = logging.getLogger(__name__)

SUCCESS_EXIT_CODE = 0
NUMERIC_FAILURE_EXIT_CODE = 1
USAGE_EXIT_CODE = 2

ACTION_DATASET_KEYS = {
    'train': validate.TRAIN_DATASET_KEYS,
    'attack': validate.TEST_DATASET_KEYS,
    'report': (),
    'tsne': validate.TEST_DATASET_KEYS,
}


def log_record(suppress_log=False, **kwargs):
    '''
    Create a log record based on the given makeLogRecord() arguments, one of which must be
    named "levelno". Log the record (unless suppress log is set) and return it.
    '''
    record = logging.makeLogRecord(kwargs)
    if suppress_log:
        return record

    logger.handle(record)
    return record


def exit_code_for_error(error):
    '''
    Return the process exit code for the given exception: numeric failures like a diverging loss
    get one code, and everything else (bad arguments, configuration, or files) another.
    '''
    if isinstance(error, ArithmeticError):
        return NUMERIC_FAILURE_EXIT_CODE

    return USAGE_EXIT_CODE


def log_error_records(message, error=None, levelno=logging.CRITICAL, suppress_log=False):
    '''
    Given error message text, an optional exception object, an optional log level, and whether to
    suppress logging, log error summary information and also yield it as a series of
    logging.LogRecord instances. Each record carries the exit code the error calls for as its
    "exit_code" attribute.

    Note that because the logs are yielded as a generator, logs won't get logged unless you consume
    the generator output.
    '''
    level_name = logging._levelToName[levelno]

    if not error:
        yield log_record(
            levelno=levelno,
            levelname=level_name,
            msg=message,
            exit_code=USAGE_EXIT_CODE,
            suppress_log=suppress_log,
        )
        return

    fields = dict(
        levelno=levelno,
        levelname=level_name,
        exit_code=exit_code_for_error(error),
        suppress_log=suppress_log,
    )

    try:
        raise error
    except validate.Validation_error as error:
        yield log_record(msg=message, **fields)

        for error_message in error.errors:
            yield log_record(msg=error_message, **fields)
    except (ValueError, OSError, ArithmeticError) as error:
        yield log_record(msg=message, **fields)
        yield log_record(msg=error, **fields)
    except:  # noqa: E722
        # Raising above only as a means of determining the error type. Swallow the exception here
        # because we don't want the exception to propagate out of this function.
        pass


def load_configuration(config_path, overrides=None, resolve_env=True, dataset_keys=()):
    '''
    Given a configuration filename (or None for defaults only), a sequence of override strings,
    whether to resolve environment variables, and the dataset keys whose files must exist, return a
    tuple of (parsed configuration or None on error, sequence of logging.LogRecord instances with
    any warnings or errors).
    '''
    logs = []

    try:
        config, parse_logs = validate.parse_configuration(
            config_path, validate.schema_filename(), overrides, resolve_env, dataset_keys
        )
        logs.extend(parse_logs)
    except (ValueError, OSError) as error:
        logs.extend(
            log_error_records(
                f"{config_path or 'Default configuration'}: Error parsing configuration",
                error,
                suppress_log=True,
            )
        )
        return None, logs

    return config, logs


def apply_global_arguments(config, global_arguments):
    '''
    Put the global command-line flags that shadow configuration options (seed, output directory,
    workers) into the given parsed configuration, in place.
    '''
    if global_arguments.seed is not None:
        config['seed'] = global_arguments.seed

    if global_arguments.output_directory:
        config['output']['directory'] = global_arguments.output_directory

    if global_arguments.workers:
        config['training']['workers'] = global_arguments.workers
        config['attacks']['workers'] = global_arguments.workers


def run_action(action_name, config, arguments):
    '''
    Given an action name, a parsed configuration, and parsed command-line arguments as a dict from
    subparser name to a namespace of arguments, run the action.
    '''
    action_arguments = arguments[action_name]
    global_arguments = arguments['global']

    if action_name == 'train':
        dimmatic.actions.train.run_train(config, action_arguments, global_arguments)
    elif action_name == 'attack':
        dimmatic.actions.attack.run_attack(config, action_arguments, global_arguments)
    elif action_name == 'report':
        dimmatic.actions.report.run_report(config, action_arguments, global_arguments)
    elif action_name == 'tsne':
        dimmatic.actions.tsne.run_tsne(config, action_arguments, global_arguments)


def collect_run_summary_logs(action_name, config, arguments):
    '''
    Given an action name, a parsed configuration, and parsed command-line arguments, run the action
    and yield a series of logging.LogRecord instances containing summary information about the run.
    '''
    try:
        run_action(action_name, config, arguments)
    except (ValueError, OSError, ArithmeticError) as error:
        yield from log_error_records(f'{action_name}: Error running action', error)
        return

    yield logging.makeLogRecord(
        dict(
            levelno=logging.INFO,
            levelname='INFO',
            msg=f'{action_name}: Successfully ran action',
        )
    )


def summary_exit_code(summary_logs):
    '''
    Given summary logging.LogRecord instances, return the exit code for the run: the highest code
    any error record calls for, or success when there are no errors.
    '''
    error_logs = [log for log in summary_logs if log.levelno >= logging.CRITICAL]

    if not error_logs:
        return SUCCESS_EXIT_CODE

    return max(getattr(log, 'exit_code', USAGE_EXIT_CODE) for log in error_logs)


def main():  # pragma: no cover
    add_custom_log_levels()

    try:
        arguments = parse_arguments(*sys.argv[1:])
    except ValueError as error:
        configure_logging(logging.CRITICAL)
        logger.critical(error)
        sys.exit(USAGE_EXIT_CODE)
    except SystemExit as error:
        if error.code == 0:
            raise error
        configure_logging(logging.CRITICAL)
        logger.critical(f"Error parsing arguments: {' '.join(sys.argv)}")
        sys.exit(USAGE_EXIT_CODE)

    global_arguments = arguments['global']

    if global_arguments.version:
        print(importlib_metadata.version('dimmatic'))
        sys.exit(SUCCESS_EXIT_CODE)

    action_name = next(name for name in arguments if name != 'global')
    config, parse_logs = load_configuration(
        global_arguments.config_path,
        global_arguments.overrides,
        global_arguments.resolve_env,
        ACTION_DATASET_KEYS[action_name],
    )

    colorama.init(autoreset=True, strip=not should_do_markup(global_arguments.no_color, config))

    try:
        configure_logging(
            verbosity_to_log_level(global_arguments.verbosity),
            verbosity_to_log_level(global_arguments.log_file_verbosity),
            global_arguments.log_file,
            global_arguments.log_file_format,
        )
    except (FileNotFoundError, PermissionError) as error:
        configure_logging(logging.CRITICAL)
        logger.critical(f'Error configuring logging: {error}')
        sys.exit(USAGE_EXIT_CODE)

    summary_logs = list(parse_logs)

    if config is not None:
        apply_global_arguments(config, global_arguments)
        summary_logs.extend(collect_run_summary_logs(action_name, config, arguments))

    summary_logs_max_level = max(log.levelno for log in summary_logs)

    for message in ('', 'summary:'):
        log_record(
            levelno=summary_logs_max_level,
            levelname=logging.getLevelName(summary_logs_max_level),
            msg=message,
        )

    for log in summary_logs:
        logger.handle(log)

    sys.exit(summary_exit_code(summary_logs))

import os
import sys
from argparse import ArgumentParser

from dimmatic.models import training
from dimmatic.verbosity import VERBOSITY_HELP

ACTION_NAMES = ('train', 'attack', 'report', 'tsne')
DEFAULT_CONFIG_FILENAME = 'dimmatic.yaml'


def default_config_path():
    '''
    Return the default configuration filename if it exists in the current working directory, or
    None to run with defaults alone.
    '''
    return DEFAULT_CONFIG_FILENAME if os.path.exists(DEFAULT_CONFIG_FILENAME) else None


def make_parsers():
    '''
    Build a global arguments parser, the action subparsers, and a combined parser containing both.
    Return them as a tuple. The global parser is useful for parsing just global arguments while
    ignoring actions, and the combined parser is handy for displaying help that includes
    everything: global flags, a list of actions, etc.
    '''
    global_parser = ArgumentParser(add_help=False, allow_abbrev=False)
    global_group = global_parser.add_argument_group('global arguments')

    global_group.add_argument(
        '-c',
        '--config',
        dest='config_path',
        help=f'Configuration filename, defaults to {DEFAULT_CONFIG_FILENAME} if present in the current directory and otherwise to built-in defaults',
    )
    global_group.add_argument(
        '--seed',
        type=int,
        help='Global seed, overriding the "seed" configuration option',
    )
    global_group.add_argument(
        '--out',
        dest='output_directory',
        help='Output directory, overriding the "output.directory" configuration option',
    )
    global_group.add_argument(
        '--workers',
        type=int,
        help='Number of parallel workers for training internal models and attacking samples',
    )
    global_group.add_argument(
        '-nc', '--no-color', dest='no_color', action='store_true', help='Disable colored output'
    )
    global_group.add_argument(
        '-v',
        '--verbosity',
        type=int,
        choices=range(-2, 3),
        default=0,
        help=f'Display verbose progress to the console: {VERBOSITY_HELP}; defaults to 0',
    )
    global_group.add_argument(
        '--log-file-verbosity',
        type=int,
        choices=range(-2, 3),
        default=1,
        help=f'When --log-file is given, log verbose progress to file: {VERBOSITY_HELP}; defaults to 1',
    )
    global_group.add_argument(
        '--log-file',
        type=str,
        help='Also write log messages to this file',
    )
    global_group.add_argument(
        '--log-file-format',
        type=str,
        help='Log format string used for log messages written to the log file',
    )
    global_group.add_argument(
        '--override',
        metavar='SECTION.OPTION=VALUE',
        dest='overrides',
        action='append',
        help='Configuration file option to override with specified value, can specify flag multiple times',
    )
    global_group.add_argument(
        '--no-environment-interpolation',
        dest='resolve_env',
        action='store_false',
        help='Do not resolve environment variables in configuration file',
    )
    global_group.add_argument(
        '--version',
        dest='version',
        default=False,
        action='store_true',
        help='Display installed version number of dimmatic and exit',
    )

    global_plus_action_parser = ArgumentParser(
        description='''
            Train denoised internal models and baselines on MNIST, attack them, and report their
            robustness.
            ''',
        parents=[global_parser],
    )

    action_parsers = global_plus_action_parser.add_subparsers(
        title='actions',
        metavar='',
        help='Specify one of the following actions:',
    )

    train_parser = action_parsers.add_parser(
        'train',
        help='Train a model and save its checkpoints, manifest and loss log',
        description='Train a model and save its checkpoints, manifest and loss log',
        add_help=False,
    )
    train_group = train_parser.add_argument_group('train arguments')
    train_group.add_argument(
        '--model',
        choices=training.MODEL_KINDS,
        help='Model kind to train, overriding the "models.kind" configuration option',
    )
    train_group.add_argument('-h', '--help', action='help', help='Show this help message and exit')

    attack_parser = action_parsers.add_parser(
        'attack',
        help='Attack a trained model and save one adversarial archive per attack',
        description='Attack a trained model and save one adversarial archive per attack',
        add_help=False,
    )
    attack_group = attack_parser.add_argument_group('attack arguments')
    attack_group.add_argument(
        '--model',
        choices=training.MODEL_KINDS,
        help='Model kind to attack, overriding the "models.kind" configuration option',
    )
    attack_group.add_argument(
        '--attacks',
        metavar='SELECTION',
        help='Attack preset (all, fast, table1) or comma-separated attack names, overriding the "attacks.selection" configuration option',
    )
    attack_group.add_argument(
        '--sample-count',
        type=int,
        help='Size of the evaluation subset, overriding the "attacks.sample_count" configuration option',
    )
    attack_group.add_argument('-h', '--help', action='help', help='Show this help message and exit')

    report_parser = action_parsers.add_parser(
        'report',
        help='Summarize adversarial archives into CSV and Markdown accuracy tables',
        description='Summarize adversarial archives into CSV and Markdown accuracy tables',
        add_help=False,
    )
    report_group = report_parser.add_argument_group('report arguments')
    report_group.add_argument(
        '--model',
        dest='models',
        action='append',
        help='Model to put in the report, can specify flag multiple times, overriding the "evaluation.models" configuration option',
    )
    report_group.add_argument('-h', '--help', action='help', help='Show this help message and exit')

    tsne_parser = action_parsers.add_parser(
        'tsne',
        help='Embed the latents of each internal model with t-SNE and plot them',
        description='Embed the latents of each internal model with t-SNE and plot them',
        add_help=False,
    )
    tsne_group = tsne_parser.add_argument_group('tsne arguments')
    tsne_group.add_argument(
        '--model',
        choices=training.MODEL_KINDS,
        help='Model kind whose internal models to embed, overriding the "models.kind" configuration option',
    )
    tsne_group.add_argument(
        '--perplexity',
        type=float,
        help='t-SNE perplexity, overriding the "tsne.perplexity" configuration option',
    )
    tsne_group.add_argument(
        '--sample-count',
        type=int,
        help='Number of test images to embed, overriding the "tsne.sample_count" configuration option',
    )
    tsne_group.add_argument('-h', '--help', action='help', help='Show this help message and exit')

    return global_parser, action_parsers, global_plus_action_parser


def parse_arguments(*unparsed_arguments):
    '''
    Given command-line arguments with which this script was invoked, parse the arguments and return
    them as a dict mapping from action name (or "global") to an argparse.Namespace instance. Global
    flags may come before or after the action.

    Raise ValueError if the arguments cannot be parsed.
    Raise SystemExit with an error code of 0 if "--help" was requested.
    '''
    global_parser, action_parsers, global_plus_action_parser = make_parsers()
    global_arguments, remaining_arguments = global_parser.parse_known_args(unparsed_arguments)

    if not global_arguments.config_path:
        global_arguments.config_path = default_config_path()

    arguments = {'global': global_arguments}

    if global_arguments.version:
        return arguments

    if not remaining_arguments or remaining_arguments[0] in ('-h', '--help'):
        if remaining_arguments:
            global_plus_action_parser.print_help()
            sys.exit(0)

        global_plus_action_parser.print_usage()
        raise ValueError(f'No action given; use one of: {", ".join(ACTION_NAMES)}')

    action_name, *action_arguments = remaining_arguments

    if action_name not in action_parsers.choices:
        global_plus_action_parser.print_usage()
        raise ValueError(f'Unrecognized action: {action_name}')

    parsed, unknown_arguments = action_parsers.choices[action_name].parse_known_args(
        action_arguments
    )

    if unknown_arguments:
        global_plus_action_parser.print_usage()
        raise ValueError(
            f"Unrecognized argument{'s' if len(unknown_arguments) > 1 else ''}: {' '.join(unknown_arguments)}"
        )

    if global_arguments.workers is not None and global_arguments.workers < 1:
        raise ValueError('The --workers flag must be at least 1')

    for name in ('sample_count', 'perplexity'):
        value = getattr(parsed, name, None)

        if value is not None and value <= 0:
            raise ValueError(f'The --{name.replace("_", "-")} flag must be positive')

    arguments[action_name] = parsed

    return arguments

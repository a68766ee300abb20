import os

import jsonschema
import ruamel.yaml

import dimmatic.config
from dimmatic.attacks import common, registry
from dimmatic.config import environment, load, normalize, override

TRAIN_DATASET_KEYS = ('train_images', 'train_labels')
TEST_DATASET_KEYS = ('test_images', 'test_labels')
ATTACK_SETTINGS = set(common.Attack_config._fields) - {'norm', 'seed'}


def schema_filename():
    '''
    Path to the installed YAML configuration schema file, used to validate and parse the
    configuration.

    Raise FileNotFoundError when the schema path does not exist.
    '''
    schema_path = os.path.join(os.path.dirname(dimmatic.config.__file__), 'schema.yaml')

    with open(schema_path):
        return schema_path


def format_json_error_path_element(path_element):
    '''
    Given a path element into a JSON data structure, format it for display as a string.
    '''
    if isinstance(path_element, int):
        return str(f'[{path_element}]')

    return str(f'.{path_element}')


def format_json_error(error):
    '''
    Given an instance of jsonschema.exceptions.ValidationError, format it for display as a string.
    '''
    if not error.path:
        return f'At the top level: {error.message}'

    formatted_path = ''.join(format_json_error_path_element(element) for element in error.path)
    return f"At '{formatted_path.lstrip('.')}': {error.message}"


class Validation_error(ValueError):
    '''
    A collection of error messages generated when attempting to validate a particular
    configuration file.
    '''

    def __init__(self, config_filename, errors):
        '''
        Given a configuration filename path (None for a configuration made purely of defaults) and
        a sequence of string error messages, create a Validation_error.
        '''
        self.config_filename = config_filename
        self.errors = errors

    def __str__(self):
        '''
        Render a validation error as a user-facing string.
        '''
        return (
            f'An error occurred while parsing a configuration file at {self.config_filename or "(defaults)"}:\n'
            + '\n'.join(error for error in self.errors)
        )


def dataset_path(config, key):
    '''
    Given a parsed configuration and a dataset key like "test_images", return the path of that IDX
    file. Relative filenames are joined onto the dataset root.
    '''
    data = config['data']

    return os.path.join(os.path.expanduser(data['root']), os.path.expanduser(data[key]))


def apply_logical_validation(config_filename, parsed_configuration, dataset_keys=()):
    '''
    Given a parsed and schematically valid configuration with defaults applied, and the dataset keys
    whose files the requested action reads, run through the additional logical validation checks:
    the dataset files exist, the attack selection and every per-attack option name resolve in the
    attack registry, and every threshold is positive. If there are any such validation problems,
    raise a Validation_error.
    '''
    errors = []

    for key in dataset_keys:
        path = dataset_path(parsed_configuration, key)

        if not os.path.exists(path):
            errors.append(f'Dataset file for "data.{key}" not found: {path}')

    attacks = parsed_configuration['attacks']

    try:
        registry.resolve_attack_names(attacks['selection'])
    except ValueError as error:
        errors.append(f'In "attacks.selection": {error}')

    for name, attack_options in attacks['options'].items():
        if name not in registry.ATTACK_NAME_TO_ENTRY:
            errors.append(f'Unknown attack in "attacks.options": {name}')

        for setting in sorted(set(attack_options) - ATTACK_SETTINGS):
            errors.append(f'Unknown setting in "attacks.options.{name}": {setting}')

    for norm, threshold in parsed_configuration['thresholds'].items():
        if not threshold > 0:
            errors.append(f'Threshold for {norm} must be positive, got {threshold}')

    if errors:
        raise Validation_error(config_filename, tuple(errors))


def parse_configuration(
    config_filename, schema_filename, overrides=None, resolve_env=True, dataset_keys=()
):
    '''
    Given the path to a config filename in YAML format (or None to start from an empty
    configuration), the path to a schema filename in a YAML rendition of JSON Schema format, a
    sequence of configuration file override strings in the form of "section.option=value", whether
    to resolve environment variables, and the dataset keys whose files must exist, return the parsed
    configuration as a data structure of nested dicts and lists with every default filled in.
    Example return value:

        {
            'seed': 0,
            'data': {'root': 'mnist', 'train_images': 'train-images-idx3-ubyte.gz', ...},
            'thresholds': {'L0': 12, 'L1': 8, 'L2': 1.5, 'Linf': 0.3},
            ...
        }

    Also return a sequence of logging.LogRecord instances containing any warnings about the
    configuration.

    Raise FileNotFoundError if the file does not exist, PermissionError if the user does not
    have permissions to read the file, or Validation_error if the config does not match the schema
    or fails logical validation.
    '''
    try:
        config = load.load_configuration(config_filename) if config_filename else {}
        schema = load.load_configuration(schema_filename)
    except (ruamel.yaml.error.YAMLError, RecursionError) as error:
        raise Validation_error(config_filename, (str(error),))

    try:
        logs = normalize.normalize(config_filename, config)
        override.apply_overrides(config, schema, overrides)

        if resolve_env:
            environment.resolve_env_variables(config)
    except ValueError as error:
        raise Validation_error(config_filename, (str(error),))

    environment.apply_data_root_override(config)

    validator = jsonschema.Draft7Validator(schema)
    validation_errors = tuple(validator.iter_errors(config))

    if validation_errors:
        raise Validation_error(
            config_filename, tuple(format_json_error(error) for error in validation_errors)
        )

    normalize.apply_defaults(config, schema)
    apply_logical_validation(config_filename, config, dataset_keys)

    return config, logs

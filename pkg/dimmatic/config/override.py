import io

import ruamel.yaml


def set_values(config, keys, value):
    '''
    Given a hierarchy of configuration dicts, a sequence of parsed key strings, and a value, descend
    into the hierarchy based on the keys to set the value into the right place.
    '''
    if not keys:
        return

    first_key = keys[0]

    if len(keys) == 1:
        config[first_key] = value
        return

    if not isinstance(config.get(first_key), dict):
        config[first_key] = {}

    set_values(config[first_key], keys[1:], value)


def convert_value_type(value, option_type):
    '''
    Given a string value and its schema type (a string, a list of strings, or None), return the value
    converted to its logical type.

    A string option stays a string so that characters in it don't get interpreted as YAML.

    Raise ruamel.yaml.error.YAMLError if there's a parse issue with the YAML.
    '''
    if option_type == 'string':
        return value

    return ruamel.yaml.YAML(typ='safe').load(io.StringIO(value))


def type_for_option(schema, option_keys):
    '''
    Given a configuration schema and a sequence of keys identifying an option, e.g. ('tsne',
    'perplexity'), return the schema type of that option.

    Keys under a mapping with free-form names, like per-attack options, descend through
    "additionalProperties". Return None if the option or its type cannot be found in the schema.
    '''
    option_schema = schema

    for key in option_keys:
        properties = option_schema.get('properties', {})

        if key in properties:
            option_schema = properties[key]
        elif isinstance(option_schema.get('additionalProperties'), dict):
            option_schema = option_schema['additionalProperties']
        else:
            return None

    return option_schema.get('type')


def parse_overrides(raw_overrides, schema):
    '''
    Given a sequence of configuration file override strings in the form of "section.option=value"
    and a configuration schema dict, parse and return a sequence of tuples (keys, value), where keys
    is a tuple of strings. For instance, given the following raw overrides:

        ['tsne.perplexity=10', 'seed=3']

    ... return this:

        (
            (('tsne', 'perplexity'), 10),
            (('seed',), 3),
        )

    Raise ValueError if an override can't be parsed.
    '''
    if not raw_overrides:
        return ()

    parsed_overrides = []

    for raw_override in raw_overrides:
        try:
            raw_keys, value = raw_override.split('=', 1)
            keys = tuple(raw_keys.strip().split('.'))

            if not all(keys):
                raise ValueError()

            parsed_overrides.append((keys, convert_value_type(value, type_for_option(schema, keys))))
        except ValueError:
            raise ValueError(
                f"Invalid override '{raw_override}'. Make sure you use the form: SECTION.OPTION=VALUE"
            )
        except ruamel.yaml.error.YAMLError as error:
            raise ValueError(f"Invalid override '{raw_override}': {error.problem}")

    return tuple(parsed_overrides)


def apply_overrides(config, schema, raw_overrides):
    '''
    Given a configuration dict, a corresponding configuration schema dict, and a sequence of
    configuration file override strings in the form of "section.option=value", parse each override
    and set it into the configuration dict.
    '''
    for keys, value in parse_overrides(raw_overrides, schema):
        set_values(config, keys, value)

import io
import os

import ruamel.yaml

INDENT = 4
SEQUENCE_INDENT = 2


def plain_data(value):
    '''
    Convert numpy scalars, tuples, and nested containers into plain Python values that YAML can
    represent.
    '''
    if isinstance(value, dict):
        return {str(key): plain_data(item) for key, item in value.items()}

    if isinstance(value, (list, tuple)):
        return [plain_data(item) for item in value]

    if hasattr(value, 'item') and callable(value.item):
        return value.item()

    return value


def render_yaml(data):
    '''
    Given a data structure of nested dicts and lists, render it as YAML and return it.
    '''
    dumper = ruamel.yaml.YAML()
    dumper.indent(mapping=INDENT, sequence=INDENT + SEQUENCE_INDENT, offset=INDENT)
    rendered = io.StringIO()
    dumper.dump(plain_data(data), rendered)

    return rendered.getvalue()


def write_yaml(filename, data):
    '''
    Given a target filename and a data structure, render it as YAML and write it out, creating any
    containing directories as needed.
    '''
    directory = os.path.dirname(filename)

    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(filename, 'w') as yaml_file:
        yaml_file.write(render_yaml(data))


def read_yaml(filename):
    '''
    Load the given YAML file and return its contents as plain nested dicts and lists.

    Raise ruamel.yaml.error.YAMLError if the file doesn't parse.
    '''
    with open(filename) as yaml_file:
        return ruamel.yaml.YAML(typ='safe').load(yaml_file)

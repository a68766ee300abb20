import copy
import logging

NORM_SPELLINGS = {
    'l0': 'L0',
    'l1': 'L1',
    'l2': 'L2',
    'linf': 'Linf',
    'l_inf': 'Linf',
    'linfinity': 'Linf',
}


def apply_defaults(config, schema):
    '''
    Given a configuration dict and the schema dict it's validated against, fill in every option the
    configuration leaves out with the schema's "default" value, descending into sections. Modify the
    configuration in place and return it.
    '''
    for name, option_schema in schema.get('properties', {}).items():
        if name not in config:
            if 'default' not in option_schema:
                continue

            config[name] = copy.deepcopy(option_schema['default'])

        if option_schema.get('type') == 'object' and isinstance(config[name], dict):
            apply_defaults(config[name], option_schema)

    return config


def normalize_thresholds(config_filename, config):
    '''
    Rename any threshold keys spelled in lower case ("linf:") to the canonical norm names ("Linf:"),
    in place. Return warnings about the renamed keys as logging.LogRecord instances.
    '''
    thresholds = config.get('thresholds')

    if not isinstance(thresholds, dict):
        return []

    logs = []

    for name in list(thresholds):
        canonical = NORM_SPELLINGS.get(str(name).lower())

        if canonical is None or canonical == name:
            continue

        value = thresholds.pop(name)
        thresholds.setdefault(canonical, value)
        logs.append(
            logging.makeLogRecord(
                dict(
                    levelno=logging.WARNING,
                    levelname='WARNING',
                    msg=f'{config_filename}: Threshold "{name}" should be spelled "{canonical}"',
                )
            )
        )

    return logs


def normalize(config_filename, config):
    '''
    Given a configuration filename and a configuration dict of its loaded contents, apply
    backwards-compatible spellings to the configuration, in place. Return any log message warnings
    produced by the normalization.

    Raise ValueError if the configuration isn't a mapping.
    '''
    if not isinstance(config, dict):
        raise ValueError('Configuration does not contain any options')

    logs = normalize_thresholds(config_filename, config)
    attacks = config.get('attacks')
    evaluation = config.get('evaluation')

    # "selection: [a, b]" means "selection: a,b".
    if isinstance(attacks, dict) and isinstance(attacks.get('selection'), list):
        attacks['selection'] = ','.join(str(name) for name in attacks['selection'])

    if isinstance(evaluation, dict) and isinstance(evaluation.get('models'), str):
        evaluation['models'] = [evaluation['models']]

    return logs

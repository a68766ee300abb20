import logging

import dimmatic.logger

VERBOSITY_DISABLED = -2
VERBOSITY_ERROR = -1
VERBOSITY_ANSWER = 0
VERBOSITY_SOME = 1
VERBOSITY_LOTS = 2

VERBOSITY_HELP = '-2 (disabled), -1 (errors only), 0 (results, like accuracy tables), 1 (info about each training epoch and attack), or 2 (debug)'


def verbosity_to_log_level(verbosity):
    '''
    Given a dimmatic verbosity value, return the corresponding Python log level.
    '''
    dimmatic.logger.add_custom_log_levels()

    return {
        VERBOSITY_DISABLED: logging.DISABLED,
        VERBOSITY_ERROR: logging.ERROR,
        VERBOSITY_ANSWER: logging.ANSWER,
        VERBOSITY_SOME: logging.INFO,
        VERBOSITY_LOTS: logging.DEBUG,
    }.get(verbosity, logging.WARNING)

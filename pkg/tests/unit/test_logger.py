import logging

import pytest
from flexmock import flexmock

from dimmatic import logger as module


@pytest.mark.parametrize('bool_val', (True, 'yes', 'on', '1', 'true', 'True', 1))
def test_to_bool_parses_true_values(bool_val):
    assert module.to_bool(bool_val)


@pytest.mark.parametrize('bool_val', (False, 'no', 'off', '0', 'false', 'False', 0))
def test_to_bool_parses_false_values(bool_val):
    assert not module.to_bool(bool_val)


def test_to_bool_passes_none_through():
    assert module.to_bool(None) is None


def test_interactive_console_false_when_not_isatty(capsys):
    with capsys.disabled():
        flexmock(module.sys.stderr).should_receive('isatty').and_return(False)

        assert module.interactive_console() is False


def test_interactive_console_false_when_TERM_is_dumb(capsys):
    with capsys.disabled():
        flexmock(module.sys.stderr).should_receive('isatty').and_return(True)
        flexmock(module.os.environ).should_receive('get').with_args('TERM').and_return('dumb')

        assert module.interactive_console() is False


def test_should_do_markup_respects_no_color_value():
    flexmock(module).should_receive('interactive_console').never()

    assert module.should_do_markup(no_color=True, config={}) is False


def test_should_do_markup_respects_config_value():
    flexmock(module).should_receive('interactive_console').never()

    assert module.should_do_markup(no_color=False, config={'output': {'color': False}}) is False


def test_should_do_markup_without_config_falls_back_to_console(monkeypatch):
    monkeypatch.delenv('PY_COLORS', raising=False)
    flexmock(module).should_receive('interactive_console').and_return(True)

    assert module.should_do_markup(no_color=False, config=None) is True


def test_should_do_markup_respects_PY_COLORS_environment_variable(monkeypatch):
    monkeypatch.setenv('PY_COLORS', 'True')
    flexmock(module).should_receive('interactive_console').never()

    assert module.should_do_markup(no_color=False, config={'output': {'color': True}}) is True


def test_should_do_markup_prefers_no_color_value_to_PY_COLORS(monkeypatch):
    monkeypatch.setenv('PY_COLORS', 'True')

    assert module.should_do_markup(no_color=True, config={}) is False


def test_should_do_markup_with_false_PY_COLORS_disables_markup(monkeypatch):
    monkeypatch.setenv('PY_COLORS', '0')
    flexmock(module).should_receive('interactive_console').and_return(True)

    assert module.should_do_markup(no_color=False, config={}) is False


def test_multi_stream_handler_logs_to_handler_for_log_level():
    error_handler = flexmock()
    error_handler.should_receive('emit').once()
    info_handler = flexmock()

    multi_handler = module.Multi_stream_handler(
        {module.logging.ERROR: error_handler, module.logging.INFO: info_handler}
    )
    multi_handler.emit(flexmock(levelno=module.logging.ERROR))


def test_multi_stream_handler_sends_unlisted_level_to_next_level_up():
    warning_handler = flexmock()
    warning_handler.should_receive('emit').once()
    info_handler = flexmock()
    info_handler.should_receive('emit').never()

    multi_handler = module.Multi_stream_handler(
        {module.logging.WARNING: warning_handler, module.logging.INFO: info_handler}
    )
    multi_handler.emit(flexmock(levelno=module.logging.INFO + 1))


def test_console_color_formatter_format_includes_log_message():
    module.add_custom_log_levels()
    plain_message = 'Epoch 3/20 loss 0.012'
    color_message = module.Console_color_formatter().format(
        logging.makeLogRecord(dict(levelno=logging.ANSWER, msg=plain_message))
    )

    assert color_message != plain_message
    assert plain_message in color_message


def test_color_text_does_not_raise():
    module.color_text(module.colorama.Fore.RED, 'hi')


def test_color_text_without_color_does_not_raise():
    module.color_text(None, 'hi')


def test_add_logging_level_adds_level_name_and_sets_global_attributes_and_methods():
    logger = logging.getLogger()
    flexmock(module.logging).should_receive('addLevelName').with_args(99, 'PLAID').once()
    builtins = flexmock(module.sys.modules['builtins'])
    builtins.should_call('setattr')
    builtins.should_receive('setattr').with_args(module.logging, 'PLAID', 99).once()
    builtins.should_receive('setattr').with_args(logger.__class__, 'plaid', object).once()
    builtins.should_receive('setattr').with_args(logging, 'plaid', object).once()

    module.add_logging_level('PLAID', 99)


def test_add_logging_level_skips_global_setting_if_already_set():
    logger = logging.getLogger()
    flexmock(module.logging).PLAID = 99
    flexmock(logger.__class__).plaid = lambda message: None
    flexmock(module.logging).plaid = lambda message: None
    flexmock(module.logging).should_receive('addLevelName').never()
    builtins = flexmock(module.sys.modules['builtins'])
    builtins.should_call('setattr')
    builtins.should_receive('setattr').with_args(module.logging, 'PLAID', 99).never()
    builtins.should_receive('setattr').with_args(logger.__class__, 'plaid', object).never()
    builtins.should_receive('setattr').with_args(logging, 'plaid', object).never()

    module.add_logging_level('PLAID', 99)


def test_configure_logging_with_console_only_uses_one_handler():
    flexmock(module).should_receive('add_custom_log_levels')
    flexmock(module.logging).ANSWER = module.ANSWER
    flexmock(module.logging).DISABLED = module.DISABLED
    flexmock(module.logging).should_receive('captureWarnings').with_args(True).once()
    flexmock(module.logging).should_receive('basicConfig').with_args(
        level=logging.INFO, handlers=list, force=True
    ).once()
    flexmock(module.logging.handlers).should_receive('WatchedFileHandler').never()

    module.configure_logging(console_log_level=logging.INFO)


def test_configure_logging_with_log_file_adds_file_handler_at_its_own_level():
    flexmock(module).should_receive('add_custom_log_levels')
    flexmock(module.logging).ANSWER = module.ANSWER
    flexmock(module.logging).DISABLED = module.DISABLED
    flexmock(module.logging).should_receive('captureWarnings')
    file_handler = logging.handlers.WatchedFileHandler('/dev/null')
    flexmock(module.logging.handlers).should_receive('WatchedFileHandler').with_args(
        '/tmp/dimmatic.log'
    ).and_return(file_handler).once()
    flexmock(module.logging).should_receive('basicConfig').with_args(
        level=logging.DEBUG, handlers=list, force=True
    ).once()

    module.configure_logging(
        console_log_level=logging.INFO,
        log_file_log_level=logging.DEBUG,
        log_file='/tmp/dimmatic.log',
    )

    assert file_handler.level == logging.DEBUG
    assert '{name}' in file_handler.formatter._fmt


def test_configure_logging_with_disabled_log_file_skips_file_handler():
    flexmock(module).should_receive('add_custom_log_levels')
    flexmock(module.logging).ANSWER = module.ANSWER
    flexmock(module.logging).DISABLED = module.DISABLED
    flexmock(module.logging).should_receive('captureWarnings')
    flexmock(module.logging.handlers).should_receive('WatchedFileHandler').never()
    flexmock(module.logging).should_receive('basicConfig').with_args(
        level=logging.ANSWER, handlers=list, force=True
    ).once()

    module.configure_logging(
        console_log_level=logging.ANSWER,
        log_file_log_level=logging.DISABLED,
        log_file='/tmp/dimmatic.log',
    )


def test_configure_logging_quiets_plotting_loggers():
    flexmock(module.logging).should_receive('basicConfig')
    flexmock(module.logging).should_receive('captureWarnings')

    module.configure_logging(console_log_level=logging.DEBUG)

    assert logging.getLogger('matplotlib').level == logging.WARNING

import pytest
from flexmock import flexmock

from dimmatic.commands import arguments as module


def test_default_config_path_returns_filename_when_present():
    flexmock(module.os.path).should_receive('exists').with_args('dimmatic.yaml').and_return(True)

    assert module.default_config_path() == 'dimmatic.yaml'


def test_default_config_path_returns_none_when_absent():
    flexmock(module.os.path).should_receive('exists').with_args('dimmatic.yaml').and_return(False)

    assert module.default_config_path() is None


def test_make_parsers_registers_every_action():
    global_parser, action_parsers, global_plus_action_parser = module.make_parsers()

    assert tuple(action_parsers.choices) == module.ACTION_NAMES


def test_parse_arguments_with_action_and_global_flags():
    flexmock(module).should_receive('default_config_path').and_return(None)

    arguments = module.parse_arguments('--seed', '3', 'train', '--model', 'cnn', '--out', 'runs')

    assert set(arguments) == {'global', 'train'}
    assert arguments['global'].seed == 3
    assert arguments['global'].output_directory == 'runs'
    assert arguments['global'].config_path is None
    assert arguments['train'].model == 'cnn'


def test_parse_arguments_keeps_explicit_config_path():
    flexmock(module).should_receive('default_config_path').never()

    arguments = module.parse_arguments('--config', 'my.yaml', 'report')

    assert arguments['global'].config_path == 'my.yaml'
    assert arguments['report'].models is None


def test_parse_arguments_collects_repeated_report_models():
    flexmock(module).should_receive('default_config_path').and_return(None)

    arguments = module.parse_arguments('report', '--model', 'cnn', '--model', 'dim')

    assert arguments['report'].models == ['cnn', 'dim']


def test_parse_arguments_collects_overrides_and_verbosity():
    flexmock(module).should_receive('default_config_path').and_return(None)

    arguments = module.parse_arguments(
        'attack',
        '--attacks',
        'fast',
        '--sample-count',
        '200',
        '--override',
        'seed=1',
        '--override',
        'tsne.perplexity=5',
        '--verbosity',
        '2',
    )

    assert arguments['attack'].attacks == 'fast'
    assert arguments['attack'].sample_count == 200
    assert arguments['global'].overrides == ['seed=1', 'tsne.perplexity=5']
    assert arguments['global'].verbosity == 2
    assert arguments['global'].resolve_env is True


def test_parse_arguments_with_tsne_flags():
    flexmock(module).should_receive('default_config_path').and_return(None)

    arguments = module.parse_arguments('tsne', '--perplexity', '10', '--sample-count', '300')

    assert arguments['tsne'].perplexity == 10.0
    assert arguments['tsne'].sample_count == 300
    assert arguments['tsne'].model is None


def test_parse_arguments_with_version_skips_action():
    flexmock(module).should_receive('default_config_path').and_return(None)

    arguments = module.parse_arguments('--version')

    assert set(arguments) == {'global'}
    assert arguments['global'].version is True


def test_parse_arguments_without_action_raises(capsys):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(ValueError):
        module.parse_arguments('--seed', '3')


def test_parse_arguments_with_unknown_action_raises(capsys):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(ValueError):
        module.parse_arguments('evaluate')


def test_parse_arguments_with_unknown_flag_raises(capsys):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(ValueError):
        module.parse_arguments('train', '--attacks', 'fast')


def test_parse_arguments_with_unknown_model_kind_exits(capsys):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(SystemExit) as exit:
        module.parse_arguments('train', '--model', 'resnet')

    assert exit.value.code == 2


@pytest.mark.parametrize(
    'unparsed_arguments',
    (
        ('--workers', '0', 'attack'),
        ('attack', '--sample-count', '0'),
        ('tsne', '--perplexity', '-1'),
    ),
)
def test_parse_arguments_with_non_positive_counts_raises(unparsed_arguments):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(ValueError):
        module.parse_arguments(*unparsed_arguments)


def test_parse_arguments_with_help_exits_successfully(capsys):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(SystemExit) as exit:
        module.parse_arguments('--help')

    assert exit.value.code == 0
    assert 'train' in capsys.readouterr().out


def test_parse_arguments_with_action_help_exits_successfully(capsys):
    flexmock(module).should_receive('default_config_path').and_return(None)

    with pytest.raises(SystemExit) as exit:
        module.parse_arguments('attack', '--help')

    assert exit.value.code == 0
    assert '--attacks' in capsys.readouterr().out

import pytest

from dimmatic.config import environment as module


def test_env_braces(monkeypatch):
    monkeypatch.setenv('MY_CUSTOM_VALUE', 'foo')
    config = {'key': 'Hello ${MY_CUSTOM_VALUE}'}  # noqa: FS003
    module.resolve_env_variables(config)
    assert config == {'key': 'Hello foo'}


def test_env_without_braces_is_not_resolved(monkeypatch):
    monkeypatch.setenv('MY_CUSTOM_VALUE', 'foo')
    config = {'key': 'Hello $MY_CUSTOM_VALUE'}
    module.resolve_env_variables(config)
    assert config == {'key': 'Hello $MY_CUSTOM_VALUE'}


def test_env_escape(monkeypatch):
    monkeypatch.setenv('MY_CUSTOM_VALUE', 'foo')
    config = {'key': r'Hello ${MY_CUSTOM_VALUE} \${MY_CUSTOM_VALUE}'}  # noqa: FS003
    module.resolve_env_variables(config)
    assert config == {'key': r'Hello foo ${MY_CUSTOM_VALUE}'}  # noqa: FS003


def test_env_default_value(monkeypatch):
    monkeypatch.delenv('MY_CUSTOM_VALUE', raising=False)
    config = {'key': '${MY_CUSTOM_VALUE:-/data/mnist}'}  # noqa: FS003
    module.resolve_env_variables(config)
    assert config == {'key': '/data/mnist'}


def test_env_unknown(monkeypatch):
    monkeypatch.delenv('MY_CUSTOM_VALUE', raising=False)
    config = {'key': 'Hello ${MY_CUSTOM_VALUE}'}  # noqa: FS003
    with pytest.raises(ValueError):
        module.resolve_env_variables(config)


def test_env_nested_sections_and_lists(monkeypatch):
    monkeypatch.setenv('MODEL', 'cnn')
    config = {
        'data': {'root': '/home/${MODEL}/mnist'},  # noqa: FS003
        'evaluation': {'models': ['${MODEL}', 'dim'], 'revalidate': True},  # noqa: FS003
        'seed': 3,
    }
    module.resolve_env_variables(config)
    assert config == {
        'data': {'root': '/home/cnn/mnist'},
        'evaluation': {'models': ['cnn', 'dim'], 'revalidate': True},
        'seed': 3,
    }


def test_apply_data_root_override_sets_root(monkeypatch):
    monkeypatch.setenv('DIMMATIC_DATA_ROOT', '/data/mnist')
    config = {'data': {'root': 'mnist', 'test_images': 'images.gz'}}

    module.apply_data_root_override(config)

    assert config == {'data': {'root': '/data/mnist', 'test_images': 'images.gz'}}


def test_apply_data_root_override_creates_data_section(monkeypatch):
    monkeypatch.setenv('DIMMATIC_DATA_ROOT', '/data/mnist')
    config = {}

    module.apply_data_root_override(config)

    assert config == {'data': {'root': '/data/mnist'}}


def test_apply_data_root_override_without_variable_leaves_config_alone(monkeypatch):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)
    config = {'data': {'root': 'mnist'}}

    module.apply_data_root_override(config)

    assert config == {'data': {'root': 'mnist'}}


def test_apply_data_root_override_ignores_empty_variable(monkeypatch):
    monkeypatch.setenv('DIMMATIC_DATA_ROOT', '')
    config = {'data': {'root': 'mnist'}}

    module.apply_data_root_override(config)

    assert config == {'data': {'root': 'mnist'}}

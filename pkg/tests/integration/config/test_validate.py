import pytest

from dimmatic.config import validate as module


def test_schema_filename_returns_plausible_path():
    schema_path = module.schema_filename()

    assert schema_path.endswith('/schema.yaml')


def write_config(tmp_path, config_yaml):
    config_path = tmp_path / 'config.yaml'
    config_path.write_text(config_yaml)

    return str(config_path)


def test_parse_configuration_without_file_fills_every_default(monkeypatch):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)

    config, logs = module.parse_configuration(None, module.schema_filename())

    assert logs == []
    assert config['seed'] == 0
    assert config['data']['root'] == 'mnist'
    assert config['noise'] == {'linf_halfwidth': 0.5, 'l0_flip_probability': pytest.approx(1 / 12)}
    assert config['training'] == {
        'epochs': 20,
        'batch_size': 128,
        'learning_rate': 0.001,
        'adversarial_steps': 40,
        'workers': 1,
    }
    assert config['models'] == {'kind': 'dim'}
    assert config['attacks'] == {
        'selection': 'table1',
        'sample_count': 1000,
        'workers': 1,
        'options': {},
    }
    assert config['thresholds'] == {'L0': 12, 'L1': 8, 'L2': 1.5, 'Linf': 0.3}
    assert config['evaluation'] == {'models': ['dim'], 'revalidate': True}
    assert config['tsne'] == {'perplexity': 30, 'iterations': 1000, 'sample_count': 2000}
    assert config['output'] == {'directory': 'dimmatic-output', 'color': True}


def test_parse_configuration_merges_file_over_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)
    config_path = write_config(
        tmp_path,
        '''
        seed: 7
        training:
            epochs: 2
        thresholds:
            linf: 0.1
        evaluation:
            models: cnn
        ''',
    )

    config, logs = module.parse_configuration(config_path, module.schema_filename())

    assert config['seed'] == 7
    assert config['training']['epochs'] == 2
    assert config['training']['batch_size'] == 128
    assert config['thresholds'] == {'L0': 12, 'L1': 8, 'L2': 1.5, 'Linf': 0.1}
    assert config['evaluation']['models'] == ['cnn']
    assert len(logs) == 1


def test_parse_configuration_applies_typed_overrides(monkeypatch):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)

    config, logs = module.parse_configuration(
        None,
        module.schema_filename(),
        overrides=['tsne.perplexity=5', 'data.root=123', 'attacks.options.linf_pgd={steps: 10}'],
    )

    assert config['tsne']['perplexity'] == 5
    assert config['data']['root'] == '123'
    assert config['attacks']['options'] == {'linf_pgd': {'steps': 10}}


def test_parse_configuration_resolves_environment_and_data_root(tmp_path, monkeypatch):
    monkeypatch.setenv('OUT', '/tmp/out')
    monkeypatch.setenv('DIMMATIC_DATA_ROOT', '/data/mnist')
    config_path = write_config(
        tmp_path,
        '''
        output:
            directory: ${OUT}/runs
        data:
            root: elsewhere
        ''',
    )

    config, logs = module.parse_configuration(config_path, module.schema_filename())

    assert config['output']['directory'] == '/tmp/out/runs'
    assert config['data']['root'] == '/data/mnist'


def test_parse_configuration_without_environment_interpolation_keeps_variables(
    tmp_path, monkeypatch
):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)
    config_path = write_config(tmp_path, 'output:\n    directory: ${OUT}/runs\n')

    config, logs = module.parse_configuration(
        config_path, module.schema_filename(), resolve_env=False
    )

    assert config['output']['directory'] == '${OUT}/runs'  # noqa: FS003


@pytest.mark.parametrize(
    'config_yaml',
    (
        'thresholds:\n    L2: 0\n',
        'tsne:\n    perplexity: -3\n',
        'models:\n    kind: resnet\n',
        'unknown: 1\n',
        'training:\n    epochs: many\n',
    ),
)
def test_parse_configuration_raises_for_schema_violation(tmp_path, monkeypatch, config_yaml):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)

    with pytest.raises(module.Validation_error):
        module.parse_configuration(write_config(tmp_path, config_yaml), module.schema_filename())


def test_parse_configuration_raises_for_unknown_attack(tmp_path, monkeypatch):
    monkeypatch.delenv('DIMMATIC_DATA_ROOT', raising=False)

    with pytest.raises(module.Validation_error):
        module.parse_configuration(
            write_config(tmp_path, 'attacks:\n    selection: linf_pgd,warp_drive\n'),
            module.schema_filename(),
        )


def test_parse_configuration_raises_for_missing_dataset(tmp_path, monkeypatch):
    monkeypatch.setenv('DIMMATIC_DATA_ROOT', str(tmp_path / 'nowhere'))

    with pytest.raises(module.Validation_error) as error:
        module.parse_configuration(
            None, module.schema_filename(), dataset_keys=module.TRAIN_DATASET_KEYS
        )

    assert len(error.value.errors) == 2


def test_parse_configuration_finds_existing_dataset(tmp_path, monkeypatch):
    monkeypatch.setenv('DIMMATIC_DATA_ROOT', str(tmp_path))
    (tmp_path / 't10k-images-idx3-ubyte.gz').write_bytes(b'')
    (tmp_path / 't10k-labels-idx1-ubyte.gz').write_bytes(b'')

    config, logs = module.parse_configuration(
        None, module.schema_filename(), dataset_keys=module.TEST_DATASET_KEYS
    )

    assert config['data']['root'] == str(tmp_path)


def test_parse_configuration_raises_for_unparsable_yaml(tmp_path):
    with pytest.raises(module.Validation_error):
        module.parse_configuration(
            write_config(tmp_path, 'seed: [1\n'), module.schema_filename()
        )


def test_parse_configuration_raises_for_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        module.parse_configuration(str(tmp_path / 'missing.yaml'), module.schema_filename())

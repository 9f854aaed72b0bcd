# tests/test_config.py

import json

import pytest

from config.app_config import (
    DEFAULT_NUMERICS, DEFAULT_PALEY_WIENER, DEFAULT_QUADRATURE, AppConfig, CacheConfig, NumericsConfig,
    PaleyWienerConfig, QuadratureConfig
)
from config.setup import DEFAULT_CACHE_DIR, create_logging_config, load_config_file, setup_configuration
from container import DependencyResolutionError, container


@pytest.fixture(autouse=True)
def restore_defaults():
    container.reset()
    yield
    setup_configuration(None)
    container.reset()


def _write(tmp_path, data):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(data))
    return str(path)


def test_defaults(monkeypatch):
    monkeypatch.delenv('THETASPH_CACHE_DIR', raising=False)
    config = setup_configuration()
    assert container.resolve(AppConfig) is config
    assert config.cache.directory == DEFAULT_CACHE_DIR
    assert config.cache.database_file == 'calibration.db'
    assert config.numerics.default_order == 30
    assert config.quadrature.radial_nodes == 64
    assert config.paley_wiener.ladder == (1e-1, 1e-2, 1e-3, 1e-4)
    assert config.logging.log_directory == 'logs'


def test_cache_directory_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv('THETASPH_CACHE_DIR', str(tmp_path / 'env-cache'))
    path = _write(tmp_path, {'cache': {'directory': str(tmp_path / 'file-cache')}})
    assert setup_configuration(path).cache.directory == str(tmp_path / 'env-cache')
    monkeypatch.delenv('THETASPH_CACHE_DIR')
    assert setup_configuration(path).cache.directory == str(tmp_path / 'file-cache')


def test_file_settings_become_process_defaults(tmp_path):
    path = _write(tmp_path, {
        'numerics': {'default_order': 45, 'pole_tol': 1e-8},
        'quadrature': {'radial_nodes': 96},
        'paley_wiener': {'ladder': [0.5, 0.05]},
        'family': 'A',
    })
    config = setup_configuration(path)
    assert config.paley_wiener.ladder == (0.5, 0.05)
    assert DEFAULT_NUMERICS.default_order == 45
    assert DEFAULT_NUMERICS.pole_tol == 1e-8
    assert DEFAULT_QUADRATURE.radial_nodes == 96
    assert DEFAULT_PALEY_WIENER.ladder == (0.5, 0.05)


def test_unknown_settings_raise(tmp_path):
    with pytest.raises(Exception, match='Unknown NumericsConfig settings'):
        setup_configuration(_write(tmp_path, {'numerics': {'precision': 50}}))


def test_invalid_values_raise():
    with pytest.raises(Exception):
        NumericsConfig(pole_tol=2.0)
    with pytest.raises(Exception):
        NumericsConfig(max_series_order=0)
    with pytest.raises(Exception):
        QuadratureConfig(spectral_spacing=1.0, spectral_cutoff=0.5)
    with pytest.raises(Exception):
        PaleyWienerConfig(ladder=())
    with pytest.raises(Exception):
        PaleyWienerConfig(exp_type_tolerance=1.5)
    with pytest.raises(Exception):
        CacheConfig(directory='')


def test_unreadable_config_file(tmp_path):
    with pytest.raises(Exception, match='Cannot read configuration file'):
        load_config_file(str(tmp_path / 'missing.json'))
    assert load_config_file(None) == {}


def test_logging_config():
    config = create_logging_config({'console_output': False, 'log_file': 'run.log'})
    assert not config.console_output
    assert config.log_file == 'run.log'
    assert config.is_level_enabled('INFO', 'transform')
    assert not config.is_level_enabled('INFO', 'calibration_repository')
    with pytest.raises(Exception, match='No logging configuration found'):
        config.get_component_config('trade')
    with pytest.raises(Exception):
        create_logging_config({'enabled_levels': ['VERBOSE']})


def test_container_resolution():
    with pytest.raises(DependencyResolutionError, match=r"registered: nothing"):
        container.resolve(AppConfig)
    container.register(AppConfig, 'sentinel')
    assert container.is_registered(AppConfig)
    assert container.resolve(AppConfig) == 'sentinel'
    assert container.registrations() == {'AppConfig': 'str'}
    with pytest.raises(DependencyResolutionError, match=r"NumericsConfig \(registered: AppConfig\)"):
        container.resolve(NumericsConfig)

# config/setup.py

import json
import os
from dataclasses import asdict, fields
from typing import Any, Dict, Optional

from container import container
from config.app_config import (
    AppConfig, NumericsConfig, QuadratureConfig, PaleyWienerConfig, CacheConfig, LoggingConfig,
    DEFAULT_NUMERICS, DEFAULT_QUADRATURE, DEFAULT_PALEY_WIENER
)

CACHE_ENV_VAR = "THETASPH_CACHE_DIR"
DEFAULT_CACHE_DIR = ".thetasph_cache"


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """
    Read a JSON configuration file (same schema as a job specification)

    Raises:
        Exception: If the file cannot be read or is not a JSON object
    """
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise Exception(f"Cannot read configuration file {path}: {str(e)}") from e
    if not isinstance(data, dict):
        raise Exception(f"Configuration file {path} must contain a JSON object")
    return data


def _build(cls, section: Dict[str, Any]):
    known = {f.name for f in fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise Exception(f"Unknown {cls.__name__} settings: {sorted(unknown)}")
    if cls is PaleyWienerConfig and 'ladder' in section:
        section = dict(section, ladder=tuple(section['ladder']))
    return cls(**section)


def _install_defaults(numerics: NumericsConfig, quadrature: QuadratureConfig,
                      paley_wiener: PaleyWienerConfig) -> None:
    """Copy validated settings onto the process-wide defaults read by the analysis modules"""
    for target, source in ((DEFAULT_NUMERICS, numerics), (DEFAULT_QUADRATURE, quadrature),
                           (DEFAULT_PALEY_WIENER, paley_wiener)):
        for name, value in asdict(source).items():
            setattr(target, name, value)


def create_logging_config(overrides: Optional[Dict[str, Any]] = None) -> LoggingConfig:
    component_defaults = {
        'main': {
            'enabled_levels': {'INFO', 'WARNING', 'ERROR', 'CRITICAL'},
            'console_output': True
        },
        'cli': {
            'enabled_levels': {'INFO', 'WARNING', 'ERROR', 'CRITICAL'},
            'console_output': True
        },
        'calibration': {
            'enabled_levels': {'INFO', 'WARNING', 'ERROR', 'CRITICAL'},
            'console_output': True
        },
        'calibration_repository': {
            'enabled_levels': {'WARNING', 'ERROR', 'CRITICAL'},
            'console_output': False
        },
        'transform': {
            'enabled_levels': {'INFO', 'WARNING', 'ERROR', 'CRITICAL'},
            'console_output': True
        },
        'paleywiener': {
            'enabled_levels': {'INFO', 'WARNING', 'ERROR', 'CRITICAL'},
            'console_output': True
        },
    }
    overrides = overrides or {}
    return LoggingConfig(
        console_output=overrides.get('console_output', True),
        enabled_levels=set(overrides.get('enabled_levels', {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'})),
        color_scheme={
            'DEBUG': '\033[37m',  # White
            'INFO': '\033[36m',  # Cyan
            'WARNING': '\033[33m',  # Yellow
            'ERROR': '\033[31m',  # Red
            'CRITICAL': '\033[41m',  # Red background
        },
        component_configs=component_defaults,
        log_directory=overrides.get('log_directory', 'logs'),
        log_file=overrides.get('log_file', 'thetasph.log'),
    )


def setup_configuration(config_path: Optional[str] = None) -> AppConfig:
    """
    Set up and register the application configuration in the container

    Settings come from the defaults, then the optional JSON file, then the
    THETASPH_CACHE_DIR environment variable for the cache location.

    Raises:
        Exception: If any configuration is invalid
    """
    data = load_config_file(config_path)

    numerics = _build(NumericsConfig, data.get('numerics', {}))
    quadrature = _build(QuadratureConfig, data.get('quadrature', {}))
    paley_wiener = _build(PaleyWienerConfig, data.get('paley_wiener', {}))

    cache_section = data.get('cache', {})
    cache = CacheConfig(
        directory=os.environ.get(CACHE_ENV_VAR) or cache_section.get('directory', DEFAULT_CACHE_DIR),
        database_file=cache_section.get('database_file', 'calibration.db')
    )

    app_config = AppConfig(
        numerics=numerics,
        quadrature=quadrature,
        paley_wiener=paley_wiener,
        cache=cache,
        logging=create_logging_config(data.get('logging'))
    )

    _install_defaults(numerics, quadrature, paley_wiener)
    container.register(AppConfig, app_config)
    return app_config


def initialize_application(config_path: Optional[str] = None) -> AppConfig:
    """Initialize all application components"""
    from log_service.logger import LoggingService
    from database.repository import CalibrationRepository
    from analysis.calibration import CalibrationService
    from cli.runner import JobRunner

    app_config = setup_configuration(config_path)

    logging_service = LoggingService()
    container.register(LoggingService, logging_service)

    calibration_repository = CalibrationRepository()
    container.register(CalibrationRepository, calibration_repository)

    calibration_service = CalibrationService()
    container.register(CalibrationService, calibration_service)

    job_runner = JobRunner()
    container.register(JobRunner, job_runner)

    return app_config

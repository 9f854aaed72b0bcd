# config/app_config.py

from dataclasses import dataclass
from typing import Dict, Set, Any, Tuple

LOG_LEVELS = {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}


@dataclass
class NumericsConfig:
    """Tolerances and caps shared by the evaluation modules"""
    weyl_cap: int = 1_000_000
    lattice_cap: int = 200_000
    default_order: int = 30
    max_series_order: int = 320
    genericity_tol: float = 1e-10
    pole_tol: float = 1e-9
    generic_distance: float = 1e-6
    tail_safety: float = 10.0
    hyp_series_tol: float = 1e-15
    hyp_max_terms: int = 200_000
    hyp_series_radius: float = 0.8

    def __post_init__(self):
        if self.weyl_cap <= 0:
            raise Exception(f"Invalid Weyl group cap: {self.weyl_cap}")
        if self.lattice_cap <= 0:
            raise Exception(f"Invalid lattice cap: {self.lattice_cap}")
        if self.default_order < 0:
            raise Exception(f"Invalid default truncation order: {self.default_order}")
        if self.max_series_order <= 0:
            raise Exception(f"Invalid series order cap: {self.max_series_order}")
        if not 0 < self.genericity_tol < 1:
            raise Exception(f"Invalid genericity tolerance: {self.genericity_tol}")
        if not 0 < self.pole_tol < 1:
            raise Exception(f"Invalid pole tolerance: {self.pole_tol}")
        if self.tail_safety < 1:
            raise Exception(f"Invalid tail safety factor: {self.tail_safety}")
        if not 0 < self.hyp_series_radius < 1:
            raise Exception(f"Invalid 2F1 series radius: {self.hyp_series_radius}")
        if self.hyp_max_terms <= 0:
            raise Exception(f"Invalid 2F1 term cap: {self.hyp_max_terms}")


@dataclass
class QuadratureConfig:
    """Radial and spectral grid parameters"""
    radial_nodes: int = 64
    spectral_spacing: float = 0.25
    spectral_cutoff: float = 8.0
    cutoff_tolerance: float = 1e-8
    max_cutoff_doublings: int = 6

    def __post_init__(self):
        if self.radial_nodes < 2:
            raise Exception(f"Invalid number of radial nodes: {self.radial_nodes}")
        if self.spectral_spacing <= 0:
            raise Exception(f"Invalid spectral spacing: {self.spectral_spacing}")
        if self.spectral_cutoff <= self.spectral_spacing:
            raise Exception(f"Spectral cutoff {self.spectral_cutoff} must exceed spacing {self.spectral_spacing}")
        if not 0 < self.cutoff_tolerance < 1:
            raise Exception(f"Invalid cutoff tolerance: {self.cutoff_tolerance}")
        if self.max_cutoff_doublings < 0:
            raise Exception(f"Invalid cutoff doubling budget: {self.max_cutoff_doublings}")


@dataclass
class PaleyWienerConfig:
    """Thresholds of the Paley-Wiener diagnostics"""
    ladder: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
    mismatch_tolerance: float = 1e-6
    min_decay_order: float = 2.0
    exp_type_tolerance: float = 0.10

    def __post_init__(self):
        if not self.ladder or any(d <= 0 for d in self.ladder):
            raise Exception(f"Invalid hyperplane ladder: {self.ladder}")
        if self.mismatch_tolerance <= 0:
            raise Exception(f"Invalid mismatch tolerance: {self.mismatch_tolerance}")
        if self.min_decay_order < 0:
            raise Exception(f"Invalid minimal decay order: {self.min_decay_order}")
        if not 0 < self.exp_type_tolerance < 1:
            raise Exception(f"Invalid exponential type tolerance: {self.exp_type_tolerance}")


@dataclass
class CacheConfig:
    """Location of the calibration cache"""
    directory: str
    database_file: str = "calibration.db"

    def __post_init__(self):
        if not self.directory:
            raise Exception("Cache directory cannot be empty")
        if not self.database_file:
            raise Exception("Cache database file name cannot be empty")


@dataclass
class LoggingConfig:
    """Configuration for the application's logging system"""
    console_output: bool
    enabled_levels: Set[str]
    color_scheme: Dict[str, str]
    # Component-specific logging configuration
    component_configs: Dict[str, Dict[str, Any]]
    log_directory: str = "logs"
    log_file: str = "thetasph.log"

    def __post_init__(self):
        if not self.enabled_levels:
            raise Exception("No logging levels enabled")
        if not all(level in LOG_LEVELS for level in self.enabled_levels):
            raise Exception(f"Invalid logging levels: {self.enabled_levels}")

        if not all(level in self.color_scheme for level in LOG_LEVELS):
            missing = LOG_LEVELS - set(self.color_scheme.keys())
            raise Exception(f"Missing color scheme for levels: {missing}")

    def get_component_config(self, component_name: str) -> Dict[str, Any]:
        """
        Get configuration for a specific component.

        Args:
            component_name: The name of the component

        Returns:
            The component's configuration

        Raises:
            Exception: If the component's configuration is not found or incomplete
        """
        if component_name not in self.component_configs:
            raise Exception(f"No logging configuration found for component: {component_name}")
        component_config = self.component_configs[component_name]

        if 'enabled_levels' not in component_config:
            raise Exception(f"No enabled levels specified for component: {component_name}")
        if 'console_output' not in component_config:
            raise Exception(f"Console output setting not specified for component: {component_name}")

        return component_config

    def is_level_enabled(self, level: str, component: str) -> bool:
        return level in self.get_component_config(component)['enabled_levels']


@dataclass
class AppConfig:
    """Main application configuration"""
    numerics: NumericsConfig
    quadrature: QuadratureConfig
    paley_wiener: PaleyWienerConfig
    cache: CacheConfig
    logging: LoggingConfig


DEFAULT_NUMERICS = NumericsConfig()
DEFAULT_QUADRATURE = QuadratureConfig()
DEFAULT_PALEY_WIENER = PaleyWienerConfig()

# analysis/calibration.py

import hashlib
import json
from typing import Optional, Tuple

import numpy as np

from analysis.coeffs import MultiplicityFunction, kappa0
from analysis.errors import ThetaSphError
from analysis.rootsys import RootSystem, ThetaSet
from analysis.transform import Calibration, CompactFunction, RadialGrid, SpectralGrid, calibrate_kappa
from container import container
from database.models import KappaCalibration
from database.repository import CalibrationRepository
from log_service.logger import LoggingService


def grid_fingerprint(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet,
                     grids: Tuple[RadialGrid, SpectralGrid]) -> str:
    """Stable hash of everything a calibrated κ depends on apart from the reference"""
    radial, spectral = grids
    payload = {
        'system': rs.label,
        'multiplicity': m.key(),
        'theta': th.label(),
        'radial': [radial.order, radial.box_lo.tolist(), radial.box_hi.tolist(),
                   float(np.sum(radial.weights))],
        'spectral': [spectral.spacing, spectral.cutoff, len(spectral)],
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


class CalibrationService:
    """Calibrates the inversion constant κ and caches it per system and grid"""

    def __init__(self):
        self._initialized = False
        self._logging_service: Optional[LoggingService] = None
        self._repository: Optional[CalibrationRepository] = None

    def initialize(self) -> bool:
        if self._initialized:
            return True
        try:
            self._logging_service = container.resolve(LoggingService)
            self._repository = container.resolve(CalibrationRepository)
            self._repository.initialize()
            self._initialized = True
            self._logging_service.log('INFO', 'calibration', "Calibration service initialized")
            return True
        except Exception as e:
            if self._logging_service is not None:
                self._logging_service.log('ERROR', 'calibration', f"Calibration service initialization error: {str(e)}")
            raise

    def calibrate(self, rs: RootSystem, m: MultiplicityFunction, th: ThetaSet,
                  grids: Tuple[RadialGrid, SpectralGrid], reference: CompactFunction,
                  use_cache: bool = True) -> float:
        """
        κ for the given system and grids, read from the cache when present

        Raises:
            ThetaSphError: If the fit fails
        """
        if not self._initialized:
            self.initialize()

        fingerprint = grid_fingerprint(rs, m, th, grids)
        if use_cache:
            cached = self._repository.get_kappa(fingerprint, reference.name)
            if cached is not None:
                self._logging_service.log('DEBUG', 'calibration',
                                          f"Cached κ={cached.kappa:.6g} for {rs.label} Θ={th.label()}")
                return float(cached.kappa)

        try:
            self._logging_service.log('INFO', 'calibration',
                                      f"Calibrating κ for {rs.label} m={m.label()} Θ={th.label()} "
                                      f"on {reference.name}")
            result: Calibration = calibrate_kappa(rs, m, th, grids, reference)
        except ThetaSphError as e:
            self._logging_service.log('ERROR', 'calibration', f"κ calibration failed: {str(e)}")
            raise

        if result.skipped_nodes:
            self._logging_service.log('WARNING', 'calibration',
                                      f"{result.skipped_nodes} spectral nodes skipped on density zeros")
        self._logging_service.log('INFO', 'calibration',
                                  f"κ={result.kappa:.10g} (residual {result.residual:.3g})")
        self._repository.put_kappa(KappaCalibration(
            family=rs.family, rank=rs.rank, multiplicity=m.label(), theta=th.label(),
            fingerprint=fingerprint, reference=reference.name, kappa=result.kappa, residual=result.residual))
        return result.kappa

    def normalization(self, rs: RootSystem, m: MultiplicityFunction) -> complex:
        """κ₀ of the Harish-Chandra c-function, cached"""
        if not self._initialized:
            self.initialize()
        cached = self._repository.get_normalization(rs.family, rs.rank, m.label())
        if cached is not None:
            return cached.kappa0
        value = complex(kappa0(rs, m))
        self._repository.put_normalization(rs.family, rs.rank, m.label(), value)
        return value

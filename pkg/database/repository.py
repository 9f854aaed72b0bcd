# database/repository.py
import os
from typing import List, Optional

from sqlalchemy import create_engine, desc
from sqlalchemy.engine import URL
from sqlalchemy.orm import sessionmaker, Session

from container import container
from config.app_config import AppConfig
from log_service.logger import LoggingService
from database.models import Base, KappaCalibration, NormalizationConstant


def create_sqlite_url(directory: str, database_file: str) -> URL:
    """SQLite URL of the calibration cache"""
    return URL.create("sqlite", database=os.path.join(directory, database_file))


class CalibrationRepository:
    """Repository for cached calibration constants"""

    def __init__(self):
        self._initialized = False
        self._logging_service = None
        self._app_config = None
        self._db_url = None
        self._engine = None
        self._db_session: Optional[Session] = None

    def initialize(self) -> bool:
        """
        Initialize the calibration repository

        Returns:
            bool: True if initialization is successful

        Raises:
            Exception: If the cache directory or the database cannot be opened
        """
        if self._initialized:
            return True

        try:
            self._logging_service = container.resolve(LoggingService)
            self._app_config = container.resolve(AppConfig)

            cache = self._app_config.cache
            os.makedirs(cache.directory, exist_ok=True)
            self._db_url = create_sqlite_url(cache.directory, cache.database_file)

            self._engine = create_engine(self._db_url)
            Base.metadata.create_all(self._engine)
            self._db_session = sessionmaker(bind=self._engine)()

            self._initialized = True
            self._logging_service.log('INFO', 'calibration_repository',
                                      f"Calibration repository initialized at {self._db_url.database}")
            return True

        except Exception as e:
            if self._logging_service is not None:
                self._logging_service.log('ERROR', 'calibration_repository',
                                          f"Calibration repository initialization error: {str(e)}")
            raise

    def close(self) -> None:
        if self._db_session is not None:
            self._db_session.close()
        if self._engine is not None:
            self._engine.dispose()
        self._db_session = None
        self._engine = None
        self._initialized = False

    def get_kappa(self, fingerprint: str, reference: str) -> Optional[KappaCalibration]:
        """
        Get a cached κ calibration

        Args:
            fingerprint: Hash of root system, multiplicity, Θ and grids
            reference: Name of the reference function

        Returns:
            Optional[KappaCalibration]: The cached record or None
        """
        try:
            if not self._initialized:
                self.initialize()

            return self._db_session.query(KappaCalibration).filter(
                KappaCalibration.fingerprint == fingerprint,
                KappaCalibration.reference == reference
            ).first()

        except Exception as e:
            self._logging_service.log('ERROR', 'calibration_repository',
                                      f"Failed to read κ for {fingerprint}/{reference}: {str(e)}")
            raise

    def put_kappa(self, record: KappaCalibration) -> KappaCalibration:
        """
        Insert or replace a κ calibration

        Returns:
            KappaCalibration: The stored record
        """
        try:
            if not self._initialized:
                self.initialize()

            existing = self.get_kappa(record.fingerprint, record.reference)
            if existing is not None:
                existing.kappa = record.kappa
                existing.residual = record.residual
                record = existing
            else:
                self._db_session.add(record)
            self._db_session.commit()
            self._logging_service.log('INFO', 'calibration_repository',
                                      f"Stored κ={record.kappa:.6g} for {record.family}{record.rank} "
                                      f"Θ={record.theta} ({record.reference})")
            return record

        except Exception as e:
            self._db_session.rollback()
            self._logging_service.log('ERROR', 'calibration_repository', f"Failed to store κ: {str(e)}")
            raise

    def list_kappas(self, family: Optional[str] = None, rank: Optional[int] = None) -> List[KappaCalibration]:
        """Cached κ calibrations, newest first"""
        if not self._initialized:
            self.initialize()
        query = self._db_session.query(KappaCalibration)
        if family is not None:
            query = query.filter(KappaCalibration.family == family)
        if rank is not None:
            query = query.filter(KappaCalibration.rank == rank)
        return query.order_by(desc(KappaCalibration.created_at)).all()

    def get_normalization(self, family: str, rank: int, multiplicity: str) -> Optional[NormalizationConstant]:
        if not self._initialized:
            self.initialize()
        return self._db_session.query(NormalizationConstant).filter(
            NormalizationConstant.family == family,
            NormalizationConstant.rank == rank,
            NormalizationConstant.multiplicity == multiplicity
        ).first()

    def put_normalization(self, family: str, rank: int, multiplicity: str, kappa0: complex) -> NormalizationConstant:
        """
        Insert or replace the κ₀ normalization of c_HC

        Returns:
            NormalizationConstant: The stored record
        """
        try:
            if not self._initialized:
                self.initialize()

            record = self.get_normalization(family, rank, multiplicity)
            if record is None:
                record = NormalizationConstant(family=family, rank=rank, multiplicity=multiplicity,
                                               kappa0_real=0.0, kappa0_imag=0.0)
                self._db_session.add(record)
            record.kappa0_real = float(complex(kappa0).real)
            record.kappa0_imag = float(complex(kappa0).imag)
            self._db_session.commit()
            return record

        except Exception as e:
            self._db_session.rollback()
            self._logging_service.log('ERROR', 'calibration_repository', f"Failed to store κ₀: {str(e)}")
            raise

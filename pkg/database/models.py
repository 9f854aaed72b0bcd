# database/models.py
from sqlalchemy import Column, Integer, String, Float, DateTime, UniqueConstraint
from sqlalchemy.orm import declarative_base
from datetime import datetime
import pytz

Base = declarative_base()


def _utc_now() -> datetime:
    return datetime.now(pytz.utc)


class KappaCalibration(Base):
    __tablename__ = 'KappaCalibrations'
    __table_args__ = (
        UniqueConstraint('fingerprint', 'reference', name='UQ_KappaCalibrations_FingerprintReference'),
    )

    id = Column(Integer, primary_key=True)
    family = Column(String(2), nullable=False)
    rank = Column(Integer, nullable=False)
    multiplicity = Column(String(100), nullable=False)
    theta = Column(String(50), nullable=False)
    fingerprint = Column(String(64), nullable=False)
    reference = Column(String(100), nullable=False)
    kappa = Column(Float, nullable=False)
    residual = Column(Float, nullable=False)
    created_at = Column(DateTime(timezone=True), nullable=False, default=_utc_now)

    def to_dict(self) -> dict:
        return {
            'family': self.family,
            'rank': self.rank,
            'multiplicity': self.multiplicity,
            'theta': self.theta,
            'fingerprint': self.fingerprint,
            'reference': self.reference,
            'kappa': self.kappa,
            'residual': self.residual,
        }


class NormalizationConstant(Base):
    __tablename__ = 'NormalizationConstants'
    __table_args__ = (
        UniqueConstraint('family', 'rank', 'multiplicity', name='UQ_NormalizationConstants_System'),
    )

    id = Column(Integer, primary_key=True)
    family = Column(String(2), nullable=False)
    rank = Column(Integer, nullable=False)
    multiplicity = Column(String(100), nullable=False)
    kappa0_real = Column(Float, nullable=False)
    kappa0_imag = Column(Float, nullable=False, default=0.0)
    created_at = Column(DateTime(timezone=True), nullable=False, default=_utc_now)

    @property
    def kappa0(self) -> complex:
        return complex(self.kappa0_real, self.kappa0_imag)

# tests/test_calibration.py

import os

import numpy as np
import pytest

import analysis.calibration as calibration
from analysis.calibration import CalibrationService, grid_fingerprint
from analysis.coeffs import MultiplicityFunction
from analysis.rootsys import ThetaSet
from analysis.transform import Calibration, CompactFunction, RadialGrid, SpectralGrid
from container import container
from database.models import KappaCalibration
from database.repository import CalibrationRepository
from log_service.logger import LoggingService


@pytest.fixture
def grids(a1, full_a1):
    return RadialGrid.build(a1, full_a1, 3.0, 32), SpectralGrid.build(a1, 0.25, 8.0)


@pytest.fixture
def reference():
    return CompactFunction.bump(1, 3.0, 'gaussian', width=0.4, name='reference')


def _record(fingerprint='abc', kappa=0.08, reference='reference'):
    return KappaCalibration(family='A', rank=1, multiplicity='2', theta='full', fingerprint=fingerprint,
                            reference=reference, kappa=kappa, residual=1e-6)


def test_logging_service_writes_log_file(app, tmp_path):
    service = container.resolve(LoggingService)
    service.log('INFO', 'main', 'first record')
    service.log('DEBUG', 'main', 'filtered record')
    path = tmp_path / 'logs' / 'thetasph.log'
    assert service.log_path == os.path.join('logs', 'thetasph.log')
    text = path.read_text()
    assert '[INFO] - main - first record' in text
    assert 'filtered record' not in text
    with pytest.raises(Exception):
        service.log('INFO', 'strategy', 'unknown component')


def test_repository_stores_and_replaces_kappa(app, tmp_path):
    repository = container.resolve(CalibrationRepository)
    assert repository.initialize()
    assert (tmp_path / 'cache' / 'calibration.db').exists()
    assert repository.get_kappa('abc', 'reference') is None

    repository.put_kappa(_record())
    repository.put_kappa(_record(kappa=0.09))
    repository.put_kappa(_record(fingerprint='def'))
    stored = repository.get_kappa('abc', 'reference')
    assert stored.kappa == 0.09
    assert stored.to_dict()['theta'] == 'full'
    assert len(repository.list_kappas()) == 2
    assert len(repository.list_kappas(family='A', rank=1)) == 2
    assert repository.list_kappas(family='B') == []


def test_repository_normalization(app):
    repository = container.resolve(CalibrationRepository)
    assert repository.get_normalization('A', 1, '2') is None
    repository.put_normalization('A', 1, '2', 1.5 + 0.5j)
    repository.put_normalization('A', 1, '2', 2.0)
    assert repository.get_normalization('A', 1, '2').kappa0 == 2.0


def test_grid_fingerprint_tracks_grids(a1, m2_a1, full_a1, empty_a1, grids):
    radial, spectral = grids
    base = grid_fingerprint(a1, m2_a1, full_a1, grids)
    assert base == grid_fingerprint(a1, m2_a1, full_a1, (radial, spectral))
    assert base != grid_fingerprint(a1, m2_a1, empty_a1, grids)
    assert base != grid_fingerprint(a1, MultiplicityFunction.constant(a1, 4), full_a1, grids)
    assert base != grid_fingerprint(a1, m2_a1, full_a1, (radial, SpectralGrid.build(a1, 0.5, 8.0)))


def test_calibration_is_cached(app, monkeypatch, a1, m2_a1, full_a1, grids, reference):
    calls = []

    def fake_calibrate(rs, m, th, grids, reference):
        calls.append(th.label())
        return Calibration(kappa=0.0795, residual=1e-7, skipped_nodes=0, sample_points=np.zeros((1, 1)))

    monkeypatch.setattr(calibration, 'calibrate_kappa', fake_calibrate)
    service = container.resolve(CalibrationService)
    assert service.calibrate(a1, m2_a1, full_a1, grids, reference) == 0.0795
    assert service.calibrate(a1, m2_a1, full_a1, grids, reference) == 0.0795
    assert calls == ['full']
    service.calibrate(a1, m2_a1, full_a1, grids, reference, use_cache=False)
    assert calls == ['full', 'full']
    service.calibrate(a1, m2_a1, ThetaSet.empty(1), grids, reference)
    assert len(calls) == 3

    stored = container.resolve(CalibrationRepository).list_kappas(family='A', rank=1)
    assert sorted(record.theta for record in stored) == ['empty', 'full']


def test_normalization_is_cached(app, a1, m2_a1):
    service = container.resolve(CalibrationService)
    # the unnormalized product is π^{-1/2}/λ for m = 2, and ρ = 1
    assert service.normalization(a1, m2_a1) == pytest.approx(np.sqrt(np.pi))
    record = container.resolve(CalibrationRepository).get_normalization('A', 1, m2_a1.label())
    assert record.kappa0 == pytest.approx(np.sqrt(np.pi))

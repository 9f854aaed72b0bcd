# cli/runner.py

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from analysis.calibration import CalibrationService
from analysis.coeffs import (
    MultiplicityFunction, c_hc, c_theta, c_theta_minus, c_theta_plus, delta_density, weyl_denominator
)
from analysis.errors import InvalidSpecError, NumericFailure, PoleError, ThetaSphError
from analysis.hcseries import phi_hc
from analysis.paleywiener import ConvexBody, pw_report
from analysis.rootsys import RootSystem, ThetaSet
from analysis.thetasph import e_theta, hypergeometric_ho, regularized_theta, theta_spherical
from analysis.transform import (
    CompactFunction, RadialGrid, SpectralGrid, check_invariance, check_support, invert_many, plancherel_density_many,
    roundtrip, theta_transform_many
)
from atlas.service import concretize, isomorphisms, query, theta_hint
from atlas.tables import CHECKSUMS
from cli.jobs import H_ONLY, LAMBDA_ONLY, JobSpec
from cli.output import envelope, read_samples_csv, records_frame, to_json, write_csv, write_json
from config.app_config import DEFAULT_QUADRATURE
from container import container
from log_service.logger import LoggingService

EXIT_OK = 0
EXIT_INVALID_SPEC = 1
EXIT_NUMERIC_FAILURE = 2

# Gauss-Legendre order for exponential type fits in rank one
PW_RANKONE_NODES = 600


@dataclass
class JobResult:
    payload: dict
    frame: Optional[pd.DataFrame] = None


class JobRunner:
    """Runs one validated job and writes its result document"""

    def __init__(self):
        self._initialized = False
        self._logging_service: Optional[LoggingService] = None
        self._calibration_service: Optional[CalibrationService] = None

    def initialize(self) -> bool:
        if self._initialized:
            return True
        self._logging_service = container.resolve(LoggingService)
        self._calibration_service = container.resolve(CalibrationService)
        self._initialized = True
        self._log('DEBUG', 'cli', f"Registered services: {container.registrations()}")
        return True

    def _log(self, level: str, component: str, message: str) -> None:
        if self._logging_service is not None:
            self._logging_service.log(level, component, message)

    def execute(self, spec: JobSpec) -> int:
        """
        Validate, run and write one job.

        Returns:
            0 on success, 1 for an invalid job, 2 for a numeric failure
        """
        if not self._initialized:
            self.initialize()
        try:
            try:
                spec.validate()
            except (TypeError, ValueError) as e:
                raise InvalidSpecError('cli', 'malformed job field', str(e)) from e
        except InvalidSpecError as e:
            self._log('ERROR', 'cli', f"Invalid job: {str(e)}")
            sys.stderr.write(to_json({'error': e.to_dict(), 'exit_code': EXIT_INVALID_SPEC}))
            return EXIT_INVALID_SPEC

        self._log('INFO', 'cli', f"Running {spec.subcommand} job")
        try:
            result = self.run(spec)
        except InvalidSpecError as e:
            self._log('ERROR', 'cli', f"Invalid job: {str(e)}")
            sys.stderr.write(to_json({'error': e.to_dict(), 'exit_code': EXIT_INVALID_SPEC}))
            return EXIT_INVALID_SPEC
        except NumericFailure as e:
            self._log('ERROR', 'cli', f"Numeric failure: {str(e)}")
            document = envelope(spec.subcommand, {'error': e.to_dict(), 'exit_code': EXIT_NUMERIC_FAILURE})
            if spec.output:
                write_json(document, spec.output)
            sys.stderr.write(to_json(document))
            return EXIT_NUMERIC_FAILURE

        if spec.format == 'csv':
            text = write_csv(result.frame if result.frame is not None else pd.DataFrame(), spec.output)
        else:
            text = write_json(envelope(spec.subcommand, result.payload), spec.output)
        if not spec.output:
            sys.stdout.write(text)
        self._log('INFO', 'cli', f"Finished {spec.subcommand} job" + (f" -> {spec.output}" if spec.output else ''))
        return EXIT_OK

    def run(self, spec: JobSpec) -> JobResult:
        """
        Raises:
            InvalidSpecError: If the job cannot be set up
            NumericFailure: If an evaluation fails
        """
        if not self._initialized:
            self.initialize()
        handlers = {
            'eval': self._run_eval,
            'transform': self._run_transform,
            'invert': self._run_invert,
            'roundtrip': self._run_roundtrip,
            'pw-check': self._run_pw_check,
            'atlas': self._run_atlas,
        }
        return handlers[spec.subcommand](spec)

    # Shared setup

    @staticmethod
    def _system(spec: JobSpec) -> Tuple[RootSystem, MultiplicityFunction, ThetaSet]:
        rs = spec.root_system()
        return rs, spec.multiplicity(rs), spec.theta_set(rs)

    @staticmethod
    def _header(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet) -> dict:
        return {'root_system': rs.label, 'multiplicity': m.label(), 'theta': th.label()}

    @staticmethod
    def _map(function: Callable, items: Sequence, workers: int) -> List:
        """Evaluate on a worker pool; results keep the order of ``items``"""
        if workers <= 1 or len(items) <= 1:
            return [function(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, items))

    @staticmethod
    def _function(spec: JobSpec, rs: RootSystem) -> CompactFunction:
        if spec.samples_csv:
            try:
                points, values = read_samples_csv(spec.samples_csv, rs.rank)
            except (OSError, ValueError) as e:
                raise InvalidSpecError('cli', 'cannot read samples', f"{spec.samples_csv}: {str(e)}") from e
            return CompactFunction.from_samples(points, values, name=os.path.basename(spec.samples_csv))
        return CompactFunction.bump(rs.rank, spec.radius, kind=spec.bump, width=spec.width)

    @staticmethod
    def _radial_grid(spec: JobSpec, rs: RootSystem, th: ThetaSet, f: CompactFunction,
                     nodes: Optional[int] = None) -> RadialGrid:
        radius = f.support_radius or float(np.max(np.abs(np.concatenate([f.support_lo, f.support_hi]))))
        return RadialGrid.build(rs, th, radius, spec.radial_nodes or nodes)

    def _spectral_grid(self, spec: JobSpec, rs: RootSystem, m: MultiplicityFunction, th: ThetaSet,
                       f: CompactFunction, radial: RadialGrid) -> SpectralGrid:
        def weighted_transform(nodes: np.ndarray) -> np.ndarray:
            values = theta_transform_many(rs, m, th, f, radial, nodes)
            return values * plancherel_density_many(rs, m, th, nodes)

        spectral, _ = SpectralGrid.adaptive(rs, weighted_transform, spec.spectral_spacing, spec.spectral_cutoff)
        self._log('INFO', 'transform', f"Spectral grid: {len(spectral)} nodes, cutoff {spectral.cutoff:g}")
        return spectral

    def _kappa(self, spec: JobSpec, rs: RootSystem, m: MultiplicityFunction, th: ThetaSet,
               grids: Tuple[RadialGrid, SpectralGrid]) -> float:
        if spec.kappa is not None:
            return float(spec.kappa)
        reference = CompactFunction.bump(rs.rank, spec.radius, kind=spec.reference_bump, width=spec.reference_width,
                                         name=f"reference-{spec.reference_bump}(R={spec.radius:g},w={spec.reference_width:g})")
        return self._calibration_service.calibrate(rs, m, th, grids, reference, use_cache=spec.use_cache)

    # Subcommands

    def _run_eval(self, spec: JobSpec) -> JobResult:
        rs, m, th = self._system(spec)
        lams = spec.lambda_points(rs)
        Hs = spec.h_points(rs)
        quantity = spec.quantity

        if quantity in H_ONLY:
            values = delta_density(rs, m, Hs) if quantity == 'delta' else weyl_denominator(rs, Hs)
            records = [{'H': H, 'value': float(value)} for H, value in zip(Hs, values)]
        elif quantity in LAMBDA_ONLY:
            c_functions = {
                'c_plus': lambda lam: c_theta_plus(rs, m, th, lam),
                'c_minus': lambda lam: c_theta_minus(rs, m, th, lam),
                'c': lambda lam: c_theta(rs, m, th, lam),
                'c_hc': lambda lam: c_hc(rs, m, lam),
            }

            def evaluate_c(lam):
                value = c_functions[quantity](lam)
                return {'lambda': lam, 'value': value.value, 'is_pole': value.is_pole, 'pole_order': value.pole_order}

            records = self._map(evaluate_c, list(lams), spec.workers)
        else:
            def evaluate(node):
                lam, H = node
                if quantity == 'theta':
                    result = theta_spherical(rs, m, th, lam, H, spec.N, spec.method)
                    return {'lambda': lam, 'H': H, 'value': result.value, 'method': result.method,
                            'est_error': result.est_error}
                if quantity == 'ho':
                    result = hypergeometric_ho(rs, m, lam, H, spec.N)
                    return {'lambda': lam, 'H': H, 'value': result.value, 'method': result.method,
                            'est_error': result.est_error}
                if quantity == 'phi_hc':
                    series = phi_hc(rs, m, lam, H, spec.N)
                    return {'lambda': lam, 'H': H, 'value': series.value, 'method': 'series',
                            'est_error': series.tail_bound, 'terms_used': series.terms_used}
                if quantity == 'e_theta':
                    return {'lambda': lam, 'H': H, 'value': e_theta(rs, m, th, lam, H, spec.N)}
                result = regularized_theta(rs, m, th, lam, H, spec.N)
                return {'lambda': lam, 'H': H, 'value': result.value, 'method': result.method,
                        'regularization': result.regularization, 'est_error': result.est_error}

            nodes = [(lam, H) for lam in lams for H in Hs]
            records = self._map(evaluate, nodes, spec.workers)

        payload = {**self._header(rs, m, th), 'quantity': quantity, 'results': records}
        return JobResult(payload, records_frame(records, rs.rank))

    def _run_transform(self, spec: JobSpec) -> JobResult:
        rs, m, th = self._system(spec)
        f = self._function(spec, rs)
        lams = spec.lambda_points(rs)
        grid = self._radial_grid(spec, rs, th, f)
        coarse = RadialGrid.build(rs, th, float(grid.box_hi[0]), max(2, grid.order // 2))

        self._log('INFO', 'transform', f"Θ-transform of {f.name} on {len(grid.nodes)} radial nodes")
        values = theta_transform_many(rs, m, th, f, grid, lams)
        coarse_values = theta_transform_many(rs, m, th, f, coarse, lams, check=False)
        if not np.all(np.isfinite(values)):
            bad = lams[~np.isfinite(values)][0]
            raise PoleError('transform', 'λ at a pole of the Θ-spherical function', f"λ={bad}")

        records = [{'lambda': lam, 'value': value, 'est_error': float(abs(value - coarse_value))}
                   for lam, value, coarse_value in zip(lams, values, coarse_values)]
        payload = {**self._header(rs, m, th), 'function': {'name': f.name, 'smoothness': f.smoothness},
                   'radial_grid': grid.to_dict(), 'results': records}
        return JobResult(payload, records_frame(records, rs.rank))

    def _run_invert(self, spec: JobSpec) -> JobResult:
        rs, m, th = self._system(spec)
        f = self._function(spec, rs)
        Hs = spec.h_points(rs)
        radial = self._radial_grid(spec, rs, th, f)
        spectral = self._spectral_grid(spec, rs, m, th, f, radial)
        kappa = self._kappa(spec, rs, m, th, (radial, spectral))

        values = theta_transform_many(rs, m, th, f, radial, spectral.nodes)
        inverted = invert_many(rs, m, th, values, spectral, Hs, kappa)
        if inverted.skipped_nodes:
            self._log('WARNING', 'transform', f"{inverted.skipped_nodes} spectral nodes skipped")
        reference = f(Hs)
        records = [{'H': H, 'value': value, 'reference': float(np.real(ref))}
                   for H, value, ref in zip(Hs, inverted.values, reference)]
        payload = {**self._header(rs, m, th), 'kappa': kappa, 'function': {'name': f.name},
                   'radial_grid': radial.to_dict(), 'spectral_grid': spectral.to_dict(),
                   'skipped_nodes': inverted.skipped_nodes, 'results': records}
        return JobResult(payload, records_frame(records, rs.rank))

    def _run_roundtrip(self, spec: JobSpec) -> JobResult:
        rs, m, th = self._system(spec)
        f = self._function(spec, rs)
        radial = self._radial_grid(spec, rs, th, f)
        spectral = self._spectral_grid(spec, rs, m, th, f, radial)
        kappa = self._kappa(spec, rs, m, th, (radial, spectral))
        points = spec.h_points(rs) if (spec.H or spec.H_range) else None

        report = roundtrip(rs, m, th, (radial, spectral), f, kappa, points)
        self._log('INFO', 'transform',
                  f"Round trip of {f.name}: max relative error {report.max_relative_error:.3g}, "
                  f"energy ratio {report.energy_ratio:.6g}")
        records = [{'H': H, 'value': value, 'reference': float(np.real(ref))}
                   for H, value, ref in zip(report.points, report.reconstructed, report.reference)]
        payload = {
            **self._header(rs, m, th),
            'function': {'name': f.name, 'smoothness': f.smoothness},
            'calibration': {'kappa': kappa, 'source': 'given' if spec.kappa is not None else 'calibrated',
                            'reference': None if spec.kappa is not None else spec.reference_bump},
            'radial_grid': radial.to_dict(),
            'spectral_grid': spectral.to_dict(),
            'max_relative_error': report.max_relative_error,
            'energy_ratio': report.energy_ratio,
            'skipped_nodes': report.skipped_nodes,
            'results': records,
        }
        return JobResult(payload, records_frame(records, rs.rank))

    def _run_pw_check(self, spec: JobSpec) -> JobResult:
        rs, m, th = self._system(spec)
        f = self._function(spec, rs)
        nodes = PW_RANKONE_NODES if rs.rank == 1 else DEFAULT_QUADRATURE.radial_nodes
        grid = self._radial_grid(spec, rs, th, f, nodes)
        check_support(f, grid)
        check_invariance(rs, th, f, grid)

        def g(lam: np.ndarray) -> complex:
            return complex(theta_transform_many(rs, m, th, f, grid, np.atleast_2d(lam), check=False)[0])

        radius = f.support_radius or float(np.max(f.support_hi))
        body = ConvexBody.ball(radius)
        self._log('INFO', 'paleywiener', f"PW diagnostics for {f.name} against the ball of radius {radius:g}")
        report = pw_report(rs, m, th, g, body, spec.direction_vectors(rs), spec.ray_radii(radius), spec.nu_max,
                           seed=spec.seed)
        level = 'INFO' if report.verdict == 'pass' else 'WARNING'
        self._log(level, 'paleywiener', f"PW verdict: {report.verdict}")
        payload = {**self._header(rs, m, th), 'function': {'name': f.name, 'smoothness': f.smoothness},
                   'radial_grid': grid.to_dict(), 'report': report.to_dict()}
        return JobResult(payload)

    def _run_atlas(self, spec: JobSpec) -> JobResult:
        klass = spec.atlas_klass()
        records = query(klass, spec.sigma, spec.atlas_m, spec.atlas_rank)
        entries = []
        for record in records:
            entry = record.to_dict()
            try:
                entry['concrete'] = concretize(record, spec.n, spec.j).to_dict()
                entry['theta_hint'] = theta_hint(record, spec.n, spec.j).to_dict()
            except ThetaSphError as e:
                entry['concrete'] = None
                entry['theta_hint'] = None
                entry['note'] = str(e)
            entries.append(entry)
        payload = {
            'filters': {'class': klass, 'sigma': spec.sigma, 'multiplicity': spec.atlas_m, 'rank': spec.atlas_rank},
            'records': entries,
            'isomorphisms': [iso.to_dict() for iso in isomorphisms(klass)],
            'checksums': dict(CHECKSUMS),
        }
        frame = pd.DataFrame([{key: value for key, value in entry.items() if not isinstance(value, dict)}
                              for entry in entries])
        return JobResult(payload, frame)

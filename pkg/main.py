# main.py
import argparse
import sys
from typing import List, Optional

from container import container
from config.setup import initialize_application, load_config_file
from log_service.logger import LoggingService
from database.repository import CalibrationRepository
from analysis.errors import InvalidSpecError
from cli.jobs import EVAL_QUANTITIES, JobSpec
from cli.output import to_json
from cli.runner import EXIT_INVALID_SPEC, JobRunner
from analysis.transform import BUMP_KINDS


class JobArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as invalid jobs instead of exiting with argparse's status"""

    def error(self, message):
        raise InvalidSpecError('cli', 'invalid command line', message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--family', help="Root system family: A, B, C, D, E6, E7, E8, F4, G2")
    parser.add_argument('--rank', type=int)
    parser.add_argument('--m', help="Multiplicity, or long/short for two root lengths")
    parser.add_argument('--theta', help="Θ as 'full', 'empty' or comma separated simple root indices")
    parser.add_argument('--N', type=int, help="Series truncation height")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--output', help="Result file; stdout when omitted")
    parser.add_argument('--format', choices=('json', 'csv'))
    parser.add_argument('--workers', type=int)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--no-cache', dest='use_cache', action='store_const', const=False,
                        help="Recalibrate κ instead of reading the cache")


def _add_function(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--bump', choices=BUMP_KINDS)
    parser.add_argument('--radius', type=float, help="Support radius of the test function")
    parser.add_argument('--width', type=float)
    parser.add_argument('--samples', dest='samples_csv', help="CSV with H_1..H_r and value columns")
    parser.add_argument('--radial-nodes', type=int)
    parser.add_argument('--spectral-spacing', type=float)
    parser.add_argument('--spectral-cutoff', type=float)
    parser.add_argument('--kappa', type=float, help="Inversion constant; calibrated when omitted")
    parser.add_argument('--reference-bump', choices=BUMP_KINDS)
    parser.add_argument('--reference-width', type=float)


def _add_lambdas(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--lambda', dest='lambdas', action='append',
                        help="Spectral point, comma separated complex coordinates; use --lambda=-1+2i for signs")


def _add_points(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--H', action='append', help="Point of 𝔞, comma separated coordinates")
    parser.add_argument('--H-range', help="start:stop:count, rank one only")


def build_parser() -> argparse.ArgumentParser:
    parser = JobArgumentParser(prog='thetasph', description="Θ-spherical functions on root systems")
    parser.add_argument('--config', help="JSON file with job fields and numerics settings")
    subparsers = parser.add_subparsers(dest='subcommand', required=True, parser_class=JobArgumentParser)

    evaluate = subparsers.add_parser('eval', help="Evaluate φ_Θ, Φ, c-functions, δ or Δ")
    _add_common(evaluate)
    _add_lambdas(evaluate)
    _add_points(evaluate)
    evaluate.add_argument('--quantity', choices=EVAL_QUANTITIES)
    evaluate.add_argument('--method', help="auto, series, closed_form_complex or closed_form_rankone")
    _add_output(evaluate)

    transform = subparsers.add_parser('transform', help="Θ-spherical transform of a test function")
    _add_common(transform)
    _add_function(transform)
    _add_lambdas(transform)
    _add_output(transform)

    invert = subparsers.add_parser('invert', help="Inverse transform at points of 𝔞_Θ")
    _add_common(invert)
    _add_function(invert)
    _add_points(invert)
    _add_output(invert)

    roundtrip = subparsers.add_parser('roundtrip', help="Transform, invert and compare with κ calibration")
    _add_common(roundtrip)
    _add_function(roundtrip)
    _add_points(roundtrip)
    _add_output(roundtrip)

    pw_check = subparsers.add_parser('pw-check', help="Heuristic Paley-Wiener diagnostics")
    _add_common(pw_check)
    _add_function(pw_check)
    pw_check.add_argument('--direction', dest='directions', action='append')
    pw_check.add_argument('--ray', dest='radii', type=float, action='append', help="Ray parameter s")
    pw_check.add_argument('--nu-max', type=float)
    _add_output(pw_check)

    atlas = subparsers.add_parser('atlas', help="Query the symmetric pair tables")
    atlas.add_argument('--class', dest='atlas_class', help="riemannian, ncc or keps2")
    atlas.add_argument('--m', dest='atlas_m', type=int)
    atlas.add_argument('--sigma')
    atlas.add_argument('--rank', dest='atlas_rank', type=int)
    atlas.add_argument('--n', type=int)
    atlas.add_argument('--j', type=int)
    _add_output(atlas)
    return parser


def build_job(args: argparse.Namespace) -> JobSpec:
    """Job fields from the config file, overridden by explicit command line flags"""
    data = load_config_file(args.config)
    base = JobSpec.from_dict({**data, 'subcommand': args.subcommand})
    overrides = {key: value for key, value in vars(args).items() if key not in ('config', 'subcommand')}
    return base.merged(overrides)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        initialize_application(args.config)
        spec = build_job(args)
    except InvalidSpecError as e:
        sys.stderr.write(to_json({'error': e.to_dict(), 'exit_code': EXIT_INVALID_SPEC}))
        return EXIT_INVALID_SPEC
    except Exception as e:
        # configuration errors
        print(f"Error: {str(e)}", file=sys.stderr)
        return EXIT_INVALID_SPEC

    logging_service = container.resolve(LoggingService)
    logging_service.initialize()
    logging_service.log('INFO', 'main', f"Starting {spec.subcommand}")
    try:
        runner = container.resolve(JobRunner)
        runner.initialize()
        return runner.execute(spec)
    except Exception as e:
        logging_service.log('CRITICAL', 'main', f"Unexpected error: {str(e)}")
        raise
    finally:
        container.resolve(CalibrationRepository).close()
        logging_service.log('INFO', 'main', 'Shutdown complete')
        logging_service.shutdown()


if __name__ == "__main__":
    sys.exit(main())

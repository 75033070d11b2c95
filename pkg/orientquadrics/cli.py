"""
    orientquadrics.cli
    ------------------

    Command line driver. Exit codes: 0 success, 2 configuration error, 3 dataset error, 4 solver failure.
"""

import argparse
import json
import logging
import sys

import numpy as np

from .core import ConfigError, DatasetError, QuadricSLAMError, SolverError, TrialError
from .evaluation import evaluate
from .extensions.markup import load_dataset, load_estimate, rep, save_dataset
from .experiment import ExperimentConfig, render_report, run_trials, solve_file, sweep_sigma
from .graph import GraphConfig, SolverConfig
from .simulator import NoiseConfig, SceneConfig, TrajectoryConfig, simulate

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATASET = 3
EXIT_SOLVER = 4


def _sigma_list(text):
    try:
        return [float(value) for value in text.split(',') if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("Expected comma separated numbers, got '%s'." % text)


def _add_noise_arguments(parser):
    parser.add_argument('--translation-noise', type=float, default=0.05,
                        help='expected odometry translation error as fraction of the step length')
    parser.add_argument('--rotation-noise', type=float, default=0.15,
                        help='expected odometry rotation error as fraction of the step angle')
    parser.add_argument('--box-noise', type=float, default=4.0, help='box coordinate noise in pixels')
    parser.add_argument('--confusion-rate', type=float, default=0.0, help='probability of a wrong label')
    parser.add_argument('--objects', type=int, default=8)
    parser.add_argument('--poses', type=int, default=30)
    parser.add_argument('--pattern', choices=TrajectoryConfig.patterns, default='orbit')


def _add_solver_arguments(parser):
    parser.add_argument('--categories', help='category table (label<TAB>orientation)')
    parser.add_argument('--no-orientation-factors', dest='orientation', action='store_false')
    parser.add_argument('--sigma-orient', type=float, default=0.1, help='orientation factor sigma')
    parser.add_argument('--max-iterations', type=int, default=100)


def _add_trial_arguments(parser):
    parser.add_argument('--trajectories', type=int, default=1, help='number of simulated trajectories')
    parser.add_argument('--seeds', type=int, default=1, help='number of noise seeds per trajectory')
    parser.add_argument('--dataset', action='append', default=[], help='dataset file; repeatable')
    parser.add_argument('--workers', type=int, default=None)
    parser.add_argument('--out', dest='output_dir', default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog='orientquadrics',
                                     description='Quadric object SLAM with semantic orientation factors.')
    parser.add_argument('-v', '--verbose', action='count', default=0)
    parser.add_argument('-q', '--quiet', action='store_true')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    sim = commands.add_parser('simulate', help='generate a synthetic dataset')
    sim.add_argument('--seed', type=int, default=0, help='scene and trajectory seed')
    sim.add_argument('--noise-seed', type=int, default=0)
    _add_noise_arguments(sim)
    sim.add_argument('--out', required=True)

    solve = commands.add_parser('solve', help='optimize a dataset file')
    solve.add_argument('--dataset', required=True)
    _add_solver_arguments(solve)
    solve.add_argument('--out', dest='output_dir', required=True)

    ev = commands.add_parser('eval', help='evaluate an estimate against ground truth')
    ev.add_argument('--estimate', required=True)
    ev.add_argument('--truth', required=True)

    trials = commands.add_parser('trials', help='run simulated trials')
    _add_noise_arguments(trials)
    _add_solver_arguments(trials)
    _add_trial_arguments(trials)
    trials.add_argument('--compare', action='store_true', help='solve with and without orientation factors')

    sweep = commands.add_parser('sweep-sigma', help='mean ATE over orientation factor sigmas')
    sweep.add_argument('--sigmas', type=_sigma_list, required=True)
    _add_noise_arguments(sweep)
    _add_solver_arguments(sweep)
    _add_trial_arguments(sweep)

    report = commands.add_parser('report', help='re-emit stored trial results')
    report.add_argument('--in', dest='input_dir', required=True)
    report.add_argument('--format', choices=('csv', 'json'), default='csv')
    return parser


def configure_logging(verbose, quiet):
    level = logging.ERROR if quiet else (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 2)]
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def _noise(args, seed=0):
    return NoiseConfig(args.translation_noise, args.rotation_noise, args.box_noise, seed=seed,
                       confusion_rate=args.confusion_rate)


def experiment_config(args, mode):
    """ ExperimentConfig of a parsed ``trials``, ``sweep-sigma`` or ``solve`` command line. """
    graph = GraphConfig(use_orientation_factors=args.orientation, orientation_sigma=args.sigma_orient)
    solver = SolverConfig(max_iterations=args.max_iterations)
    if mode == 'solve':
        return ExperimentConfig('solve', datasets=[args.dataset], categories=args.categories, graph=graph,
                                solver=solver, output_dir=args.output_dir)
    return ExperimentConfig(mode, datasets=args.dataset, categories=args.categories, noise=_noise(args),
                            solver=solver, graph=graph, scene=SceneConfig(n_objects=args.objects),
                            trajectory=TrajectoryConfig(n_poses=args.poses, pattern=args.pattern),
                            trajectories=list(range(args.trajectories)), seeds=list(range(args.seeds)),
                            sigmas=getattr(args, 'sigmas', None), output_dir=args.output_dir,
                            workers=args.workers, compare=getattr(args, 'compare', False))


def _print(text, out):
    out.write(text if text.endswith('\n') else text + '\n')


def run(args, out=sys.stdout):
    if args.command == 'simulate':
        dataset = simulate(args.seed, _noise(args, args.noise_seed), SceneConfig(n_objects=args.objects),
                           TrajectoryConfig(n_poses=args.poses, pattern=args.pattern))
        save_dataset(dataset, args.out)
    elif args.command == 'solve':
        config = experiment_config(args, 'solve')
        _, report = solve_file(config, args.dataset, args.output_dir)
        if report is not None:
            _print(json.dumps(rep(report.metrics()), indent=1), out)
    elif args.command == 'eval':
        poses, quadrics, kinds = load_estimate(args.estimate)
        report = evaluate(quadrics, poses, load_dataset(args.truth), kinds)
        _print(json.dumps(rep(report.to_dict()), indent=1), out)
    elif args.command == 'trials':
        result = run_trials(experiment_config(args, 'trials'))
        _print(result.to_csv(), out)
    elif args.command == 'sweep-sigma':
        for sigma, mean, std in sweep_sigma(experiment_config(args, 'sweep-sigma')):
            _print('%g,%r,%r' % (sigma, mean, std), out)
    elif args.command == 'report':
        _print(render_report(args.input_dir, args.format), out)
    return EXIT_OK


def exit_code(err):
    """ Maps a library error onto the process exit code. """
    if isinstance(err, TrialError):
        err = err.cause
    if isinstance(err, ConfigError):
        return EXIT_CONFIG
    if isinstance(err, DatasetError):
        return EXIT_DATASET
    if isinstance(err, (SolverError, np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_SOLVER
    return 1


def main(argv=None, out=sys.stdout):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return run(args, out)
    except (QuadricSLAMError, np.linalg.LinAlgError, FloatingPointError) as err:
        _LOGGER.error("%s", err)
        return exit_code(err)
    except ValueError as err:
        # invalid argument values rejected by the configuration classes
        _LOGGER.error("%s", err)
        return EXIT_CONFIG


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())

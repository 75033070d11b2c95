"""
    orientquadrics.experiment
    -------------------------

    Runs batches of trials. A trial simulates (or loads) a dataset, builds and solves its factor graph
    with and/or without orientation factors and evaluates the estimate. Trials are independent and may
    run in worker processes; results are always collected in trial order.
"""

import copy
import hashlib
import io
import json
import logging
import os
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .core import ConfigError, QuadricSLAMError, TrialError, listify
from .evaluation import MetricReport, aggregate, evaluate, reports_to_csv
from .extensions.markup import canonical, estimate_to_markup, load_dataset, read_json, rep, write_json
from .graph import GraphConfig, SolverConfig, anchor_pose, integrate_odometry, optimize, prepare_problem
from .semantics import CategoryTable
from .simulator import NoiseConfig, SceneConfig, TrajectoryConfig, simulate

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

THREADS_VARIABLE = 'QUADRIC_ORIENT_THREADS'
STANDALONE = 'standalone'
ORIENTATION = 'orientation'
TRIAL_COLUMNS = ('trajectory', 'seed', 'variant', 'sigma', 'config_hash')


class ExperimentConfig(object):
    """ Everything that determines the outcome of an experiment.

    Attributes:
        mode (str): One of ``modes``.
        datasets (list): Dataset files; trials are simulated if empty.
        categories (str): Path of a category table, the shipped table if None.
        noise (NoiseConfig): Simulation noise; ``noise.seed`` is replaced by each trial seed.
        solver (SolverConfig): Optimizer settings.
        graph (GraphConfig): Factor settings, including the orientation factor toggle and sigma.
        scene (SceneConfig): Simulated scene size.
        trajectory (TrajectoryConfig): Simulated camera path.
        trajectories (list): Scene/trajectory seeds of simulated trials.
        seeds (list): Noise seeds of simulated trials.
        sigmas (list): Orientation factor sigmas of a sweep.
        output_dir (str): Where results are written; nothing is written if None.
        workers (int): Upper bound of worker processes, further capped by ``QUADRIC_ORIENT_THREADS``.
        compare (bool): Solve every dataset with and without orientation factors.
    """

    modes = ('simulate', 'solve', 'eval', 'sweep-sigma', 'report', 'trials')
    # keys which do not influence results and are not hashed
    _unhashed = ('output_dir', 'workers')

    def __init__(self, mode='trials', datasets=None, categories=None, noise=None, solver=None, graph=None,
                 scene=None, trajectory=None, trajectories=(0,), seeds=(0,), sigmas=None, output_dir=None,
                 workers=None, compare=False):
        if mode not in self.modes:
            raise ConfigError("Unknown mode '%s'." % mode)
        self.mode = mode
        self.datasets = listify(datasets) if datasets else []
        self.categories = categories
        self.noise = noise or NoiseConfig()
        self.solver = solver or SolverConfig()
        self.graph = graph or GraphConfig()
        self.scene = scene or SceneConfig()
        self.trajectory = trajectory or TrajectoryConfig()
        self.trajectories = [int(t) for t in listify(trajectories)]
        self.seeds = [int(s) for s in listify(seeds)]
        self.sigmas = [float(s) for s in listify(sigmas)] if sigmas is not None else []
        self.output_dir = output_dir
        self.workers = workers
        self.compare = bool(compare)
        self.validate()

    def validate(self):
        """ Raises ConfigError for unusable configurations. """
        if self.mode in ('solve', 'eval') and not self.datasets:
            raise ConfigError("Mode '%s' needs at least one dataset." % self.mode)
        for path in self.datasets + ([self.categories] if self.categories else []):
            if not os.path.isfile(path):
                raise ConfigError("File '%s' does not exist." % path)
        if self.mode == 'sweep-sigma':
            if not self.sigmas:
                raise ConfigError("A sigma sweep needs at least one sigma.")
            if any(sigma <= 0 for sigma in self.sigmas):
                raise ConfigError("Sigmas must be positive.")
        if not self.datasets and (not self.trajectories or not self.seeds):
            raise ConfigError("Simulated experiments need trajectories and seeds.")
        if self.workers is not None and int(self.workers) < 1:
            raise ConfigError("workers must be positive.")
        return self

    def category_table(self):
        return CategoryTable.load(self.categories) if self.categories else CategoryTable.default()

    def variants(self):
        if self.compare:
            return [STANDALONE, ORIENTATION]
        return [ORIENTATION if self.graph.use_orientation_factors else STANDALONE]

    def to_dict(self):
        return OrderedDict([
            ('mode', self.mode), ('datasets', list(self.datasets)), ('categories', self.categories),
            ('noise', self.noise.to_dict()), ('solver', self.solver.to_dict()), ('graph', self.graph.to_dict()),
            ('scene', self.scene.to_dict()), ('trajectory', self.trajectory.to_dict()),
            ('trajectories', list(self.trajectories)), ('seeds', list(self.seeds)), ('sigmas', list(self.sigmas)),
            ('output_dir', self.output_dir), ('workers', self.workers), ('compare', self.compare)])

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        for key, config_cls in (('noise', NoiseConfig), ('solver', SolverConfig), ('graph', GraphConfig),
                                ('scene', SceneConfig), ('trajectory', TrajectoryConfig)):
            if isinstance(data.get(key), dict):
                data[key] = config_cls.from_dict(data[key])
        return cls(**data)

    def config_hash(self):
        """ sha256 over the canonical JSON of all result relevant settings. """
        relevant = dict((key, value) for key, value in self.to_dict().items() if key not in self._unhashed)
        text = json.dumps(rep(relevant), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def derive(self, **kwargs):
        """ A copy with some attributes replaced. """
        derived = copy.deepcopy(self)
        for key, value in kwargs.items():
            setattr(derived, key, value)
        return derived.validate()


class Trial(object):
    """ Identification of a single trial. """

    __slots__ = ('trajectory', 'seed', 'path')

    def __init__(self, trajectory, seed, path=None):
        self.trajectory = trajectory
        self.seed = seed
        self.path = path

    def __repr__(self):
        return "<%s(%s, %s)>" % (type(self).__name__, self.trajectory, self.seed)


class ExperimentResult(object):
    """ Per trial reports and their aggregates.

    Attributes:
        reports (list): ``MetricReport`` per trial and variant, in trial order.
        aggregates (dict): Variant onto (mean ``MetricReport``, dict of standard deviations).
        config_hash (str): Hash of the generating configuration.
    """

    def __init__(self, reports, aggregates, config_hash):
        self.reports = reports
        self.aggregates = aggregates
        self.config_hash = config_hash

    def aggregate(self, variant=None):
        """ Mean report of ``variant``; the only (or the orientation) variant by default. """
        if variant is None:
            variant = ORIENTATION if ORIENTATION in self.aggregates else list(self.aggregates)[0]
        return self.aggregates[variant][0]

    def to_csv(self):
        return reports_to_csv(self.reports, TRIAL_COLUMNS, [mean for mean, _ in self.aggregates.values()])

    def to_dict(self):
        return OrderedDict([
            ('config_hash', self.config_hash),
            ('trials', [report.to_dict() for report in self.reports]),
            ('aggregates', OrderedDict((variant, OrderedDict([('mean', mean.to_dict()), ('std', stds)]))
                                       for variant, (mean, stds) in self.aggregates.items()))])

    def comparison_table(self):
        """ Rows of (metric, standalone mean, orientation mean) for paired experiments. """
        if set(self.aggregates) != {STANDALONE, ORIENTATION}:
            raise ValueError("Comparison needs both variants.")
        standalone = self.aggregates[STANDALONE][0].metrics()
        oriented = self.aggregates[ORIENTATION][0].metrics()
        return [(name, standalone[name], oriented[name]) for name in standalone]


def max_workers(config, n_jobs):
    """ Number of worker processes: bounded by the configuration, the environment and the job count. """
    limit = int(config.workers) if config.workers else (os.cpu_count() or 1)
    env = os.environ.get(THREADS_VARIABLE)
    if env:
        try:
            limit = min(limit, max(1, int(env)))
        except ValueError:
            raise ConfigError("%s must be an integer, got '%s'." % (THREADS_VARIABLE, env))
    return max(1, min(limit, n_jobs))


def trials_of(config):
    if config.datasets:
        return [Trial(index, None, path) for index, path in enumerate(config.datasets)]
    return [Trial(trajectory, seed) for trajectory in config.trajectories for seed in config.seeds]


def dataset_of(config, trial):
    """ The dataset of ``trial`` exactly as it would be read back from disk. """
    if trial.path:
        return load_dataset(trial.path)
    noise = config.noise.to_dict()
    noise['seed'] = trial.seed
    return canonical(simulate(trial.trajectory, NoiseConfig.from_dict(noise), config.scene, config.trajectory))


def solve_dataset(dataset, table, graph_config, solver_config):
    """ Builds, initializes and optimizes the problem of ``dataset``.
    Returns:
        tuple: (FactorGraph, optimized Values, SolveStats)
    """
    graph, initial = prepare_problem(dataset, table, graph_config)
    values, stats = optimize(graph, initial, solver_config)
    return graph, values, stats


def _graph_config(config, variant):
    graph = copy.copy(config.graph)
    graph.use_orientation_factors = variant == ORIENTATION
    return graph


def run_trial(config, trial, table=None):
    """ Solves and evaluates one trial for every configured variant.
    Returns:
        list: ``MetricReport`` per variant.
    Raises:
        TrialError: Wrapping any library or numerical failure, with the trial identification.
    """
    table = table or config.category_table()
    variant = None
    try:
        dataset = dataset_of(config, trial)
        seed = trial.seed if trial.seed is not None else dataset.metadata.get('noise_seed')
        odometry_poses = integrate_odometry(anchor_pose(dataset), dataset.odometry)
        reports = []
        for variant in config.variants():
            graph_config = _graph_config(config, variant)
            graph, values, stats = solve_dataset(dataset, table, graph_config, config.solver)
            kinds = dict((lid, target.kind) for lid, (_, target) in graph.labels.items())
            metadata = OrderedDict([('trajectory', trial.trajectory), ('seed', seed), ('variant', variant),
                                    ('sigma', graph_config.orientation_sigma if variant == ORIENTATION else None),
                                    ('config_hash', config.config_hash()), ('iterations', stats.iterations),
                                    ('termination', stats.termination)])
            reports.append(evaluate(values.quadrics(), values.poses(), dataset, kinds, odometry_poses, metadata))
            _LOGGER.info("Trial %s/%s (%s) finished: %s", trial.trajectory, seed, variant, reports[-1])
    except (QuadricSLAMError, np.linalg.LinAlgError, FloatingPointError) as err:
        raise TrialError(trial.trajectory, trial.seed if trial.seed is not None else -1, variant or '-', err)
    return reports


def _run_job(args):
    return run_trial(*args)


def run_trials(config):
    """ Runs all trials of ``config`` and aggregates them per variant.

    Writes ``trials.csv`` and ``trials.json`` into ``config.output_dir`` if it is set.

    Returns:
        ExperimentResult
    Raises:
        TrialError: For the first failing trial in trial order.
    """
    table = config.category_table()
    trials = trials_of(config)
    workers = max_workers(config, len(trials))
    _LOGGER.info("Running %d trials with %d worker(s)", len(trials), workers)
    jobs = [(config, trial, table) for trial in trials]
    if workers == 1:
        results = [_run_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_job, jobs))
    reports = [report for result in results for report in result]
    config_hash = config.config_hash()
    aggregates = OrderedDict()
    for variant in config.variants():
        selected = [report for report in reports if report.metadata['variant'] == variant]
        aggregates[variant] = aggregate(selected, OrderedDict([('trajectory', 'mean'), ('variant', variant),
                                                               ('config_hash', config_hash)]))
    result = ExperimentResult(reports, aggregates, config_hash)
    if config.output_dir:
        write_results(result, config.output_dir)
    return result


def _write_text(path, text):
    with io.open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)


def _ensure_dir(path):
    if not os.path.isdir(path):
        os.makedirs(path)


def write_results(result, output_dir):
    _ensure_dir(output_dir)
    _write_text(os.path.join(output_dir, 'trials.csv'), result.to_csv())
    write_json(rep(result.to_dict()), os.path.join(output_dir, 'trials.json'))
    if len(result.aggregates) == 2:
        rows = [['metric', STANDALONE, ORIENTATION]] + [[name, a, b] for name, a, b in result.comparison_table()]
        _write_text(os.path.join(output_dir, 'comparison.csv'), _csv_lines(rows, result.config_hash))
    _LOGGER.info("Wrote results of %d reports to %s", len(result.reports), output_dir)


def _csv_lines(rows, config_hash):
    lines = ['# config_hash=%s' % config_hash]
    for row in rows:
        lines.append(','.join('' if cell is None else (repr(float(cell)) if isinstance(cell, float) else str(cell))
                              for cell in row))
    return '\n'.join(lines) + '\n'


def sweep_sigma(config):
    """ Mean ATE per orientation factor sigma.

    Runs the trials once without orientation factors as baseline and once per sigma with them. Writes
    ``sweep.csv`` and ``sweep.svg`` into ``config.output_dir`` if set.

    Returns:
        list: (sigma, mean ATE, ATE standard deviation) rows in the configured sigma order.
    """
    from .extensions.plotting import plot_sigma_sweep

    if not config.sigmas:
        raise ConfigError("A sigma sweep needs at least one sigma.")
    base = config.derive(output_dir=None, compare=False)
    baseline = run_trials(base.derive(graph=_graph_config(base, STANDALONE))).aggregate(STANDALONE)
    rows = []
    for sigma in config.sigmas:
        graph = _graph_config(base, ORIENTATION)
        graph.orientation_sigma = sigma
        result = run_trials(base.derive(graph=graph))
        mean, stds = result.aggregates[ORIENTATION]
        rows.append((sigma, mean.ate_m, stds['ate_m']))
        _LOGGER.info("sigma=%g: mean ATE %.6f m", sigma, mean.ate_m)
    if config.output_dir:
        _ensure_dir(config.output_dir)
        table = [['sigma', 'mean_ate_m', 'std_ate_m']] + [list(row) for row in rows]
        table.append(['standalone', baseline.ate_m, None])
        _write_text(os.path.join(config.output_dir, 'sweep.csv'), _csv_lines(table, config.config_hash()))
        plot_sigma_sweep([row[0] for row in rows], [row[1] for row in rows],
                         os.path.join(config.output_dir, 'sweep.svg'), baseline=baseline.ate_m,
                         title='config %s' % config.config_hash()[:12])
    return rows


def solve_file(config, dataset_path, output_dir=None):
    """ Solves a single dataset file and writes ``estimate.json`` (and ``metrics.json`` if the file has
        ground truth) into ``output_dir``.
    Returns:
        tuple: (estimate markup, MetricReport or None)
    """
    dataset = load_dataset(dataset_path)
    graph, values, stats = solve_dataset(dataset, config.category_table(), config.graph, config.solver)
    metadata = OrderedDict([('dataset', os.path.basename(dataset_path)), ('config_hash', config.config_hash())])
    markup = estimate_to_markup(values, graph.labels, stats, metadata)
    report = None
    if dataset.landmarks_gt and dataset.poses_gt:
        kinds = dict((lid, target.kind) for lid, (_, target) in graph.labels.items())
        odometry_poses = integrate_odometry(anchor_pose(dataset), dataset.odometry)
        report = evaluate(values.quadrics(), values.poses(), dataset, kinds, odometry_poses, metadata)
    if output_dir:
        _ensure_dir(output_dir)
        write_json(markup, os.path.join(output_dir, 'estimate.json'))
        if report is not None:
            write_json(rep(report.to_dict()), os.path.join(output_dir, 'metrics.json'))
    return markup, report


def load_report(directory, name='trials.json'):
    """ Reads the trial reports written by ``run_trials``.
    Returns:
        tuple: (list of MetricReport, dict of aggregates markup)
    """
    data = read_json(os.path.join(directory, name))
    return [MetricReport.from_dict(entry) for entry in data['trials']], data.get('aggregates', {})


def render_report(directory, fmt='csv'):
    """ Re-emits the trials stored in ``directory`` as CSV or JSON text. """
    reports, aggregates = load_report(directory)
    if fmt == 'csv':
        means = [MetricReport.from_dict(entry['mean']) for entry in aggregates.values()]
        return reports_to_csv(reports, TRIAL_COLUMNS, means)
    if fmt == 'json':
        return json.dumps(rep(OrderedDict([('trials', [r.to_dict() for r in reports]),
                                           ('aggregates', aggregates)])), indent=1) + '\n'
    raise ConfigError("Unknown report format '%s'." % fmt)

"""
    orientquadrics.graph
    --------------------

    Assembles the factor graph of a dataset, computes an initial estimate (dead reckoning for poses and
    a tangent plane fit for quadrics) and solves the nonlinear least squares problem with
    Levenberg-Marquardt. Landmark blocks are eliminated first through a Schur complement.
"""

import logging
from collections import OrderedDict

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import (BehindCamera, ConfigError, DegenerateConic, DegenerateShape, InconsistentDataset,
                   InsufficientViews, QuadricSLAMError, SingularSystem, SolverError)
from .factors import (DEFAULT_JACOBIAN_STEP, BoxFactor, NoiseModel, OdometryFactor, OrientationFactor,
                      PriorFactor)
from .geometry import ConstrainedDualQuadric, Pose, symmetric_eigen
from .semantics import (DEFAULT_VARIANCE_THRESHOLD, CategoryTable, aggregate_label, is_truncated,
                        orientation_target, reject_high_variance)

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

POSE_PREFIX = 'x'
QUADRIC_PREFIX = 'q'
#: Radii (meters) of quadrics initialized by triangulating their centroid.
DEFAULT_FALLBACK_RADII = (0.2, 0.2, 0.2)
MIN_VIEWS = 3
EIGENVALUE_CLAMP = 1e-4
MAX_INITIAL_RADIUS = 5.0


def pose_key(index):
    return '%s%d' % (POSE_PREFIX, index)


def quadric_key(landmark_id):
    return '%s%d' % (QUADRIC_PREFIX, landmark_id)


def key_index(key):
    return int(key[1:])


def _key_order(key):
    return key[0], key_index(key)


class GraphConfig(object):
    """ Controls which factors are created and their noise.

    Attributes:
        use_orientation_factors (bool): Add orientation factors for landmarks with an assigned class.
        orientation_sigma (float): Standard deviation of orientation factors.
        box_sigma (float): Standard deviation (pixels) of every box coordinate.
        prior_sigma (float): Standard deviation of the prior on the first pose.
        variance_threshold (float): Tracks whose box width or height deviates this much (pixels) are dropped.
        drop_truncated (bool): Skip detections touching the image border.
        truncation_margin (float): Border width in pixels used by ``drop_truncated``.
        odometry_floor (float): Lower bound of odometry standard deviations (radians and meters).
    """

    def __init__(self, use_orientation_factors=True, orientation_sigma=1e-1, box_sigma=4.0, prior_sigma=1e-6,
                 variance_threshold=DEFAULT_VARIANCE_THRESHOLD, drop_truncated=True, truncation_margin=1.0,
                 odometry_floor=1e-3):
        for name, value in (('orientation_sigma', orientation_sigma), ('box_sigma', box_sigma),
                            ('prior_sigma', prior_sigma), ('variance_threshold', variance_threshold),
                            ('odometry_floor', odometry_floor)):
            if not value > 0:
                raise ConfigError("%s must be positive, got %s." % (name, value))
        if truncation_margin < 0:
            raise ConfigError("truncation_margin must not be negative.")
        self.use_orientation_factors = bool(use_orientation_factors)
        self.orientation_sigma = float(orientation_sigma)
        self.box_sigma = float(box_sigma)
        self.prior_sigma = float(prior_sigma)
        self.variance_threshold = float(variance_threshold)
        self.drop_truncated = bool(drop_truncated)
        self.truncation_margin = float(truncation_margin)
        self.odometry_floor = float(odometry_floor)

    def to_dict(self):
        return dict(vars(self))

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class SolverConfig(object):
    """ Levenberg-Marquardt settings.

    Attributes:
        max_iterations (int): Upper bound of linearizations.
        initial_damping (float): Initial lambda.
        damping_scale (float): Lambda is divided by this on accepted and multiplied on rejected steps.
        relative_tolerance (float): Stop when an accepted step decreases the error by less than this fraction.
        absolute_tolerance (float): Stop when the error drops below this value.
        jacobian_step (float): Central difference step on tangent coordinates.
        degenerate_policy (str): 'zero' disables degenerate factors for an iteration, 'raise' propagates.
        max_damping (float): Lambda at which the solver gives up improving.
        robust_kernel (None): Placeholder; only None (plain least squares) is supported.
    """

    policies = ('zero', 'raise')

    def __init__(self, max_iterations=100, initial_damping=1e-3, damping_scale=10.0, relative_tolerance=1e-6,
                 absolute_tolerance=1e-12, jacobian_step=DEFAULT_JACOBIAN_STEP, degenerate_policy='zero',
                 max_damping=1e10, robust_kernel=None):
        if max_iterations < 1:
            raise ConfigError("max_iterations must be positive.")
        if not (initial_damping > 0 and damping_scale > 1 and jacobian_step > 0 and max_damping > initial_damping):
            raise ConfigError("Damping values and the Jacobian step must be positive.")
        if not 0 < relative_tolerance < 1 or absolute_tolerance < 0:
            raise ConfigError("relative_tolerance must lie in (0, 1).")
        if degenerate_policy not in self.policies:
            raise ConfigError("Unknown degenerate factor policy '%s'." % degenerate_policy)
        if robust_kernel not in (None, 'none'):
            raise ConfigError("Robust kernels are not supported.")
        self.max_iterations = int(max_iterations)
        self.initial_damping = float(initial_damping)
        self.damping_scale = float(damping_scale)
        self.relative_tolerance = float(relative_tolerance)
        self.absolute_tolerance = float(absolute_tolerance)
        self.jacobian_step = float(jacobian_step)
        self.degenerate_policy = degenerate_policy
        self.max_damping = float(max_damping)
        self.robust_kernel = None

    def to_dict(self):
        return dict(vars(self))

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class Values(object):
    """ Assignment of poses and quadrics to variable keys. """

    def __init__(self, items=None):
        self._values = OrderedDict()
        for key, value in (items or []):
            self.insert(key, value)

    def insert(self, key, value):
        self._values[key] = value

    def __getitem__(self, key):
        return self._values[key]

    def __contains__(self, key):
        return key in self._values

    def __len__(self):
        return len(self._values)

    def keys(self):
        return list(self._values.keys())

    def items(self):
        return list(self._values.items())

    def poses(self):
        """ Poses ordered by index. """
        keys = sorted((k for k in self._values if k.startswith(POSE_PREFIX)), key=key_index)
        return [self._values[key] for key in keys]

    def quadrics(self):
        """ Dict of landmark id onto quadric. """
        return OrderedDict((key_index(k), v) for k, v in sorted(self._values.items(), key=lambda kv: _key_order(kv[0]))
                           if k.startswith(QUADRIC_PREFIX))

    def copy(self):
        return Values(self.items())

    def retract(self, delta, ordering):
        """ New values with the tangent vector ``delta`` applied along ``ordering``. """
        result = self.copy()
        offset = 0
        for key in ordering:
            value = self._values[key]
            result.insert(key, value.retract(delta[offset:offset + value.dim]))
            offset += value.dim
        return result


class FactorGraph(object):
    """ The optimization problem.

    Attributes:
        priors (list): ``PriorFactor`` instances.
        odometry (list): ``OdometryFactor`` instances.
        boxes (list): ``BoxFactor`` instances.
        orientations (list): ``OrientationFactor`` instances, at most one per landmark.
        labels (dict): Landmark id onto (label, OrientationTarget) applied during construction.
    """

    def __init__(self):
        self.priors = []
        self.odometry = []
        self.boxes = []
        self.orientations = []
        self.labels = OrderedDict()

    def add(self, factor):
        if factor.kind == 'prior':
            self.priors.append(factor)
        elif factor.kind == 'odometry':
            self.odometry.append(factor)
        elif factor.kind == 'box':
            self.boxes.append(factor)
        elif factor.kind == 'orientation':
            if any(other.keys == factor.keys for other in self.orientations):
                raise InconsistentDataset("Landmark %s already has an orientation factor." % factor.keys[0])
            self.orientations.append(factor)
        else:
            raise ValueError("Unknown factor kind '%s'." % factor.kind)
        return factor

    def factors(self):
        return self.priors + self.odometry + self.boxes + self.orientations

    def keys(self):
        return sorted(set(key for factor in self.factors() for key in factor.keys), key=_key_order)

    def pose_keys(self):
        return [key for key in self.keys() if key.startswith(POSE_PREFIX)]

    def quadric_keys(self):
        return [key for key in self.keys() if key.startswith(QUADRIC_PREFIX)]

    def ordering(self):
        """ Elimination ordering: all landmarks before all poses. """
        return self.quadric_keys() + self.pose_keys()

    def without_landmarks(self, landmark_ids):
        """ Copy of the graph with all factors of the given landmarks removed. """
        removed = set(quadric_key(lid) for lid in landmark_ids)
        graph = FactorGraph()
        for factor in self.factors():
            if not removed.intersection(factor.keys):
                graph.add(factor)
        graph.labels = OrderedDict((lid, lab) for lid, lab in self.labels.items() if lid not in landmark_ids)
        return graph

    def counts(self):
        return {'prior': len(self.priors), 'odometry': len(self.odometry), 'box': len(self.boxes),
                'orientation': len(self.orientations)}

    def __len__(self):
        return len(self.priors) + len(self.odometry) + len(self.boxes) + len(self.orientations)

    def __repr__(self):
        return "<%s(%s)@%s>" % (type(self).__name__, self.counts(), id(self))


class SolveStats(object):
    """ Outcome of an optimization.

    Attributes:
        iterations (int): Number of linearizations.
        initial_error (float): Objective at the initial values.
        final_error (float): Objective at the returned values.
        termination (str): 'converged', 'max_iterations' or 'damping_limit'.
        errors (list): Objective after every accepted step, starting with the initial error.
    """

    def __init__(self, iterations, initial_error, final_error, termination, errors):
        self.iterations = iterations
        self.initial_error = initial_error
        self.final_error = final_error
        self.termination = termination
        self.errors = errors

    def to_dict(self):
        return dict(vars(self))

    def __repr__(self):
        return "<%s(%d iterations, %.6g -> %.6g, %s)>" % (type(self).__name__, self.iterations, self.initial_error,
                                                          self.final_error, self.termination)


def anchor_pose(dataset):
    """ Value the first pose is pinned to; the ground truth when available. """
    return dataset.poses_gt[0] if dataset.poses_gt else Pose.identity()


def integrate_odometry(anchor, odometry):
    """ Dead reckoning: chains relative motions starting at ``anchor``. """
    poses = [anchor]
    for motion in odometry:
        poses.append(poses[-1].compose(motion))
    return poses


def _odometry_noise(motion, noise, config):
    rot_sigma, trans_sigma = noise.step_sigmas(motion)
    rot_sigma = max(rot_sigma, config.odometry_floor)
    trans_sigma = max(trans_sigma, config.odometry_floor)
    return NoiseModel([rot_sigma] * 3 + [trans_sigma] * 3)


def build_graph(dataset, category_table=None, config=None):
    """ Creates the factor graph of ``dataset``.

    Adds a prior on the first pose, one odometry factor per step, one box factor per accepted detection
    and one orientation factor per landmark whose aggregated label has an assigned orientation.
    Tracks with a high box variance are dropped completely.

    Raises:
        InconsistentDataset: For dangling references.
    """
    config = config or GraphConfig()
    table = category_table or CategoryTable.default()
    dataset.validate()
    graph = FactorGraph()
    graph.add(PriorFactor(pose_key(0), anchor_pose(dataset), NoiseModel.isotropic(6, config.prior_sigma)))
    for index, motion in enumerate(dataset.odometry):
        graph.add(OdometryFactor(pose_key(index), pose_key(index + 1), motion,
                                 _odometry_noise(motion, dataset.noise, config)))
    box_noise = NoiseModel.isotropic(4, config.box_sigma)
    orientation_noise = NoiseModel.isotropic(1, config.orientation_sigma)
    for track in dataset.tracks:
        if not track.detections:
            _LOGGER.debug("Track %d has no detections, skipped.", track.landmark_id)
            continue
        if reject_high_variance(track, config.variance_threshold):
            _LOGGER.info("Track %d rejected: box size deviation >= %.1f px.", track.landmark_id,
                         config.variance_threshold)
            continue
        key = quadric_key(track.landmark_id)
        detections = [det for det in track.detections
                      if not (config.drop_truncated and is_truncated(det.box, dataset.intrinsics,
                                                                     config.truncation_margin))]
        if not detections:
            _LOGGER.info("Track %d dropped: all detections truncated.", track.landmark_id)
            continue
        for det in detections:
            graph.add(BoxFactor(pose_key(det.pose_index), key, det.box, dataset.intrinsics, box_noise))
        label, _ = aggregate_label(track)
        target = orientation_target(label, table)
        graph.labels[track.landmark_id] = (label, target)
        _LOGGER.info("Landmark %d labelled '%s', orientation %s.", track.landmark_id, label, target.kind.value)
        if config.use_orientation_factors and target.is_assigned:
            graph.add(OrientationFactor(key, target, orientation_noise))
    _LOGGER.info("Built factor graph %s", graph.counts())
    return graph


def _box_lines(box):
    return [np.array([1.0, 0.0, -box.xmin]), np.array([1.0, 0.0, -box.xmax]),
            np.array([0.0, 1.0, -box.ymin]), np.array([0.0, 1.0, -box.ymax])]


def _camera_matrix(pose, intrinsics):
    rot_wc = pose.rotation.T
    return intrinsics.matrix().dot(np.column_stack((rot_wc, -rot_wc.dot(pose.translation))))


_UPPER = [(i, j) for i in range(4) for j in range(i, 4)]


def _fit_dual_quadric(observations, intrinsics):
    rows = []
    for pose, box in observations:
        projection = _camera_matrix(pose, intrinsics)
        for line in _box_lines(box):
            plane = projection.T.dot(line)
            plane /= np.linalg.norm(plane)
            rows.append([plane[i] * plane[j] * (1.0 if i == j else 2.0) for i, j in _UPPER])
    _, _, vt = np.linalg.svd(np.array(rows))
    dual = np.zeros((4, 4))
    for value, (i, j) in zip(vt[-1], _UPPER):
        dual[i, j] = dual[j, i] = value
    if abs(dual[3, 3]) < 1e-12:
        raise SolverError("Fitted dual quadric is not a closed surface.")
    dual /= -dual[3, 3]
    centroid = -dual[:3, 3]
    values, vectors = symmetric_eigen(dual[:3, :3] + np.outer(centroid, centroid))
    if np.linalg.det(vectors) < 0:
        vectors[:, 2] = -vectors[:, 2]
    radii = np.sqrt(np.clip(values, EIGENVALUE_CLAMP, None))
    quadric = ConstrainedDualQuadric(vectors, centroid, radii)
    for pose, _ in observations:
        if pose.transform_to(centroid)[2] <= 0:
            raise SolverError("Fitted quadric lies behind an observing camera.")
    if np.any(radii > MAX_INITIAL_RADIUS):
        raise SolverError("Fitted quadric is implausibly large.")
    return quadric


def triangulate_centroid(observations, intrinsics):
    """ Least squares intersection of the rays through the box centers. """
    k_inv = np.linalg.inv(intrinsics.matrix())
    system = np.zeros((3, 3))
    rhs = np.zeros(3)
    for pose, box in observations:
        direction = pose.rotation.dot(k_inv.dot(np.append(box.center(), 1.0)))
        direction /= np.linalg.norm(direction)
        projector = np.eye(3) - np.outer(direction, direction)
        system += projector
        rhs += projector.dot(pose.translation)
    try:
        return np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        raise InsufficientViews("Viewing rays are parallel, centroid can not be triangulated.")


def initialize_quadric(observations, intrinsics):
    """ Initial quadric from detections of one landmark.

    Each box edge back-projects to a plane tangent to the quadric. The 10 entries of the symmetric dual
    quadric are solved from these planes by linear least squares and projected onto the nearest
    ellipsoid. If that fails the centroid is triangulated and ``DEFAULT_FALLBACK_RADII`` are used.

    Args:
        observations (list): (Pose, BoundingBox2D) pairs.
        intrinsics (CameraIntrinsics): Camera model.
    Raises:
        InsufficientViews: If fewer than three distinct poses observe the landmark.
    """
    distinct = set(pose.matrix().tobytes() for pose, _ in observations)
    if len(observations) < MIN_VIEWS or len(distinct) < MIN_VIEWS:
        raise InsufficientViews("Need %d views, got %d." % (MIN_VIEWS, len(distinct)))
    try:
        return _fit_dual_quadric(observations, intrinsics)
    except (QuadricSLAMError, np.linalg.LinAlgError, ValueError) as err:
        _LOGGER.warning("Tangent plane initialization failed (%s), triangulating centroid.", err)
    return ConstrainedDualQuadric(np.eye(3), triangulate_centroid(observations, intrinsics), DEFAULT_FALLBACK_RADII)


def initialize_quadrics(poses, detections, intrinsics):
    """ Initial quadrics for several landmarks.
    Args:
        poses (list): Pose estimates indexed by pose index.
        detections (dict): Landmark id onto a list of (pose index, BoundingBox2D).
        intrinsics (CameraIntrinsics): Camera model.
    Returns:
        tuple: (dict of landmark id onto quadric, list of uninitializable landmark ids)
    """
    quadrics = OrderedDict()
    failed = []
    for landmark_id in sorted(detections):
        observations = [(poses[index], box) for index, box in detections[landmark_id]]
        try:
            quadrics[landmark_id] = initialize_quadric(observations, intrinsics)
        except InsufficientViews as err:
            _LOGGER.warning("Landmark %d can not be initialized: %s", landmark_id, err)
            failed.append(landmark_id)
    return quadrics, failed


def graph_detections(graph):
    """ Detections used by the box factors of ``graph`` grouped by landmark id. """
    detections = OrderedDict()
    for factor in graph.boxes:
        detections.setdefault(key_index(factor.keys[1]), []).append((key_index(factor.keys[0]), factor.measured))
    return detections


def prepare_problem(dataset, category_table=None, config=None):
    """ Builds the graph, computes initial values and drops landmarks that can not be initialized.
    Returns:
        tuple: (FactorGraph, Values)
    """
    graph = build_graph(dataset, category_table, config)
    poses = integrate_odometry(anchor_pose(dataset), dataset.odometry)
    intrinsics = dataset.intrinsics
    quadrics, failed = initialize_quadrics(poses, graph_detections(graph), intrinsics)
    if failed:
        graph = graph.without_landmarks(failed)
    values = Values()
    for index, pose in enumerate(poses):
        values.insert(pose_key(index), pose)
    for landmark_id, quadric in quadrics.items():
        values.insert(quadric_key(landmark_id), quadric)
    return graph, values


def total_error(graph, values, policy='zero'):
    """ Sum of whitened squared residuals of all factors. """
    return float(sum(factor.error(values, policy) for factor in graph.factors()))


def active_factors(graph, values):
    """ Positions (in ``graph.factors()``) of the factors that are not degenerate at ``values``. """
    return frozenset(idx for idx, factor in enumerate(graph.factors()) if factor.is_active(values))


def _step_error(graph, values, active, policy):
    # factors active at the linearization point must stay active at the candidate
    return float(sum(factor.error(values, 'raise' if idx in active else policy)
                     for idx, factor in enumerate(graph.factors())))


def _layout(ordering, values):
    offsets = OrderedDict()
    offset = 0
    for key in ordering:
        offsets[key] = (offset, values[key].dim)
        offset += values[key].dim
    return offsets, offset


def linearize(graph, values, ordering=None, step=DEFAULT_JACOBIAN_STEP, policy='zero'):
    """ Stacked whitened Jacobian and residual of all factors.
    Returns:
        tuple: (Jacobian, residual, ordering) where columns follow ``ordering``.
    """
    ordering = graph.ordering() if ordering is None else ordering
    offsets, size = _layout(ordering, values)
    blocks = []
    residuals = []
    for factor in graph.factors():
        residual, jacobian = factor.linearize(values, step, policy)
        rows = np.zeros((residual.size, size))
        column = 0
        for key in factor.keys:
            start, dim = offsets[key]
            rows[:, start:start + dim] = jacobian[:, column:column + dim]
            column += dim
        blocks.append(rows)
        residuals.append(residual)
    return np.vstack(blocks), np.concatenate(residuals), ordering


def _solve_damped(hessian, gradient, damping, landmark_size):
    """ Solves ``(H + lambda D) delta = -g`` eliminating the block diagonal landmark part first. """
    scale = np.clip(np.diag(hessian), 1e-6, None)
    system = hessian + damping * np.diag(scale)
    rhs = -gradient
    if landmark_size == 0 or landmark_size == system.shape[0]:
        if landmark_size == 0:
            return cho_solve(cho_factor(system), rhs)
        return _solve_block_diagonal(system, rhs, landmark_size)
    ll = system[:landmark_size, :landmark_size]
    lp = system[:landmark_size, landmark_size:]
    pp = system[landmark_size:, landmark_size:]
    factors = [cho_factor(ll[start:start + 9, start:start + 9]) for start in range(0, landmark_size, 9)]

    def ll_solve(mat):
        return np.concatenate([cho_solve(fac, mat[start:start + 9]) for fac, start
                               in zip(factors, range(0, landmark_size, 9))])

    ll_inv_lp = ll_solve(lp)
    ll_inv_rl = ll_solve(rhs[:landmark_size])
    schur = pp - lp.T.dot(ll_inv_lp)
    delta_p = cho_solve(cho_factor(0.5 * (schur + schur.T)), rhs[landmark_size:] - lp.T.dot(ll_inv_rl))
    delta_l = ll_inv_rl - ll_inv_lp.dot(delta_p)
    return np.concatenate((delta_l, delta_p))


def _solve_block_diagonal(system, rhs, size):
    return np.concatenate([cho_solve(cho_factor(system[start:start + 9, start:start + 9]), rhs[start:start + 9])
                           for start in range(0, size, 9)])


def optimize(graph, initial, config=None):
    """ Levenberg-Marquardt minimization of ``total_error``.

    A candidate step is accepted only if it lowers the error without switching off a factor that was
    active at the linearization point.

    Args:
        graph (FactorGraph): The problem.
        initial (Values): Complete initial assignment.
        config (SolverConfig): Solver settings.
    Returns:
        tuple: (Values, SolveStats)
    Raises:
        InconsistentDataset: If ``initial`` misses a variable of ``graph``.
        SingularSystem: If the damped normal equations can not be solved at any damping level.
    """
    config = config or SolverConfig()
    ordering = graph.ordering()
    missing = [key for key in ordering if key not in initial]
    if missing:
        raise InconsistentDataset("Initial values miss keys %s." % missing)
    landmark_size = sum(initial[key].dim for key in ordering if key.startswith(QUADRIC_PREFIX))
    values = initial
    error = total_error(graph, values, config.degenerate_policy)
    initial_error = error
    errors = [error]
    damping = config.initial_damping
    termination = 'max_iterations'
    iterations = 0
    if error <= config.absolute_tolerance:
        termination = 'converged'
    while termination == 'max_iterations' and iterations < config.max_iterations:
        iterations += 1
        jacobian, residual, _ = linearize(graph, values, ordering, config.jacobian_step, config.degenerate_policy)
        active = active_factors(graph, values)
        hessian = jacobian.T.dot(jacobian)
        gradient = jacobian.T.dot(residual)
        solved_once = False
        while True:
            try:
                delta = _solve_damped(hessian, gradient, damping, landmark_size)
                solved_once = True
                candidate = values.retract(delta, ordering)
                new_error = _step_error(graph, candidate, active, config.degenerate_policy)
            except (LinAlgError, ValueError) as err:
                _LOGGER.debug("Damped system not solvable at lambda=%g: %s", damping, err)
                new_error = np.inf
            except (BehindCamera, DegenerateConic, DegenerateShape) as err:
                _LOGGER.debug("Step at lambda=%g switches off an active factor: %s", damping, err)
                new_error = np.inf
            if np.isfinite(new_error) and new_error < error:
                break
            damping *= config.damping_scale
            if damping > config.max_damping:
                if not solved_once:
                    raise SingularSystem("Normal equations are singular even with lambda=%g." % damping)
                termination = 'damping_limit'
                _LOGGER.warning("Stopping after %d iterations, damping reached %g.", iterations, damping)
                break
        if termination == 'damping_limit':
            break
        decrease = (error - new_error) / error
        values, error = candidate, new_error
        errors.append(error)
        damping = max(damping / config.damping_scale, 1e-12)
        _LOGGER.debug("Iteration %d: error %.9g, lambda %g", iterations, error, damping)
        if decrease < config.relative_tolerance or error <= config.absolute_tolerance:
            termination = 'converged'
    stats = SolveStats(iterations, initial_error, error, termination, errors)
    _LOGGER.info("Optimization finished: %s", stats)
    return values, stats

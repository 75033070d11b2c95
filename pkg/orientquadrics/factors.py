"""
    orientquadrics.factors
    ----------------------

    Residuals, noise models and factor types of the quadric SLAM problem: a prior pinning the first
    pose, odometry factors between consecutive poses, bounding box factors between a pose and a
    quadric and unary orientation factors on quadrics.
"""

import logging
from enum import Enum

import numpy as np
from six import string_types

from .core import BehindCamera, DegenerateConic, DegenerateShape, frozen_array
from .geometry import Pose, apply_motion, cosine_similarity_z, predicted_box

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

#: Expected norm of a 3D standard normal sample, E|n| = 2 * sqrt(2 / pi).
MEAN_NORM_3D = 2.0 * np.sqrt(2.0 / np.pi)

DEFAULT_BOX_SIGMA = 4.0
DEFAULT_ORIENTATION_SIGMA = 1e-1
DEFAULT_PRIOR_SIGMA = 1e-6
DEFAULT_JACOBIAN_STEP = 1e-6


class NoiseModel(object):
    """ Diagonal Gaussian noise model given by per dimension standard deviations. """

    __slots__ = ('_sigmas', '_inverse')

    def __init__(self, sigmas):
        sigmas = frozen_array(np.atleast_1d(sigmas))
        if sigmas.ndim != 1 or np.any(sigmas <= 0):
            raise ValueError("Noise standard deviations must be positive, got %s." % sigmas.tolist())
        self._sigmas = sigmas
        self._inverse = frozen_array(1.0 / sigmas)

    @classmethod
    def isotropic(cls, dim, sigma):
        return cls(np.full(dim, float(sigma)))

    @property
    def sigmas(self):
        return self._sigmas

    @property
    def dim(self):
        return self._sigmas.size

    def whiten(self, residual):
        return np.asarray(residual) * self._inverse

    def whiten_jacobian(self, jacobian):
        return np.asarray(jacobian) * self._inverse[:, None]

    def squared_mahalanobis(self, residual):
        """ ``r^T Sigma^-1 r`` of a residual. """
        whitened = self.whiten(residual)
        return float(whitened.dot(whitened))

    def __repr__(self):
        return "<%s(%s)>" % (type(self).__name__, self._sigmas.tolist())


def step_sigmas(motion, translation_fraction, rotation_fraction, rotation_floor=np.radians(0.15)):
    """ Per axis standard deviations which give an expected error of the configured fractions of a
        relative motion.
    Args:
        motion (Pose): Relative motion of one step.
        translation_fraction (float): Expected translation error relative to the step length.
        rotation_fraction (float): Expected rotation error relative to the step rotation angle.
        rotation_floor (float): Lower bound (radians) of the expected rotation error.
    Returns:
        tuple: (rotation sigma in radians, translation sigma in meters)
    """
    angle = np.linalg.norm(Pose.logmap(motion)[:3])
    length = np.linalg.norm(motion.translation)
    rot_sigma = max(rotation_fraction * angle, rotation_floor if rotation_fraction > 0 else 0.0) / MEAN_NORM_3D
    return rot_sigma, translation_fraction * length / MEAN_NORM_3D


class Orientation(Enum):
    HORIZONTAL = 'horizontal'
    VERTICAL = 'vertical'
    UNASSIGNED = 'unassigned'


class OrientationTarget(object):
    """ The expected global orientation of a landmark derived from its semantic class.

    Attributes:
        kind (Orientation): Horizontal, vertical or unassigned.
        target (float): 0 for horizontal, 1 for vertical and None if unassigned.
    """

    _targets = {Orientation.HORIZONTAL: 0.0, Orientation.VERTICAL: 1.0, Orientation.UNASSIGNED: None}

    __slots__ = ('kind',)

    def __init__(self, kind=Orientation.UNASSIGNED):
        if isinstance(kind, string_types):
            try:
                kind = Orientation(kind.strip().lower())
            except ValueError:
                raise ValueError("Unknown orientation '%s'." % kind)
        self.kind = kind

    @classmethod
    def horizontal(cls):
        return cls(Orientation.HORIZONTAL)

    @classmethod
    def vertical(cls):
        return cls(Orientation.VERTICAL)

    @classmethod
    def unassigned(cls):
        return cls(Orientation.UNASSIGNED)

    @property
    def target(self):
        return self._targets[self.kind]

    @property
    def is_assigned(self):
        return self.kind is not Orientation.UNASSIGNED

    def __eq__(self, other):
        return isinstance(other, OrientationTarget) and self.kind is other.kind

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return "<%s(%s)>" % (type(self).__name__, self.kind.value)


def odometry_residual(x_i, x_next, u_i):
    """ Log map coordinates of ``inverse(x_next) * f(x_i, u_i)``; zero iff the prediction matches. """
    return Pose.logmap(x_next.inverse().compose(apply_motion(x_i, u_i)))


def prior_residual(pose, prior):
    return Pose.logmap(prior.inverse().compose(pose))


def bbox_residual(x_i, q_j, b_ij, intrinsics):
    """ Measured minus predicted box in pixels, ordered (xmin, ymin, xmax, ymax).
    Raises:
        BehindCamera, DegenerateConic: If the quadric can not be projected from ``x_i``.
    """
    return b_ij.as_array() - predicted_box(x_i, intrinsics, q_j).as_array()


def orientation_residual(q_j, target):
    """ Scalar residual ``g(l) - c`` with ``g`` the target value of the landmark class.
    Raises:
        ValueError: If ``target`` is unassigned.
        DegenerateShape: If the major axis of ``q_j`` is undefined.
    """
    if not target.is_assigned:
        raise ValueError("Unassigned orientation targets have no residual.")
    return target.target - cosine_similarity_z(q_j)


def _retract(variable, delta):
    if isinstance(variable, np.ndarray):
        return variable + delta
    return variable.retract(delta)


def _dim(variable):
    if isinstance(variable, np.ndarray):
        return variable.size
    return variable.dim


def numeric_jacobian(residual_fn, variables, step=DEFAULT_JACOBIAN_STEP):
    """ Central difference Jacobian of ``residual_fn`` on the tangent spaces of ``variables``.
    Args:
        residual_fn (callable): Called with the variables as positional arguments, returns a vector.
        variables (list): Manifold values (``retract``/``dim``) or plain numpy vectors.
        step (float): Perturbation of each tangent coordinate.
    Returns:
        numpy.ndarray: One row per residual entry, one column per tangent coordinate.
    """
    if step <= 0:
        raise ValueError("Jacobian step must be positive.")
    variables = list(variables)
    columns = []
    for idx, variable in enumerate(variables):
        for coord in range(_dim(variable)):
            delta = np.zeros(_dim(variable))
            delta[coord] = step
            plus = list(variables)
            minus = list(variables)
            plus[idx] = _retract(variable, delta)
            minus[idx] = _retract(variable, -delta)
            diff = np.atleast_1d(residual_fn(*plus)) - np.atleast_1d(residual_fn(*minus))
            columns.append(diff / (2.0 * step))
    return np.column_stack(columns)


class Factor(object):
    """ Base class of all factors.

    Attributes:
        keys (tuple): Keys of the connected variables.
        noise (NoiseModel): Measurement noise.
        kind (str): Short factor family name.
    """

    kind = None
    # errors which turn the factor off at the current linearization point
    degenerate_errors = ()

    def __init__(self, keys, noise):
        self.keys = tuple(keys)
        self.noise = noise

    @property
    def dim(self):
        return self.noise.dim

    def evaluate(self, *variables):
        """ Unwhitened residual for the passed variables. """
        raise NotImplementedError()

    def _variables(self, values):
        return [values[key] for key in self.keys]

    def whitened_residual(self, values, policy='zero'):
        try:
            return self.noise.whiten(self.evaluate(*self._variables(values)))
        except self.degenerate_errors as err:
            if policy != 'zero':
                raise
            _LOGGER.debug("Factor %s disabled at current estimate: %s", self, err)
            return np.zeros(self.dim)

    def is_active(self, values):
        """ False if the factor is degenerate (switched off) at ``values``. """
        try:
            self.evaluate(*self._variables(values))
        except self.degenerate_errors:
            return False
        return True

    def error(self, values, policy='zero'):
        """ Whitened squared residual of this factor. """
        whitened = self.whitened_residual(values, policy)
        return float(whitened.dot(whitened))

    def linearize(self, values, step=DEFAULT_JACOBIAN_STEP, policy='zero'):
        """ Whitened residual and Jacobian at ``values``.
        Returns:
            tuple: (residual, Jacobian) with Jacobian columns ordered like ``self.keys``.
        """
        variables = self._variables(values)
        try:
            residual = self.evaluate(*variables)
            jacobian = numeric_jacobian(self.evaluate, variables, step)
        except self.degenerate_errors as err:
            if policy != 'zero':
                raise
            _LOGGER.debug("Factor %s contributes nothing this iteration: %s", self, err)
            return np.zeros(self.dim), np.zeros((self.dim, sum(_dim(v) for v in variables)))
        return self.noise.whiten(residual), self.noise.whiten_jacobian(jacobian)

    def __repr__(self):
        return "<%s(%s)@%s>" % (type(self).__name__, ', '.join(self.keys), id(self))


class PriorFactor(Factor):
    """ Pins a pose to a fixed value. """

    kind = 'prior'

    def __init__(self, key, prior, noise=None):
        super(PriorFactor, self).__init__([key], noise or NoiseModel.isotropic(6, DEFAULT_PRIOR_SIGMA))
        self.prior = prior

    def evaluate(self, pose):
        return prior_residual(pose, self.prior)


class OdometryFactor(Factor):
    """ Relative motion ``measured`` between two consecutive poses. """

    kind = 'odometry'

    def __init__(self, key_i, key_next, measured, noise):
        super(OdometryFactor, self).__init__([key_i, key_next], noise)
        self.measured = measured

    def evaluate(self, x_i, x_next):
        return odometry_residual(x_i, x_next, self.measured)


class BoxFactor(Factor):
    """ A bounding box detection of a quadric observed from a pose. """

    kind = 'box'
    degenerate_errors = (BehindCamera, DegenerateConic)

    def __init__(self, pose_key, quadric_key, measured, intrinsics, noise=None):
        super(BoxFactor, self).__init__([pose_key, quadric_key],
                                        noise or NoiseModel.isotropic(4, DEFAULT_BOX_SIGMA))
        self.measured = measured
        self.intrinsics = intrinsics

    def evaluate(self, pose, quadric):
        return bbox_residual(pose, quadric, self.measured, self.intrinsics)


class OrientationFactor(Factor):
    """ Unary factor pulling the major axis of a quadric towards or away from the z axis. """

    kind = 'orientation'
    degenerate_errors = (DegenerateShape,)

    def __init__(self, quadric_key, target, noise=None):
        if not target.is_assigned:
            raise ValueError("Orientation factors need an assigned target.")
        super(OrientationFactor, self).__init__([quadric_key],
                                                noise or NoiseModel.isotropic(1, DEFAULT_ORIENTATION_SIGMA))
        self.target = target

    def evaluate(self, quadric):
        return np.array([orientation_residual(quadric, self.target)])

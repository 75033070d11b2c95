"""
    orientquadrics.core
    -------------------

    This module contains the error hierarchy shared by all parts of orientquadrics as well as
    small helpers used across modules.
"""

import logging

import numpy as np

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())


def listify(obj):
    """Wraps a passed object into a list in case it has not been a list, tuple before.
    Returns an empty list in case ``obj`` is None.
    Args:
        obj: instance to be converted into a list.
    Returns:
        list: May also return a tuple in case ``obj`` has been a tuple before.
    """
    if obj is None:
        return []

    return obj if isinstance(obj, (list, tuple)) else [obj]


def frozen_array(values, shape=None):
    """ Returns a read-only float copy of ``values``.
    Args:
        values (array_like): Data to copy.
        shape (tuple): Optional shape the data must have.
    Returns:
        numpy.ndarray: Non-writeable float64 array.
    """
    arr = np.array(values, dtype=float)
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError("Expected shape %s but got %s." % (tuple(shape), arr.shape))
    arr.setflags(write=False)
    return arr


class QuadricSLAMError(Exception):
    """ Base class of all errors raised by orientquadrics. """

    def __init__(self, value):
        super(QuadricSLAMError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


class ConfigError(QuadricSLAMError, ValueError):
    """ Raised for invalid configuration values or unusable configuration files. """
    pass


class DegenerateShape(QuadricSLAMError):
    """ The major axis of a quadric is ill-defined (two largest semi-axes are equal). """
    pass


class BehindCamera(QuadricSLAMError):
    """ A quadric centroid does not lie in front of the camera. """
    pass


class DegenerateConic(QuadricSLAMError):
    """ A projected dual conic does not describe a bounded ellipse. """
    pass


class DatasetError(QuadricSLAMError):
    """ Base class for problems with input data. """
    pass


class InconsistentDataset(DatasetError):
    pass


class EmptyTrack(DatasetError):
    pass


class LengthMismatch(DatasetError):
    pass


class UnmatchedLandmark(DatasetError):
    pass


class SolverError(QuadricSLAMError):
    """ Base class for failures while building an initial guess or optimizing. """
    pass


class SingularSystem(SolverError):
    pass


class InsufficientViews(SolverError):
    pass


class PlacementFailure(QuadricSLAMError):
    """ The simulator could not place all objects of a scene without interpenetration. """
    pass


class TrialError(QuadricSLAMError):
    """ Wraps an error raised while running a single experiment trial.

    Attributes:
        trajectory (int): Index of the trajectory of the failing trial.
        seed (int): Noise seed of the failing trial.
        variant (str): Either 'standalone' or 'orientation'.
        cause (Exception): The original error.
    """

    def __init__(self, trajectory, seed, variant, cause):
        super(TrialError, self).__init__("Trial (trajectory=%d, seed=%d, variant=%s) failed: %s"
                                         % (trajectory, seed, variant, cause))
        self.trajectory = trajectory
        self.seed = seed
        self.variant = variant
        self.cause = cause

    def __reduce__(self):
        return type(self), (self.trajectory, self.seed, self.variant, self.cause)

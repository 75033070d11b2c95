"""
    orientquadrics.geometry
    -----------------------

    This module contains the geometric building blocks: rigid transforms in SE(3), constrained dual
    quadrics (ellipsoids), pinhole intrinsics and the projection of quadrics into image space.
    All types are immutable values and all functions are pure.
"""

import logging

import numpy as np
from scipy.spatial.transform import Rotation

from .core import BehindCamera, DegenerateConic, DegenerateShape, frozen_array

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

#: Minimal centroid depth (meters) for which a quadric is projected.
DEPTH_EPSILON = 1e-3
#: Relative eigenvalue gap below which the major axis of a quadric is considered undefined.
AXIS_GAP_TOLERANCE = 1e-6
#: Largest change of a log radius a single tangent update may apply.
MAX_LOG_RADIUS_STEP = 2.0
#: Global up direction; orientation factors measure alignment against it.
Z_AXIS = frozen_array([0.0, 0.0, 1.0])


def skew(vec):
    """ Returns the 3x3 cross product matrix of ``vec``. """
    return np.array([[0.0, -vec[2], vec[1]],
                     [vec[2], 0.0, -vec[0]],
                     [-vec[1], vec[0], 0.0]])


def so3_exp(omega):
    """ Maps a rotation vector onto a rotation matrix (Rodrigues' formula). """
    theta = np.sqrt(omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2])
    hat = skew(omega)
    if theta < 1e-10:
        return np.eye(3) + hat + 0.5 * hat.dot(hat)
    return np.eye(3) + np.sin(theta) / theta * hat + (1.0 - np.cos(theta)) / theta ** 2 * hat.dot(hat)


def so3_log(rotation):
    """ Maps a rotation matrix onto its rotation vector. """
    return Rotation.from_matrix(rotation).as_rotvec()


def _left_jacobian(omega):
    theta = np.linalg.norm(omega)
    hat = skew(omega)
    if theta < 1e-8:
        return np.eye(3) + 0.5 * hat + hat.dot(hat) / 6.0
    return (np.eye(3) + (1.0 - np.cos(theta)) / theta ** 2 * hat
            + (theta - np.sin(theta)) / theta ** 3 * hat.dot(hat))


def _left_jacobian_inverse(omega):
    theta = np.linalg.norm(omega)
    hat = skew(omega)
    if theta < 1e-8:
        return np.eye(3) - 0.5 * hat + hat.dot(hat) / 12.0
    coeff = (1.0 - theta * np.sin(theta) / (2.0 * (1.0 - np.cos(theta)))) / theta ** 2
    return np.eye(3) - 0.5 * hat + coeff * hat.dot(hat)


class Pose(object):
    """ A rigid transform in SE(3) mapping body coordinates into the world frame.

    Tangent vectors are ordered (rotation, translation) and applied on the right, i.e.
    ``pose.retract(xi) == pose.compose(Pose.expmap(xi))``.

    Attributes:
        rotation (numpy.ndarray): 3x3 orthonormal matrix with determinant +1.
        translation (numpy.ndarray): Position of the body origin in meters.
    """

    dim = 6
    __slots__ = ('_rotation', '_translation')

    def __init__(self, rotation=None, translation=None):
        rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        translation = np.zeros(3) if translation is None else translation
        if rotation.shape != (3, 3):
            raise ValueError("Pose rotation must be a 3x3 matrix.")
        if not np.allclose(rotation.dot(rotation.T), np.eye(3), atol=1e-6) or np.linalg.det(rotation) < 0:
            raise ValueError("Pose rotation must be orthonormal with determinant +1.")
        self._rotation = frozen_array(rotation)
        self._translation = frozen_array(translation, shape=(3,))

    @classmethod
    def _unchecked(cls, rotation, translation):
        # products of valid poses are valid, skip the orthonormality checks
        pose = cls.__new__(cls)
        pose._rotation = frozen_array(rotation)
        pose._translation = frozen_array(translation)
        return pose

    @property
    def rotation(self):
        return self._rotation

    @property
    def translation(self):
        return self._translation

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def from_matrix(cls, matrix):
        """ Creates a pose from a 4x4 homogeneous transformation. """
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix[:3, :3], matrix[:3, 3])

    @classmethod
    def from_quaternion(cls, quaternion, translation):
        """ Creates a pose from a unit quaternion given as (w, x, y, z) and a translation. """
        w, x, y, z = quaternion
        return cls(Rotation.from_quat([x, y, z, w]).as_matrix(), translation)

    @classmethod
    def look_at(cls, eye, target, up=Z_AXIS):
        """ Creates a camera pose at ``eye`` whose optical (z) axis points at ``target``.
            The camera x axis points right and the y axis points down in the image.
        """
        eye = np.asarray(eye, dtype=float)
        forward = np.asarray(target, dtype=float) - eye
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, up)
        norm = np.linalg.norm(right)
        if norm < 1e-9:
            raise ValueError("Viewing direction must not be parallel to the up vector.")
        right /= norm
        down = np.cross(forward, right)
        return cls(np.column_stack((right, down, forward)), eye)

    @staticmethod
    def expmap(xi):
        """ SE(3) exponential of a 6-vector (rotation, translation). """
        xi = np.asarray(xi, dtype=float)
        omega, rho = xi[:3], xi[3:]
        return Pose._unchecked(so3_exp(omega), _left_jacobian(omega).dot(rho))

    @staticmethod
    def logmap(pose):
        """ SE(3) logarithm returning a 6-vector (rotation, translation). """
        omega = so3_log(pose.rotation)
        return np.concatenate((omega, _left_jacobian_inverse(omega).dot(pose.translation)))

    def matrix(self):
        """ Returns the 4x4 homogeneous matrix of this pose. """
        mat = np.eye(4)
        mat[:3, :3] = self._rotation
        mat[:3, 3] = self._translation
        return mat

    def quaternion(self):
        """ Returns the rotation as a unit quaternion (w, x, y, z) with w >= 0. """
        x, y, z, w = Rotation.from_matrix(self._rotation).as_quat()
        quat = np.array([w, x, y, z])
        return -quat if w < 0 else quat

    def compose(self, other):
        return Pose._unchecked(self._rotation.dot(other.rotation),
                               self._rotation.dot(other.translation) + self._translation)

    def inverse(self):
        rot_t = self._rotation.T
        return Pose._unchecked(rot_t, -rot_t.dot(self._translation))

    def between(self, other):
        """ Relative transform ``inverse(self) * other``. """
        return self.inverse().compose(other)

    def transform_from(self, point):
        """ Maps a point from body into world coordinates. """
        return self._rotation.dot(point) + self._translation

    def transform_to(self, point):
        """ Maps a point from world into body coordinates. """
        return self._rotation.T.dot(np.asarray(point, dtype=float) - self._translation)

    def retract(self, delta):
        return self.compose(Pose.expmap(delta))

    def local(self, other):
        """ Tangent vector ``xi`` such that ``self.retract(xi) == other``. """
        return Pose.logmap(self.between(other))

    def equals(self, other, tol=1e-9):
        return (np.allclose(self._rotation, other.rotation, atol=tol)
                and np.allclose(self._translation, other.translation, atol=tol))

    def __repr__(self):
        return "<%s(t=%s)@%s>" % (type(self).__name__, np.round(self._translation, 4).tolist(), id(self))


def compose(a, b):
    """ Group composition ``a * b`` of two poses. """
    return a.compose(b)


def inverse(pose):
    return pose.inverse()


def apply_motion(pose, motion):
    """ Motion model of the robot: applies the body-frame increment ``motion`` to ``pose``.
    Args:
        pose (Pose): Current pose.
        motion (Pose): Relative SE(3) increment expressed in the body frame of ``pose``.
    Returns:
        Pose: The predicted next pose.
    """
    return pose.compose(motion)


class CameraIntrinsics(object):
    """ Pinhole camera parameters in pixels. """

    __slots__ = ('fx', 'fy', 'cx', 'cy', 'width', 'height')

    def __init__(self, fx=320.0, fy=320.0, cx=320.0, cy=240.0, width=640, height=480):
        if fx <= 0 or fy <= 0:
            raise ValueError("Focal lengths must be positive.")
        if not (0 < cx < width and 0 < cy < height):
            raise ValueError("Principal point must lie inside the image.")
        self.fx = float(fx)
        self.fy = float(fy)
        self.cx = float(cx)
        self.cy = float(cy)
        self.width = int(width)
        self.height = int(height)

    def matrix(self):
        return np.array([[self.fx, 0.0, self.cx],
                         [0.0, self.fy, self.cy],
                         [0.0, 0.0, 1.0]])

    def project(self, point):
        """ Projects a point given in camera coordinates to pixels. """
        return np.array([self.fx * point[0] / point[2] + self.cx,
                         self.fy * point[1] / point[2] + self.cy])

    def to_dict(self):
        return {'fx': self.fx, 'fy': self.fy, 'cx': self.cx, 'cy': self.cy,
                'width': self.width, 'height': self.height}

    def __eq__(self, other):
        return isinstance(other, CameraIntrinsics) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "<%s(%s)>" % (type(self).__name__, self.to_dict())


class BoundingBox2D(object):
    """ Axis aligned image box in pixels. """

    __slots__ = ('xmin', 'ymin', 'xmax', 'ymax')

    def __init__(self, xmin, ymin, xmax, ymax):
        if xmin > xmax or ymin > ymax:
            raise ValueError("Invalid box (%s, %s, %s, %s)." % (xmin, ymin, xmax, ymax))
        self.xmin = float(xmin)
        self.ymin = float(ymin)
        self.xmax = float(xmax)
        self.ymax = float(ymax)

    @classmethod
    def from_array(cls, values):
        return cls(*[float(v) for v in values])

    @property
    def width(self):
        return self.xmax - self.xmin

    @property
    def height(self):
        return self.ymax - self.ymin

    def center(self):
        return np.array([0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)])

    def as_array(self):
        return np.array([self.xmin, self.ymin, self.xmax, self.ymax])

    def intersects_image(self, width, height):
        return self.xmax > 0 and self.ymax > 0 and self.xmin < width and self.ymin < height

    def clip(self, width, height):
        """ Returns the part of the box inside an image of the given size. """
        return BoundingBox2D(min(max(self.xmin, 0.0), width), min(max(self.ymin, 0.0), height),
                             min(max(self.xmax, 0.0), width), min(max(self.ymax, 0.0), height))

    def __eq__(self, other):
        return isinstance(other, BoundingBox2D) and np.array_equal(self.as_array(), other.as_array())

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "<%s(%.2f, %.2f, %.2f, %.2f)>" % (type(self).__name__, self.xmin, self.ymin, self.xmax, self.ymax)


class Box3D(object):
    """ Axis aligned box in the world frame.

    Attributes:
        center (numpy.ndarray): Box centroid in meters.
        half_extents (numpy.ndarray): Positive half side lengths in meters.
    """

    __slots__ = ('_center', '_half_extents')

    def __init__(self, center, half_extents):
        half_extents = frozen_array(half_extents, shape=(3,))
        if np.any(half_extents <= 0):
            raise ValueError("Box half extents must be positive.")
        self._center = frozen_array(center, shape=(3,))
        self._half_extents = half_extents

    @property
    def center(self):
        return self._center

    @property
    def half_extents(self):
        return self._half_extents

    @property
    def minimum(self):
        return self._center - self._half_extents

    @property
    def maximum(self):
        return self._center + self._half_extents

    def volume(self):
        return float(np.prod(2.0 * self._half_extents))

    def centered(self):
        """ The same box moved to the origin. """
        return Box3D(np.zeros(3), self._half_extents)

    def intersection_volume(self, other):
        overlap = np.minimum(self.maximum, other.maximum) - np.maximum(self.minimum, other.minimum)
        return float(np.prod(np.clip(overlap, 0.0, None)))

    def iou(self, other):
        """ Intersection over union of two axis aligned boxes. """
        inter = self.intersection_volume(other)
        return inter / (self.volume() + other.volume() - inter)

    def __repr__(self):
        return "<%s(center=%s, half_extents=%s)>" % (type(self).__name__, self._center.tolist(),
                                                     self._half_extents.tolist())


class DualConic(object):
    """ Homogeneous dual conic in the image plane; the image of a dual quadric. """

    __slots__ = ('_matrix',)

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        self._matrix = frozen_array(0.5 * (matrix + matrix.T), shape=(3, 3))

    @property
    def matrix(self):
        return self._matrix

    def normalized(self):
        """ Returns the conic matrix scaled so that its last diagonal entry is one. """
        if abs(self._matrix[2, 2]) < 1e-300:
            raise DegenerateConic("Dual conic has a vanishing C33 entry.")
        return self._matrix / self._matrix[2, 2]


class ConstrainedDualQuadric(object):
    """ An ellipsoid landmark represented as constrained dual quadric.

    The quadric is stored as rotation matrix, centroid and semi-axis lengths. The compact
    9-vector (theta, t, s) uses Z-Y-X Euler angles ``theta = (roll, pitch, yaw)`` with
    ``R = Rz(yaw) Ry(pitch) Rx(roll)``. Solver updates are applied in the tangent space:
    a rotation vector composed on the right of R, an additive centroid update and a
    multiplicative (log-space) radius update, which keeps the radii strictly positive.

    Attributes:
        rotation (numpy.ndarray): 3x3 rotation of the ellipsoid frame.
        translation (numpy.ndarray): Centroid in meters.
        radii (numpy.ndarray): Semi-axis lengths in meters.
    """

    dim = 9
    __slots__ = ('_rotation', '_translation', '_radii')

    def __init__(self, rotation=None, translation=None, radii=None):
        rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        radii = np.ones(3) if radii is None else radii
        translation = np.zeros(3) if translation is None else translation
        radii = frozen_array(radii, shape=(3,))
        if not np.all(np.isfinite(radii)) or not np.all(np.isfinite(translation)):
            raise ValueError("Quadric radii and centroid must be finite.")
        if np.any(radii <= 0):
            raise ValueError("Quadric radii must be strictly positive.")
        if np.linalg.det(rotation) < 0:
            raise ValueError("Quadric rotation must be a proper rotation.")
        self._rotation = frozen_array(rotation, shape=(3, 3))
        self._translation = frozen_array(translation, shape=(3,))
        self._radii = radii

    @property
    def rotation(self):
        return self._rotation

    @property
    def translation(self):
        return self._translation

    @property
    def radii(self):
        return self._radii

    @classmethod
    def from_vector(cls, vector):
        """ Creates a quadric from the 9-vector (theta1..3, t1..3, s1..3). """
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (9,):
            raise ValueError("A constrained dual quadric needs exactly 9 parameters.")
        return cls(Rotation.from_euler('xyz', vector[:3]).as_matrix(), vector[3:6], vector[6:])

    def vector(self):
        """ Returns the 9-vector (theta, t, s); angles are one valid Euler triple for the rotation. """
        theta = Rotation.from_matrix(self._rotation).as_euler('xyz')
        return np.concatenate((theta, self._translation, self._radii))

    def matrix(self):
        return quadric_matrix(self)

    def envelope(self):
        return envelope_at_origin(self)

    def retract(self, delta):
        """ Applies a tangent update.
        Raises:
            ValueError: If ``delta`` is not finite or changes a log radius by more than ``MAX_LOG_RADIUS_STEP``.
        """
        delta = np.asarray(delta, dtype=float)
        if not np.all(np.isfinite(delta)):
            raise ValueError("Tangent update of a quadric must be finite.")
        if np.any(np.abs(delta[6:9]) > MAX_LOG_RADIUS_STEP):
            raise ValueError("Log radius update %s exceeds %g." % (delta[6:9].tolist(), MAX_LOG_RADIUS_STEP))
        return ConstrainedDualQuadric(self._rotation.dot(so3_exp(delta[:3])),
                                      self._translation + delta[3:6],
                                      self._radii * np.exp(delta[6:9]))

    def local(self, other):
        return np.concatenate((so3_log(self._rotation.T.dot(other.rotation)),
                               other.translation - self._translation,
                               np.log(other.radii / self._radii)))

    def rotated(self, rotation):
        """ The quadric rotated about its own centroid by ``rotation``. """
        return ConstrainedDualQuadric(np.asarray(rotation).dot(self._rotation), self._translation, self._radii)

    def moved_to(self, translation):
        return ConstrainedDualQuadric(self._rotation, translation, self._radii)

    def __repr__(self):
        return "<%s(t=%s, s=%s)@%s>" % (type(self).__name__, np.round(self._translation, 4).tolist(),
                                        np.round(self._radii, 4).tolist(), id(self))


def quadric_matrix(quadric):
    """ Reconstructs the 4x4 dual quadric ``Z * diag(s^2, -1) * Z^T``. """
    transform = np.eye(4)
    transform[:3, :3] = quadric.rotation
    transform[:3, 3] = quadric.translation
    centred = np.diag(np.append(quadric.radii ** 2, -1.0))
    mat = transform.dot(centred).dot(transform.T)
    return 0.5 * (mat + mat.T)


def envelope_at_origin(quadric):
    """ The 3x3 envelope ``R * diag(s^2) * R^T`` of the quadric moved to the origin. """
    rot = quadric.rotation
    mat = rot.dot(np.diag(quadric.radii ** 2)).dot(rot.T)
    return 0.5 * (mat + mat.T)


def symmetric_eigen(matrix):
    """ Eigen decomposition of a symmetric matrix ordered by decreasing eigenvalue.
    Returns:
        tuple: (eigenvalues, eigenvectors as columns)
    """
    values, vectors = np.linalg.eigh(matrix)
    return values[::-1], vectors[:, ::-1]


def major_axis(quadric, tolerance=AXIS_GAP_TOLERANCE):
    """ Unit direction of the longest semi-axis of ``quadric``.

    The sign is fixed so that the component of largest magnitude is positive.

    Raises:
        DegenerateShape: If the envelope is not finite or the two largest eigenvalues of the
            envelope differ by a relative gap smaller than ``tolerance``.
    """
    envelope = envelope_at_origin(quadric)
    if not np.all(np.isfinite(envelope)):
        raise DegenerateShape("Envelope of %r is not finite." % (quadric,))
    values, vectors = symmetric_eigen(envelope)
    if (values[0] - values[1]) / values[0] < tolerance:
        raise DegenerateShape("Major axis undefined, eigenvalues %s." % values.tolist())
    axis = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    if axis[np.argmax(np.abs(axis))] < 0:
        axis = -axis
    return axis


def cosine_similarity_z(quadric, tolerance=AXIS_GAP_TOLERANCE):
    """ Bounded cosine similarity ``|m . z| / (|m| |z|)`` between the major axis and the global z axis. """
    axis = major_axis(quadric, tolerance)
    return float(abs(axis.dot(Z_AXIS)) / np.linalg.norm(axis))


def project_quadric(pose, intrinsics, quadric):
    """ Projects ``quadric`` into the camera at ``pose`` (camera to world).
    Returns:
        DualConic: ``P * Q * P^T`` with ``P = K [R | t]`` of the world to camera transform.
    Raises:
        BehindCamera: If the quadric centroid depth is not larger than ``DEPTH_EPSILON``.
    """
    rot_wc = pose.rotation.T
    trans_wc = -rot_wc.dot(pose.translation)
    depth = rot_wc[2].dot(quadric.translation) + trans_wc[2]
    if depth <= DEPTH_EPSILON:
        raise BehindCamera("Quadric centroid depth %.6f m is not in front of the camera." % depth)
    projection = intrinsics.matrix().dot(np.column_stack((rot_wc, trans_wc)))
    return DualConic(projection.dot(quadric_matrix(quadric)).dot(projection.T))


def conic_bbox(conic, intrinsics=None):
    """ Axis aligned box tangent to the ellipse described by ``conic``. The box is not clipped.
    Args:
        conic (DualConic): Image of a quadric in pixel coordinates.
        intrinsics (CameraIntrinsics): Camera the conic was projected with. ``project_quadric``
            already applies it, so it is only accepted for call compatibility.
    Raises:
        DegenerateConic: If the conic is no bounded ellipse (the quadric crosses the principal
            plane of the camera or the square root arguments are not positive).
    """
    c33 = conic.matrix[2, 2]
    if not c33 < 0.0:
        raise DegenerateConic("Projected quadric crosses the principal plane of the camera.")
    mat = conic.normalized()
    arg_x = mat[0, 2] ** 2 - mat[0, 0]
    arg_y = mat[1, 2] ** 2 - mat[1, 1]
    if arg_x <= 0 or arg_y <= 0:
        raise DegenerateConic("Dual conic does not describe an ellipse.")
    half_x = np.sqrt(arg_x)
    half_y = np.sqrt(arg_y)
    return BoundingBox2D(mat[0, 2] - half_x, mat[1, 2] - half_y, mat[0, 2] + half_x, mat[1, 2] + half_y)


def predicted_box(pose, intrinsics, quadric):
    """ Shortcut for ``conic_bbox(project_quadric(pose, intrinsics, quadric), intrinsics)``. """
    return conic_bbox(project_quadric(pose, intrinsics, quadric), intrinsics)


def quadric_aabb(quadric):
    """ Tight world axis aligned box around the ellipsoid. """
    return Box3D(quadric.translation, np.sqrt(np.diag(envelope_at_origin(quadric))))

"""
    orientquadrics.simulator
    ------------------------

    Procedural generation of synthetic object scenes, camera trajectories, noisy odometry and noisy
    bounding box detections together with their ground truth. Everything is driven by explicit seeds:
    the same seeds and configuration always produce the same dataset.
"""

import logging

import numpy as np
from scipy.spatial.transform import Rotation

from .core import BehindCamera, ConfigError, DegenerateConic, InconsistentDataset, PlacementFailure
from .factors import Orientation, step_sigmas
from .geometry import (BoundingBox2D, CameraIntrinsics, ConstrainedDualQuadric, Pose, predicted_box,
                       quadric_aabb, so3_exp)
from .semantics import CategoryTable, DetectionTrack

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

DEFAULT_VOCABULARY = ('book', 'bottle', 'chair', 'cup', 'keyboard', 'laptop', 'cell phone', 'sports ball')

_SCENE_STREAM, _TRAJECTORY_STREAM, _ODOMETRY_STREAM, _DETECTION_STREAM = range(4)


def _check(condition, message):
    if not condition:
        raise ConfigError(message)


class NoiseConfig(object):
    """ Noise injected into odometry and detections.

    Attributes:
        translation_fraction (float): Expected translation error relative to the step length.
        rotation_fraction (float): Expected rotation error relative to the step rotation angle.
        box_sigma (float): Standard deviation in pixels added to every box coordinate.
        seed (int): Seed of the noise streams.
        confusion_rate (float): Probability that a detection reports a wrong label.
        rotation_floor_deg (float): Lower bound of the expected rotation error per step.
    """

    def __init__(self, translation_fraction=0.05, rotation_fraction=0.15, box_sigma=4.0, seed=0,
                 confusion_rate=0.0, rotation_floor_deg=0.15):
        _check(translation_fraction >= 0 and rotation_fraction >= 0, "Noise fractions must not be negative.")
        _check(box_sigma >= 0, "Box noise must not be negative.")
        _check(0 <= confusion_rate <= 1, "Confusion rate must lie in [0, 1].")
        _check(rotation_floor_deg >= 0, "Rotation floor must not be negative.")
        self.translation_fraction = float(translation_fraction)
        self.rotation_fraction = float(rotation_fraction)
        self.box_sigma = float(box_sigma)
        self.seed = int(seed)
        self.confusion_rate = float(confusion_rate)
        self.rotation_floor_deg = float(rotation_floor_deg)

    @classmethod
    def noiseless(cls, seed=0):
        return cls(0.0, 0.0, 0.0, seed=seed)

    def step_sigmas(self, motion):
        """ (rotation, translation) standard deviations for a single relative motion. """
        return step_sigmas(motion, self.translation_fraction, self.rotation_fraction,
                           np.radians(self.rotation_floor_deg))

    def to_dict(self):
        return {'translation_fraction': self.translation_fraction, 'rotation_fraction': self.rotation_fraction,
                'box_sigma': self.box_sigma, 'seed': self.seed, 'confusion_rate': self.confusion_rate,
                'rotation_floor_deg': self.rotation_floor_deg}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class SceneConfig(object):
    """ Size of procedurally generated scenes. Lengths in meters. """

    def __init__(self, n_objects=8, world_extent=1.5, min_radius=0.2, max_radius=0.45, spacing=0.05,
                 max_attempts=1000):
        _check(n_objects >= 1, "A scene needs at least one object.")
        _check(world_extent > 0 and 0 < min_radius <= max_radius, "Invalid scene dimensions.")
        _check(max_attempts >= 1, "Need at least one placement attempt.")
        self.n_objects = int(n_objects)
        self.world_extent = float(world_extent)
        self.min_radius = float(min_radius)
        self.max_radius = float(max_radius)
        self.spacing = float(spacing)
        self.max_attempts = int(max_attempts)

    def to_dict(self):
        return dict(vars(self))

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class TrajectoryConfig(object):
    """ Camera path parameters.

    Attributes:
        n_poses (int): Number of camera poses.
        pattern (str): 'orbit' circles the scene, 'corridor' passes it on a straight line.
        jitter (float): Standard deviation (meters) of waypoint and look-at jitter.
    """

    patterns = ('orbit', 'corridor')

    def __init__(self, n_poses=30, pattern='orbit', jitter=0.05):
        _check(n_poses >= 2, "A trajectory needs at least two poses.")
        _check(pattern in self.patterns, "Unknown trajectory pattern '%s'." % pattern)
        _check(jitter >= 0, "Jitter must not be negative.")
        self.n_poses = int(n_poses)
        self.pattern = pattern
        self.jitter = float(jitter)

    def to_dict(self):
        return dict(vars(self))

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class SceneObject(object):
    """ Ground truth of a single object.

    Attributes:
        landmark_id (int): Identifier shared with the detection track.
        quadric (ConstrainedDualQuadric): True ellipsoid.
        box (Box3D): Axis aligned envelope of the ellipsoid.
        label (str): Category label.
    """

    __slots__ = ('landmark_id', 'quadric', 'box', 'label')

    def __init__(self, landmark_id, quadric, label, box=None):
        self.landmark_id = int(landmark_id)
        self.quadric = quadric
        self.box = quadric_aabb(quadric) if box is None else box
        self.label = label

    def __repr__(self):
        return "<%s(%d, '%s')>" % (type(self).__name__, self.landmark_id, self.label)


class Scene(object):
    """ A set of non-interpenetrating objects. """

    def __init__(self, objects):
        self.objects = list(objects)

    def labels(self):
        return [obj.label for obj in self.objects]

    def __len__(self):
        return len(self.objects)


class SimulatedDataset(object):
    """ Everything a single trial consumes: measurements plus ground truth.

    Attributes:
        intrinsics (CameraIntrinsics): Camera model.
        poses_gt (list): True camera poses (camera to world).
        odometry (list): Measured relative motions, one less than poses.
        tracks (list): ``DetectionTrack`` per observed object.
        landmarks_gt (list): ``SceneObject`` ground truth per object.
        noise (NoiseConfig): Noise the measurements were generated with.
        metadata (dict): Free form provenance such as seeds and trajectory pattern.
    """

    def __init__(self, intrinsics, poses_gt, odometry, tracks, landmarks_gt, noise=None, metadata=None):
        self.intrinsics = intrinsics
        self.poses_gt = list(poses_gt)
        self.odometry = list(odometry)
        self.tracks = list(tracks)
        self.landmarks_gt = list(landmarks_gt)
        self.noise = noise or NoiseConfig()
        self.metadata = dict(metadata or {})

    @property
    def n_poses(self):
        return len(self.poses_gt)

    def validate(self):
        """ Checks all cross references.
        Raises:
            InconsistentDataset: For dangling pose indices, duplicate ids or size mismatches.
        """
        if self.n_poses < 2:
            raise InconsistentDataset("A dataset needs at least two poses.")
        if len(self.odometry) != self.n_poses - 1:
            raise InconsistentDataset("Expected %d odometry measurements, got %d."
                                      % (self.n_poses - 1, len(self.odometry)))
        ids = [track.landmark_id for track in self.tracks]
        if len(set(ids)) != len(ids):
            raise InconsistentDataset("Duplicate track ids.")
        for track in self.tracks:
            for det in track.detections:
                if not 0 <= det.pose_index < self.n_poses:
                    raise InconsistentDataset("Track %d references unknown pose %d."
                                              % (track.landmark_id, det.pose_index))
        return self

    def landmark(self, landmark_id):
        for obj in self.landmarks_gt:
            if obj.landmark_id == landmark_id:
                return obj
        raise KeyError(landmark_id)

    def __repr__(self):
        return "<%s(%d poses, %d tracks)@%s>" % (type(self).__name__, self.n_poses, len(self.tracks), id(self))


def _random_rotation(rng):
    quat = rng.normal(size=4)
    return Rotation.from_quat(quat / np.linalg.norm(quat)).as_matrix()


def _yaw(angle):
    return Rotation.from_euler('z', angle).as_matrix()


def _object_shape(rng, kind, config):
    major = rng.uniform(config.min_radius, config.max_radius)
    minors = major * rng.uniform(0.35, 0.7, size=2)
    yaw = rng.uniform(-np.pi, np.pi)
    if kind is Orientation.VERTICAL:
        return _yaw(yaw), np.array([minors[0], minors[1], major])
    if kind is Orientation.HORIZONTAL:
        return _yaw(yaw), np.array([major, minors[0], minors[1]])
    return _random_rotation(rng), np.array([major, minors[0], minors[1]])


def generate_scene(seed, n_objects=None, vocab=DEFAULT_VOCABULARY, table=None, config=None):
    """ Places ``n_objects`` ellipsoids on the floor (z = 0) of a square room.

    Vertical classes get their major axis along z, horizontal classes along a random direction in the
    xy-plane and unassigned classes a random orientation.

    Raises:
        PlacementFailure: If an object can not be placed after ``config.max_attempts`` tries.
    """
    config = config or SceneConfig()
    n_objects = config.n_objects if n_objects is None else int(n_objects)
    _check(n_objects >= 1, "A scene needs at least one object.")
    table = table or CategoryTable.default()
    rng = np.random.default_rng([int(seed), _SCENE_STREAM])
    objects = []
    for landmark_id in range(n_objects):
        label = vocab[rng.integers(len(vocab))]
        rotation, radii = _object_shape(rng, table.lookup(label), config)
        half_z = quadric_aabb(ConstrainedDualQuadric(rotation, np.zeros(3), radii)).half_extents[2]
        for _ in range(config.max_attempts):
            xy = rng.uniform(-config.world_extent, config.world_extent, size=2)
            candidate = SceneObject(landmark_id, ConstrainedDualQuadric(rotation, [xy[0], xy[1], half_z], radii),
                                    label)
            if all(_separated(candidate.box, other.box, config.spacing) for other in objects):
                objects.append(candidate)
                break
        else:
            raise PlacementFailure("Could not place object %d after %d attempts." % (landmark_id, config.max_attempts))
    _LOGGER.debug("Generated scene %s with labels %s", seed, [obj.label for obj in objects])
    return Scene(objects)


def _separated(box_a, box_b, spacing):
    gap = np.maximum(box_a.minimum, box_b.minimum) - np.minimum(box_a.maximum, box_b.maximum)
    return bool(np.any(gap >= spacing))


def generate_trajectory(seed, scene, config=None):
    """ Camera poses looking into ``scene`` following the configured pattern. """
    config = config or TrajectoryConfig()
    rng = np.random.default_rng([int(seed), _TRAJECTORY_STREAM])
    centers = np.array([obj.quadric.translation for obj in scene.objects])
    center = centers.mean(axis=0)
    spread = np.max(np.abs(centers[:, :2] - center[:2])) + 0.5
    steps = np.linspace(0.0, 1.0, config.n_poses)
    height = rng.uniform(0.8, 1.5)
    if config.pattern == 'orbit':
        radius = spread + rng.uniform(1.5, 2.5)
        start = rng.uniform(-np.pi, np.pi)
        span = rng.uniform(1.2 * np.pi, 2.0 * np.pi) * rng.choice([-1.0, 1.0])
        angles = start + span * steps
        eyes = np.column_stack((center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles),
                                np.full(config.n_poses, height)))
        targets = np.tile(center, (config.n_poses, 1))
    else:
        heading = rng.uniform(-np.pi, np.pi)
        along = np.array([np.cos(heading), np.sin(heading), 0.0])
        side = np.array([-along[1], along[0], 0.0])
        offset = spread + rng.uniform(1.5, 2.5)
        travel = (2.0 * spread + 1.0) * (steps - 0.5)
        eyes = center + np.outer(travel, along) - offset * side
        eyes[:, 2] = height
        targets = center + 0.5 * np.outer(travel, along)
    poses = []
    for eye, target in zip(eyes, targets):
        eye = eye + rng.normal(scale=config.jitter, size=3)
        target = target + rng.normal(scale=config.jitter, size=3)
        poses.append(Pose.look_at(eye, target))
    return poses


def corrupt_odometry(gt_poses, noise, rng=None):
    """ Relative motions between consecutive poses perturbed by zero mean Gaussian noise scaled so the
        expected error is the configured fraction of each step.
    Args:
        gt_poses (list): True poses, at least two.
        noise (NoiseConfig): Noise fractions and seed.
        rng (numpy.random.Generator): Optional generator; derived from ``noise.seed`` if omitted.
    Returns:
        list: One measured relative ``Pose`` per step.
    """
    if len(gt_poses) < 2:
        raise InconsistentDataset("Odometry needs at least two poses.")
    rng = np.random.default_rng([noise.seed, _ODOMETRY_STREAM]) if rng is None else rng
    measurements = []
    for pose, pose_next in zip(gt_poses[:-1], gt_poses[1:]):
        motion = pose.between(pose_next)
        rot_sigma, trans_sigma = noise.step_sigmas(motion)
        perturbation = Pose(so3_exp(rng.normal(scale=1.0, size=3) * rot_sigma),
                            rng.normal(scale=1.0, size=3) * trans_sigma)
        measurements.append(motion.compose(perturbation))
    return measurements


def _detection_label(rng, label, vocab, confusion_rate):
    if confusion_rate > 0 and len(vocab) > 1 and rng.random() < confusion_rate:
        others = [other for other in vocab if other != label]
        return others[rng.integers(len(others))]
    return label


def render_detections(scene, gt_poses, intrinsics, noise, rng=None, vocab=None):
    """ Noisy bounding box detections of all objects visible from ``gt_poses``.

    Boxes are the exact tangent boxes clipped to the image with independent Gaussian noise on every
    coordinate. Objects behind the camera or outside the frame are not detected. Score vectors put
    all mass on a single label which is wrong with probability ``noise.confusion_rate``.

    Returns:
        list: ``DetectionTrack`` instances for objects detected at least once, ordered by id.
    """
    rng = np.random.default_rng([noise.seed, _DETECTION_STREAM]) if rng is None else rng
    vocab = tuple(vocab or sorted(set(scene.labels())))
    tracks = dict((obj.landmark_id, DetectionTrack(obj.landmark_id, vocab)) for obj in scene.objects)
    for pose_index, pose in enumerate(gt_poses):
        for obj in scene.objects:
            try:
                box = predicted_box(pose, intrinsics, obj.quadric)
            except (BehindCamera, DegenerateConic):
                continue
            if not box.intersects_image(intrinsics.width, intrinsics.height):
                continue
            coords = box.clip(intrinsics.width, intrinsics.height).as_array()
            coords = coords + rng.normal(scale=1.0, size=4) * noise.box_sigma
            xs, ys = np.sort(coords[[0, 2]]), np.sort(coords[[1, 3]])
            scores = np.zeros(len(vocab))
            scores[vocab.index(_detection_label(rng, obj.label, vocab, noise.confusion_rate))] = 1.0
            tracks[obj.landmark_id].add(pose_index, BoundingBox2D(xs[0], ys[0], xs[1], ys[1]), scores)
    return [tracks[key] for key in sorted(tracks) if len(tracks[key])]


def simulate(seed, noise=None, scene_config=None, trajectory_config=None, table=None, intrinsics=None,
             vocab=DEFAULT_VOCABULARY):
    """ Generates a complete dataset.
    Args:
        seed (int): Seed of scene and trajectory.
        noise (NoiseConfig): Measurement noise; its own seed drives the noise streams.
    Returns:
        SimulatedDataset
    """
    noise = noise or NoiseConfig()
    intrinsics = intrinsics or CameraIntrinsics()
    trajectory_config = trajectory_config or TrajectoryConfig()
    scene = generate_scene(seed, vocab=vocab, table=table, config=scene_config)
    poses = generate_trajectory(seed, scene, trajectory_config)
    odometry = corrupt_odometry(poses, noise, np.random.default_rng([noise.seed, int(seed), _ODOMETRY_STREAM]))
    tracks = render_detections(scene, poses, intrinsics, noise,
                               np.random.default_rng([noise.seed, int(seed), _DETECTION_STREAM]), vocab)
    metadata = {'seed': int(seed), 'noise_seed': noise.seed, 'pattern': trajectory_config.pattern}
    _LOGGER.info("Simulated dataset seed=%s noise_seed=%s: %d poses, %d tracks",
                 seed, noise.seed, len(poses), len(tracks))
    return SimulatedDataset(intrinsics, poses, odometry, tracks, scene.objects, noise, metadata).validate()

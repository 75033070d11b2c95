import numpy as np
from scipy.spatial.transform import Rotation

from orientquadrics.geometry import (BoundingBox2D, CameraIntrinsics, ConstrainedDualQuadric, Pose,
                                     predicted_box)
from orientquadrics.semantics import DetectionTrack
from orientquadrics.simulator import (NoiseConfig, SceneConfig, SceneObject, SimulatedDataset, TrajectoryConfig,
                                      simulate)

VOCABULARY = ('book', 'bottle', 'sports ball')


def rotation_about(axis, degrees):
    return Rotation.from_rotvec(np.radians(degrees) * np.asarray(axis, dtype=float)).as_matrix()


def random_pose(rng, scale=1.0):
    return Pose(Rotation.from_rotvec(rng.normal(scale=0.5, size=3)).as_matrix(), rng.normal(scale=scale, size=3))


def random_quadric(rng, center=None):
    radii = rng.uniform(0.2, 0.6, size=3)
    center = rng.normal(scale=0.5, size=3) if center is None else center
    return ConstrainedDualQuadric(Rotation.from_rotvec(rng.normal(size=3)).as_matrix(), center, radii)


def surface_points(quadric, n_lat=300, n_lon=600):
    """ Dense grid of points on the ellipsoid surface in world coordinates. """
    lat = np.linspace(0.0, np.pi, n_lat)
    lon = np.linspace(-np.pi, np.pi, n_lon)
    lat, lon = np.meshgrid(lat, lon)
    unit = np.stack((np.sin(lat) * np.cos(lon), np.sin(lat) * np.sin(lon), np.cos(lat)), axis=-1).reshape(-1, 3)
    return (unit * quadric.radii).dot(quadric.rotation.T) + quadric.translation


def sampled_box(pose, intrinsics, quadric, n_lat=300, n_lon=600):
    """ Bounding box of the projected surface samples; the reference for ``predicted_box``. """
    points = surface_points(quadric, n_lat, n_lon)
    camera = (points - pose.translation).dot(pose.rotation)
    assert np.all(camera[:, 2] > 0), "oracle needs the whole quadric in front of the camera"
    u = intrinsics.fx * camera[:, 0] / camera[:, 2] + intrinsics.cx
    v = intrinsics.fy * camera[:, 1] / camera[:, 2] + intrinsics.cy
    return BoundingBox2D(u.min(), v.min(), u.max(), v.max())


def line_poses(n_poses, start=(-0.6, -3.0, 0.5), step=(0.3, 0.0, 0.0), target=(0.0, 0.0, 0.3)):
    """ Cameras moving sideways along a line while looking at ``target``. """
    start = np.asarray(start, dtype=float)
    return [Pose.look_at(start + idx * np.asarray(step), target) for idx in range(n_poses)]


def handmade_dataset(n_poses=3, label='bottle', detected=(0, 1), vocabulary=VOCABULARY, quadric=None):
    """ A noiseless dataset with a single landmark observed from the poses in ``detected``. """
    intrinsics = CameraIntrinsics()
    poses = line_poses(n_poses)
    quadric = quadric or ConstrainedDualQuadric(np.eye(3), [0.0, 0.0, 0.3], [0.15, 0.1, 0.3])
    track = DetectionTrack(7, vocabulary)
    scores = np.zeros(len(vocabulary))
    scores[vocabulary.index(label)] = 1.0
    for index in detected:
        track.add(index, predicted_box(poses[index], intrinsics, quadric), scores)
    odometry = [a.between(b) for a, b in zip(poses[:-1], poses[1:])]
    return SimulatedDataset(intrinsics, poses, odometry, [track], [SceneObject(7, quadric, label)],
                            NoiseConfig.noiseless(), {'seed': 0})


def small_simulation(seed=1, noise_seed=0, noiseless=False, n_objects=3, n_poses=10):
    noise = NoiseConfig.noiseless(noise_seed) if noiseless else NoiseConfig(seed=noise_seed)
    return simulate(seed, noise, SceneConfig(n_objects=n_objects), TrajectoryConfig(n_poses=n_poses))

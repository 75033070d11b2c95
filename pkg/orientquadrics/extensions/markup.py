"""
    orientquadrics.extensions.markup
    --------------------------------

    Conversion of datasets and estimates from and to plain dictionaries (markup) which are stored as
    UTF-8 JSON documents. Poses are written as ``[tx, ty, tz, qw, qx, qy, qz]`` records.
"""

import io
import json
import logging
import numbers
from collections import OrderedDict

import numpy as np
from six import string_types

from ..core import DatasetError, InconsistentDataset
from ..factors import Orientation
from ..geometry import BoundingBox2D, Box3D, CameraIntrinsics, ConstrainedDualQuadric, Pose
from ..semantics import DetectionTrack
from ..simulator import NoiseConfig, SceneObject, SimulatedDataset

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

FORMAT_VERSION = 1


def rep(value):
    """ Returns a JSON compatible representation of ``value``. """
    if isinstance(value, string_types) or value is None or isinstance(value, bool):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Number):
        return float(value)
    if isinstance(value, Orientation):
        return value.value
    if isinstance(value, dict):
        return OrderedDict((str(key), rep(val)) for key, val in value.items())
    try:
        return [rep(v) for v in iter(value)]
    except TypeError:
        return str(value)


def pose_to_record(pose):
    return rep(np.concatenate((pose.translation, pose.quaternion())))


def pose_from_record(record):
    if len(record) != 7:
        raise InconsistentDataset("Pose records need 7 values, got %d." % len(record))
    return Pose.from_quaternion(record[3:], record[:3])


def _track_markup(track):
    return OrderedDict([('id', track.landmark_id), ('vocabulary', list(track.vocabulary)),
                        ('detections', [OrderedDict([('pose_index', det.pose_index), ('box', rep(det.box.as_array())),
                                                     ('scores', rep(det.scores))]) for det in track.detections])])


def _landmark_markup(obj):
    return OrderedDict([('id', obj.landmark_id), ('center', rep(obj.box.center)),
                        ('half_extents', rep(obj.box.half_extents)), ('label', obj.label),
                        ('quadric', rep(obj.quadric.vector()))])


def dataset_to_markup(dataset):
    """ Dictionary representation of ``dataset``. """
    return OrderedDict([
        ('format', FORMAT_VERSION),
        ('intrinsics', rep(dataset.intrinsics.to_dict())),
        ('poses_gt', [pose_to_record(pose) for pose in dataset.poses_gt]),
        ('odometry', [pose_to_record(motion) for motion in dataset.odometry]),
        ('tracks', [_track_markup(track) for track in dataset.tracks]),
        ('landmarks_gt', [_landmark_markup(obj) for obj in dataset.landmarks_gt]),
        ('noise', rep(dataset.noise.to_dict())),
        ('metadata', rep(dataset.metadata)),
    ])


def _check_format(markup):
    if not isinstance(markup, dict):
        raise InconsistentDataset("Markup must be a JSON object.")
    version = markup.get('format')
    if version != FORMAT_VERSION:
        raise InconsistentDataset("Unsupported format version %r." % version)


def dataset_from_markup(markup):
    """ Creates a validated ``SimulatedDataset`` from its markup.
    Raises:
        InconsistentDataset: For missing fields, bad values or dangling references.
    """
    _check_format(markup)
    try:
        tracks = []
        for entry in markup['tracks']:
            track = DetectionTrack(entry['id'], entry['vocabulary'])
            for det in entry['detections']:
                track.add(det['pose_index'], BoundingBox2D.from_array(det['box']), det['scores'])
            tracks.append(track)
        landmarks = [SceneObject(entry['id'], ConstrainedDualQuadric.from_vector(entry['quadric']), entry['label'],
                                 Box3D(entry['center'], entry['half_extents']))
                     for entry in markup.get('landmarks_gt', [])]
        dataset = SimulatedDataset(CameraIntrinsics(**markup['intrinsics']),
                                   [pose_from_record(rec) for rec in markup['poses_gt']],
                                   [pose_from_record(rec) for rec in markup['odometry']],
                                   tracks, landmarks, NoiseConfig.from_dict(markup.get('noise', {})),
                                   markup.get('metadata', {}))
    except (KeyError, TypeError, ValueError) as err:
        raise InconsistentDataset("Malformed dataset markup: %s" % err)
    return dataset.validate()


def canonical(dataset):
    """ The dataset as it is read back after being written to disk. """
    return dataset_from_markup(json.loads(json.dumps(dataset_to_markup(dataset))))


def estimate_to_markup(values, labels=None, stats=None, metadata=None):
    """ Dictionary representation of a solution.
    Args:
        values (Values): Optimized poses and quadrics.
        labels (dict): Landmark id onto (label, OrientationTarget) as stored by the factor graph.
        stats (SolveStats): Optional solver statistics.
        metadata (dict): Provenance such as the config hash.
    """
    labels = labels or {}
    landmarks = []
    for lid, quadric in values.quadrics().items():
        label, target = labels.get(lid, (None, None))
        landmarks.append(OrderedDict([('id', lid), ('quadric', rep(quadric.vector())), ('label', label),
                                      ('orientation', target.kind.value if target is not None else None)]))
    return OrderedDict([('format', FORMAT_VERSION), ('kind', 'estimate'),
                        ('poses', [pose_to_record(pose) for pose in values.poses()]),
                        ('landmarks', landmarks),
                        ('stats', rep(stats.to_dict()) if stats is not None else None),
                        ('metadata', rep(metadata or {}))])


def estimate_from_markup(markup):
    """
    Returns:
        tuple: (list of poses, dict of landmark id onto quadric, dict of landmark id onto Orientation)
    """
    _check_format(markup)
    try:
        poses = [pose_from_record(rec) for rec in markup['poses']]
        quadrics = OrderedDict()
        kinds = OrderedDict()
        for entry in markup['landmarks']:
            quadrics[int(entry['id'])] = ConstrainedDualQuadric.from_vector(entry['quadric'])
            if entry.get('orientation'):
                kinds[int(entry['id'])] = Orientation(entry['orientation'])
    except (KeyError, TypeError, ValueError) as err:
        raise InconsistentDataset("Malformed estimate markup: %s" % err)
    return poses, quadrics, kinds


def write_json(markup, path):
    with io.open(path, 'w', encoding='utf-8') as handle:
        handle.write(json.dumps(markup, indent=1))
        handle.write(u'\n')


def read_json(path):
    """ Reads a JSON document.
    Raises:
        DatasetError: If the file can not be read or parsed.
    """
    try:
        with io.open(path, 'r', encoding='utf-8') as handle:
            return json.load(handle, object_pairs_hook=OrderedDict)
    except (IOError, OSError, ValueError) as err:
        raise DatasetError("Could not read '%s': %s" % (path, err))


def save_dataset(dataset, path):
    write_json(dataset_to_markup(dataset), path)
    _LOGGER.info("Wrote dataset with %d poses to %s", dataset.n_poses, path)


def load_dataset(path):
    return dataset_from_markup(read_json(path))


def load_estimate(path):
    return estimate_from_markup(read_json(path))

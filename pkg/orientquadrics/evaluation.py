"""
    orientquadrics.evaluation
    -------------------------

    Trajectory and landmark metrics. Landmarks are matched by id, trajectories by pose index.
"""

import csv
import io
import json
import logging
from collections import OrderedDict

import numpy as np

from .core import DegenerateShape, LengthMismatch, UnmatchedLandmark
from .factors import Orientation
from .geometry import Z_AXIS, major_axis, quadric_aabb
from .semantics import CategoryTable

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

#: Metric columns of a report, in output order.
METRICS = ('ate_m', 'odometry_ate_m', 'landmark_position_m', 'landmark_shape', 'landmark_quality',
           'axis_deviation_deg')


def _positions(poses):
    return np.array([pose.translation for pose in poses])


def align_trajectory(estimated, ground_truth):
    """ Closed form rigid alignment (rotation and translation, no scale) of two point sets.
    Args:
        estimated (numpy.ndarray): N x 3 positions to be aligned.
        ground_truth (numpy.ndarray): N x 3 reference positions.
    Returns:
        tuple: (rotation, translation) minimizing the squared distances of ``R * estimated + t`` to
            ``ground_truth``.
    """
    est_mean = estimated.mean(axis=0)
    gt_mean = ground_truth.mean(axis=0)
    cross = (ground_truth - gt_mean).T.dot(estimated - est_mean)
    u, _, vh = np.linalg.svd(cross)
    sign = np.eye(3)
    if np.linalg.det(u) * np.linalg.det(vh) < 0:
        sign[2, 2] = -1.0
    rotation = u.dot(sign).dot(vh)
    return rotation, gt_mean - rotation.dot(est_mean)


def ate(estimated, ground_truth, align=True):
    """ Absolute trajectory error: RMSE of the position differences of index aligned poses.
    Args:
        estimated (list): Estimated poses.
        ground_truth (list): True poses.
        align (bool): Rigidly align the estimate to the ground truth before measuring.
    Raises:
        LengthMismatch: If the trajectories differ in length or have less than two poses.
    """
    if len(estimated) != len(ground_truth) or len(estimated) < 2:
        raise LengthMismatch("Trajectories of %d and %d poses can not be compared."
                             % (len(estimated), len(ground_truth)))
    est = _positions(estimated)
    truth = _positions(ground_truth)
    if align:
        rotation, translation = align_trajectory(est, truth)
        est = est.dot(rotation.T) + translation
    return float(np.sqrt(np.mean(np.sum((est - truth) ** 2, axis=1))))


def _gt_boxes(gt_boxes):
    if hasattr(gt_boxes, 'items'):
        return OrderedDict(sorted(gt_boxes.items()))
    return OrderedDict(sorted((obj.landmark_id, obj.box) for obj in gt_boxes))


def _matched(estimates, gt_boxes):
    truth = _gt_boxes(gt_boxes)
    missing = sorted(set(estimates) - set(truth))
    if missing:
        raise UnmatchedLandmark("No ground truth for landmarks %s." % missing)
    if not estimates:
        raise UnmatchedLandmark("No landmarks to evaluate.")
    return [(lid, estimates[lid], truth[lid]) for lid in sorted(estimates)]


def position_errors(estimates, gt_boxes):
    """ Per landmark centroid distance in meters. """
    return OrderedDict((lid, float(np.linalg.norm(quadric.translation - box.center)))
                       for lid, quadric, box in _matched(estimates, gt_boxes))


def shape_errors(estimates, gt_boxes):
    """ Per landmark Jaccard distance of the origin centered boxes. """
    return OrderedDict((lid, 1.0 - quadric_aabb(quadric).centered().iou(box.centered()))
                       for lid, quadric, box in _matched(estimates, gt_boxes))


def quality_errors(estimates, gt_boxes):
    """ Per landmark Jaccard distance of the boxes in place. """
    return OrderedDict((lid, 1.0 - quadric_aabb(quadric).iou(box)) for lid, quadric, box in _matched(estimates, gt_boxes))


def landmark_position_error(estimates, gt_boxes):
    """ RMSE of the distances between estimated quadric centroids and ground truth box centroids.
    Args:
        estimates (dict): Landmark id onto ``ConstrainedDualQuadric``.
        gt_boxes (dict): Landmark id onto ``Box3D``; a list of ``SceneObject`` works as well.
    Raises:
        UnmatchedLandmark: If an estimated landmark has no ground truth.
    """
    errors = np.array(list(position_errors(estimates, gt_boxes).values()))
    return float(np.sqrt(np.mean(errors ** 2)))


def landmark_shape_error(estimates, gt_boxes):
    """ Mean Jaccard distance between the envelope box of each quadric and its ground truth box, both
        moved to the origin. Only the extents are compared.
    """
    return float(np.mean(list(shape_errors(estimates, gt_boxes).values())))


def landmark_quality_error(estimates, gt_boxes):
    """ Mean Jaccard distance between envelope and ground truth boxes in the world frame. Position,
        shape and orientation errors all reduce the overlap.
    """
    return float(np.mean(list(quality_errors(estimates, gt_boxes).values())))


def axis_deviation(quadric, kind):
    """ Angle in degrees between the major axis of ``quadric`` and its expected direction.

    Vertical landmarks are measured against the z axis, horizontal ones against the xy-plane.

    Returns:
        float: Deviation in [0, 90], None for unassigned kinds or undefined major axes.
    """
    if kind is Orientation.UNASSIGNED:
        return None
    try:
        cosine = min(abs(float(major_axis(quadric).dot(Z_AXIS))), 1.0)
    except DegenerateShape:
        return None
    if kind is Orientation.VERTICAL:
        return float(np.degrees(np.arccos(cosine)))
    return float(np.degrees(np.arcsin(cosine)))


def mean_axis_deviation(estimates, kinds):
    """ Mean ``axis_deviation`` over landmarks with an assigned kind, None if there is none. """
    deviations = [axis_deviation(estimates[lid], kinds[lid]) for lid in sorted(estimates) if lid in kinds]
    deviations = [dev for dev in deviations if dev is not None]
    return float(np.mean(deviations)) if deviations else None


class MetricReport(object):
    """ Metrics of one trial.

    Attributes:
        ate_m (float): Absolute trajectory error of the optimized poses.
        odometry_ate_m (float): Absolute trajectory error of dead reckoning.
        landmark_position_m (float): Landmark centroid RMSE.
        landmark_shape (float): Mean shape Jaccard distance.
        landmark_quality (float): Mean quality Jaccard distance.
        axis_deviation_deg (float): Mean deviation of major axes from their class orientation.
        landmarks (dict): Per landmark breakdown.
        metadata (dict): Trial identification such as trajectory, seed, variant and config hash.
    """

    def __init__(self, ate_m, landmark_position_m, landmark_shape, landmark_quality, odometry_ate_m=None,
                 axis_deviation_deg=None, landmarks=None, metadata=None):
        for name, value in (('landmark_shape', landmark_shape), ('landmark_quality', landmark_quality)):
            if value is not None and not -1e-12 <= value <= 1 + 1e-12:
                raise ValueError("%s must lie in [0, 1], got %s." % (name, value))
        self.ate_m = ate_m
        self.odometry_ate_m = odometry_ate_m
        self.landmark_position_m = landmark_position_m
        self.landmark_shape = landmark_shape
        self.landmark_quality = landmark_quality
        self.axis_deviation_deg = axis_deviation_deg
        self.landmarks = OrderedDict(sorted((landmarks or {}).items()))
        self.metadata = OrderedDict(metadata or {})

    def metrics(self):
        return OrderedDict((name, getattr(self, name)) for name in METRICS)

    def to_dict(self):
        return OrderedDict([('metadata', self.metadata), ('metrics', self.metrics()),
                            ('landmarks', OrderedDict((str(lid), data) for lid, data in self.landmarks.items()))])

    @classmethod
    def from_dict(cls, data):
        landmarks = dict((int(lid), value) for lid, value in data.get('landmarks', {}).items())
        return cls(landmarks=landmarks, metadata=data.get('metadata'), **data['metrics'])

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def __repr__(self):
        return "<%s(%s)>" % (type(self).__name__, dict(self.metrics()))


def evaluate(estimates, poses, dataset, kinds=None, odometry_poses=None, metadata=None):
    """ Computes all metrics of an estimate against the ground truth of ``dataset``.
    Args:
        estimates (dict): Landmark id onto estimated quadric.
        poses (list): Estimated poses.
        dataset (SimulatedDataset): Ground truth provider.
        kinds (dict): Landmark id onto ``Orientation`` used for the axis deviation; looked up from the
            ground truth labels in the default category table if omitted.
        odometry_poses (list): Dead reckoning trajectory for the baseline error.
        metadata (dict): Stored in the report.
    Returns:
        MetricReport
    """
    truth = OrderedDict((obj.landmark_id, obj.box) for obj in dataset.landmarks_gt)
    if kinds is None:
        table = CategoryTable.default()
        kinds = dict((obj.landmark_id, table.lookup(obj.label)) for obj in dataset.landmarks_gt)
    if estimates:
        positions = position_errors(estimates, truth)
        shapes = shape_errors(estimates, truth)
        qualities = quality_errors(estimates, truth)
    else:
        _LOGGER.warning("No landmark estimates, landmark metrics are undefined.")
        positions, shapes, qualities = {}, {}, {}
    landmarks = OrderedDict()
    for lid in positions:
        kind = kinds.get(lid, Orientation.UNASSIGNED)
        landmarks[lid] = OrderedDict([('position_m', positions[lid]), ('shape', shapes[lid]),
                                      ('quality', qualities[lid]), ('orientation', kind.value),
                                      ('axis_deviation_deg', axis_deviation(estimates[lid], kind))])
    report = MetricReport(ate(poses, dataset.poses_gt),
                          _stat(list(positions.values()), lambda errors: np.sqrt(np.mean(np.square(errors)))),
                          _stat(list(shapes.values()), np.mean),
                          _stat(list(qualities.values()), np.mean),
                          odometry_ate_m=ate(odometry_poses, dataset.poses_gt) if odometry_poses else None,
                          axis_deviation_deg=mean_axis_deviation(estimates, kinds),
                          landmarks=landmarks, metadata=metadata)
    _LOGGER.debug("Evaluated %s", report)
    return report


def _stat(values, reducer):
    values = [value for value in values if value is not None]
    return float(reducer(values)) if values else None


def aggregate(reports, metadata=None):
    """ Mean and population standard deviation of every metric over ``reports``.
    Returns:
        tuple: (MetricReport of means, dict of metric name onto standard deviation)
    """
    if not reports:
        raise ValueError("Nothing to aggregate.")
    means = OrderedDict((name, _stat([getattr(rep, name) for rep in reports], np.mean)) for name in METRICS)
    stds = OrderedDict((name, _stat([getattr(rep, name) for rep in reports], np.std)) for name in METRICS)
    meta = OrderedDict([('trials', len(reports))])
    meta.update(metadata or {})
    return MetricReport(metadata=meta, **means), stds


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def reports_to_csv(reports, columns, summary=None):
    """ CSV text with one row per report and an optional trailing summary row.
    Args:
        reports (list): ``MetricReport`` instances in trial order.
        columns (list): Metadata keys written before the metric columns.
        summary (list): Additional ``MetricReport`` rows (e.g. aggregates) appended after the trials.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(list(columns) + list(METRICS))
    for report in reports:
        writer.writerow([_cell(report.metadata.get(col)) for col in columns]
                        + [_cell(getattr(report, name)) for name in METRICS])
    for report in summary or []:
        writer.writerow([_cell(report.metadata.get(col)) for col in columns]
                        + [_cell(getattr(report, name)) for name in METRICS])
    return buffer.getvalue()

"""
    orientquadrics.semantics
    ------------------------

    Maps object detections to landmark level categories and orientation targets and implements the
    track quality rules applied before landmarks enter the factor graph.
"""

import io
import logging
import math
import pkgutil

import numpy as np
from six import string_types

from .core import ConfigError, EmptyTrack, frozen_array
from .factors import Orientation, OrientationTarget

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

DEFAULT_VARIANCE_THRESHOLD = 50.0


def _normalize_label(label):
    return ' '.join(label.strip().lower().split())


class CategoryTable(object):
    """ Immutable mapping of category labels onto orientation kinds. Lookups are case-insensitive and
        unknown labels are unassigned.
    """

    def __init__(self, entries=None):
        """
        Args:
            entries (dict): Maps labels onto ``Orientation`` members or their string values.
        """
        table = {}
        for label, kind in (entries or {}).items():
            table[_normalize_label(label)] = OrientationTarget(kind).kind
        self._table = table

    @classmethod
    def from_lines(cls, lines, source='<memory>'):
        """ Parses ``label<TAB>orientation`` lines. Blank lines and lines starting with '#' are skipped.
        Raises:
            ConfigError: For malformed lines or unknown orientation names.
        """
        entries = {}
        for number, line in enumerate(lines, 1):
            line = line.rstrip('\r\n')
            if not line.strip() or line.lstrip().startswith('#'):
                continue
            parts = line.split('\t')
            if len(parts) != 2:
                raise ConfigError("%s:%d: expected 'label<TAB>orientation'." % (source, number))
            try:
                entries[parts[0]] = OrientationTarget(parts[1]).kind
            except ValueError as err:
                raise ConfigError("%s:%d: %s" % (source, number, err))
        return cls(entries)

    @classmethod
    def load(cls, path):
        try:
            with io.open(path, 'r', encoding='utf-8') as handle:
                return cls.from_lines(handle, source=path)
        except (IOError, OSError) as err:
            raise ConfigError("Could not read category table '%s': %s" % (path, err))

    @classmethod
    def default(cls):
        """ The shipped table of object classes and their orientation factors. """
        data = pkgutil.get_data('orientquadrics', 'data/categories.tsv').decode('utf-8')
        return cls.from_lines(data.splitlines(), source='categories.tsv')

    def lookup(self, label):
        return self._table.get(_normalize_label(label), Orientation.UNASSIGNED)

    def labels(self, kind=None):
        return sorted(label for label, value in self._table.items() if kind is None or value is kind)

    def to_lines(self):
        return ['%s\t%s' % (label, self._table[label].value) for label in sorted(self._table)]

    def __contains__(self, label):
        return _normalize_label(label) in self._table

    def __len__(self):
        return len(self._table)


class Detection(object):
    """ A single detection of a track.

    Attributes:
        pose_index (int): Index of the observing pose.
        box (BoundingBox2D): Detected box in pixels.
        scores (numpy.ndarray): Class scores over the track vocabulary.
    """

    __slots__ = ('pose_index', 'box', 'scores')

    def __init__(self, pose_index, box, scores):
        self.pose_index = int(pose_index)
        self.box = box
        self.scores = frozen_array(scores)


class DetectionTrack(object):
    """ All detections associated with one physical object.

    Attributes:
        landmark_id (int): Identifier of the object.
        vocabulary (tuple): Category labels the score vectors refer to.
        detections (list): ``Detection`` instances in observation order.
    """

    def __init__(self, landmark_id, vocabulary, detections=None):
        self.landmark_id = int(landmark_id)
        self.vocabulary = tuple(vocabulary)
        if any(not isinstance(label, string_types) for label in self.vocabulary):
            raise ValueError("Track vocabulary must consist of labels.")
        self.detections = []
        for det in detections or []:
            self.add(det.pose_index, det.box, det.scores)

    def add(self, pose_index, box, scores):
        scores = np.asarray(scores, dtype=float)
        if scores.shape != (len(self.vocabulary),):
            raise ValueError("Score vector of length %d does not match vocabulary of size %d."
                             % (scores.size, len(self.vocabulary)))
        if np.any(scores < 0) or np.any(scores > 1):
            raise ValueError("Detection scores must lie in [0, 1].")
        self.detections.append(Detection(pose_index, box, scores))

    def pose_indices(self):
        return sorted(set(det.pose_index for det in self.detections))

    def __len__(self):
        return len(self.detections)

    def __repr__(self):
        return "<%s(%d, %d detections)@%s>" % (type(self).__name__, self.landmark_id, len(self), id(self))


def aggregate_label(track):
    """ Averages the detection scores of a track and returns the most likely label.

    Sums are exactly rounded so the result does not depend on the detection order; ties are broken
    by the lexicographically smallest label.

    Returns:
        tuple: (label, mean score vector)
    Raises:
        EmptyTrack: If the track has no detections.
    """
    if not track.detections:
        raise EmptyTrack("Track %d has no detections." % track.landmark_id)
    count = float(len(track.detections))
    mean = np.array([math.fsum(det.scores[idx] for det in track.detections) / count
                     for idx in range(len(track.vocabulary))])
    best = mean.max()
    label = min(label for label, score in zip(track.vocabulary, mean) if score == best)
    return label, mean


def reject_high_variance(track, threshold_px=DEFAULT_VARIANCE_THRESHOLD):
    """ True iff the population standard deviation of the box widths or of the box heights of a
        track reaches ``threshold_px``.
    Raises:
        EmptyTrack: If the track has no detections.
    """
    if not track.detections:
        raise EmptyTrack("Track %d has no detections." % track.landmark_id)
    widths = np.array([det.box.width for det in track.detections])
    heights = np.array([det.box.height for det in track.detections])
    return bool(np.std(widths) >= threshold_px or np.std(heights) >= threshold_px)


def orientation_target(label, table):
    """ Orientation target of ``label``; labels missing from ``table`` are unassigned. """
    return OrientationTarget(table.lookup(label))


def is_truncated(box, intrinsics, margin=1.0):
    """ True if ``box`` touches the image border, i.e. it may have been clipped. """
    return (box.xmin <= margin or box.ymin <= margin
            or box.xmax >= intrinsics.width - margin or box.ymax >= intrinsics.height - margin)

from unittest import TestCase

import numpy as np

from orientquadrics.core import LengthMismatch, UnmatchedLandmark
from orientquadrics.evaluation import (METRICS, MetricReport, aggregate, align_trajectory, ate, axis_deviation,
                                       evaluate, landmark_position_error, landmark_quality_error,
                                       landmark_shape_error, mean_axis_deviation, reports_to_csv)
from orientquadrics.factors import Orientation
from orientquadrics.geometry import Box3D, ConstrainedDualQuadric, Pose

from .utils import random_pose, rotation_about, small_simulation


def unit_box(center=(0.0, 0.0, 0.0), half=(1.0, 1.0, 1.0)):
    return Box3D(center, half)


def quadric(center=(0.0, 0.0, 0.0), radii=(1.0, 1.0, 1.0)):
    return ConstrainedDualQuadric(np.eye(3), center, radii)


class TestAte(TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(11)
        self.truth = [random_pose(self.rng, 2.0) for _ in range(10)]

    def test_identical(self):
        self.assertAlmostEqual(ate(self.truth, self.truth), 0.0, places=9)

    def test_rigid_transform_removed(self):
        offset = Pose(rotation_about([0, 1, 1], 40.0), [1.0, -2.0, 0.5])
        moved = [offset.compose(pose) for pose in self.truth]
        self.assertAlmostEqual(ate(moved, self.truth), 0.0, places=9)
        self.assertGreater(ate(moved, self.truth, align=False), 1.0)

    def test_two_pose_offset(self):
        truth = [Pose.identity(), Pose(translation=[1.0, 0.0, 0.0])]
        estimate = [Pose.identity(), Pose(translation=[1.1, 0.0, 0.0])]
        self.assertAlmostEqual(ate(estimate, truth, align=False), 0.1 / np.sqrt(2.0))

    def test_alignment_never_worse(self):
        estimate = [pose.retract(self.rng.normal(scale=0.1, size=6)) for pose in self.truth]
        self.assertLessEqual(ate(estimate, self.truth), ate(estimate, self.truth, align=False) + 1e-12)

    def test_alignment_is_proper_rotation(self):
        points = self.rng.normal(size=(8, 3))
        rotation, _ = align_trajectory(points, -points)
        self.assertAlmostEqual(np.linalg.det(rotation), 1.0)

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch):
            ate(self.truth[:3], self.truth[:4])
        with self.assertRaises(LengthMismatch):
            ate(self.truth[:1], self.truth[:1])


class TestLandmarkErrors(TestCase):

    def test_position(self):
        truth = {1: unit_box(), 2: unit_box((5.0, 0.0, 0.0))}
        self.assertEqual(landmark_position_error({1: quadric()}, truth), 0.0)
        self.assertAlmostEqual(landmark_position_error({1: quadric((0.3, 0.0, 0.4))}, truth), 0.5)
        estimates = {1: quadric((0.1, 0.0, 0.0)), 2: quadric((5.0, 0.2, 0.0))}
        self.assertAlmostEqual(landmark_position_error(estimates, truth), np.sqrt(0.025))

    def test_shape(self):
        truth = {1: unit_box((3.0, 0.0, 0.0))}
        self.assertAlmostEqual(landmark_shape_error({1: quadric()}, truth), 0.0)
        self.assertAlmostEqual(landmark_shape_error({1: quadric(radii=(0.5, 0.5, 0.5))}, truth), 0.875)
        self.assertAlmostEqual(landmark_shape_error({1: quadric(radii=(2.0, 1.0, 1.0))}, truth), 0.5)

    def test_quality(self):
        truth = {1: unit_box(half=(0.5, 0.5, 0.5))}
        self.assertAlmostEqual(landmark_quality_error({1: quadric(radii=(0.5, 0.5, 0.5))}, truth), 0.0)
        self.assertEqual(landmark_quality_error({1: quadric((3.0, 0.0, 0.0), (0.5, 0.5, 0.5))}, truth), 1.0)
        self.assertAlmostEqual(landmark_quality_error({1: quadric((0.5, 0.0, 0.0), (0.5, 0.5, 0.5))}, truth),
                               2.0 / 3.0)

    def test_quality_equals_shape_when_centered(self):
        truth = {1: unit_box((1.0, 2.0, 0.5), (0.4, 0.3, 0.2))}
        estimate = {1: quadric((1.0, 2.0, 0.5), (0.3, 0.3, 0.25))}
        self.assertAlmostEqual(landmark_quality_error(estimate, truth), landmark_shape_error(estimate, truth))

    def test_rotation_inflates_quality_error(self):
        truth = {1: unit_box(half=(0.5, 0.2, 0.2))}
        aligned = {1: quadric(radii=(0.5, 0.2, 0.2))}
        rotated = {1: ConstrainedDualQuadric(rotation_about([0, 0, 1], 45.0), [0, 0, 0], [0.5, 0.2, 0.2])}
        self.assertGreater(landmark_quality_error(rotated, truth), landmark_quality_error(aligned, truth))

    def test_unmatched(self):
        with self.assertRaises(UnmatchedLandmark):
            landmark_position_error({3: quadric()}, {1: unit_box()})
        with self.assertRaises(UnmatchedLandmark):
            landmark_shape_error({}, {1: unit_box()})


class TestAxisDeviation(TestCase):

    def test_values(self):
        upright = ConstrainedDualQuadric(radii=[0.1, 0.2, 0.4])
        tilted = ConstrainedDualQuadric(rotation_about([1, 0, 0], 30.0), radii=[0.1, 0.2, 0.4])
        self.assertAlmostEqual(axis_deviation(upright, Orientation.VERTICAL), 0.0)
        self.assertAlmostEqual(axis_deviation(upright, Orientation.HORIZONTAL), 90.0)
        self.assertAlmostEqual(axis_deviation(tilted, Orientation.VERTICAL), 30.0)
        self.assertAlmostEqual(axis_deviation(tilted, Orientation.HORIZONTAL), 60.0)
        self.assertIsNone(axis_deviation(upright, Orientation.UNASSIGNED))
        self.assertIsNone(axis_deviation(ConstrainedDualQuadric(), Orientation.VERTICAL))

    def test_mean(self):
        estimates = {1: ConstrainedDualQuadric(radii=[0.1, 0.2, 0.4]),
                     2: ConstrainedDualQuadric(rotation_about([1, 0, 0], 30.0), radii=[0.1, 0.2, 0.4]),
                     3: ConstrainedDualQuadric()}
        kinds = {1: Orientation.VERTICAL, 2: Orientation.VERTICAL, 3: Orientation.HORIZONTAL}
        self.assertAlmostEqual(mean_axis_deviation(estimates, kinds), 15.0)
        self.assertIsNone(mean_axis_deviation(estimates, {}))


class TestReports(TestCase):

    def test_evaluate_ground_truth(self):
        dataset = small_simulation(n_objects=3)
        estimates = dict((obj.landmark_id, obj.quadric) for obj in dataset.landmarks_gt)
        report = evaluate(estimates, dataset.poses_gt, dataset, metadata={'seed': 1})
        self.assertAlmostEqual(report.ate_m, 0.0, places=9)
        self.assertAlmostEqual(report.landmark_position_m, 0.0, places=9)
        self.assertAlmostEqual(report.landmark_shape, 0.0, places=9)
        self.assertAlmostEqual(report.landmark_quality, 0.0, places=9)
        self.assertIsNone(report.odometry_ate_m)
        self.assertEqual(sorted(report.landmarks), sorted(estimates))
        self.assertEqual(list(report.metrics()), list(METRICS))

    def test_evaluate_without_landmarks(self):
        dataset = small_simulation(n_objects=2)
        report = evaluate({}, dataset.poses_gt, dataset)
        self.assertIsNone(report.landmark_position_m)
        self.assertIsNone(report.landmark_quality)
        self.assertIsNone(report.axis_deviation_deg)
        self.assertEqual(report.landmarks, {})

    def test_shape_range(self):
        with self.assertRaises(ValueError):
            MetricReport(0.1, 0.1, 1.5, 0.2)

    def test_dict_round_trip(self):
        report = MetricReport(0.1, 0.2, 0.3, 0.4, odometry_ate_m=0.5, landmarks={3: {'position_m': 0.2}},
                              metadata={'seed': 4, 'variant': 'orientation'})
        loaded = MetricReport.from_dict(report.to_dict())
        self.assertEqual(loaded.to_dict(), report.to_dict())
        self.assertEqual(list(loaded.landmarks), [3])

    def test_aggregate(self):
        reports = [MetricReport(0.1, 0.2, 0.3, 0.4), MetricReport(0.3, 0.4, 0.5, 0.6, axis_deviation_deg=2.0)]
        mean, stds = aggregate(reports, {'variant': 'standalone'})
        self.assertAlmostEqual(mean.ate_m, 0.2)
        self.assertAlmostEqual(stds['ate_m'], 0.1)
        self.assertEqual(mean.axis_deviation_deg, 2.0)
        self.assertIsNone(mean.odometry_ate_m)
        self.assertEqual(mean.metadata['trials'], 2)
        self.assertEqual(mean.metadata['variant'], 'standalone')
        with self.assertRaises(ValueError):
            aggregate([])

    def test_csv(self):
        reports = [MetricReport(0.125, 0.2, 0.3, 0.4, metadata={'seed': 0}),
                   MetricReport(0.25, 0.5, 0.75, 1.0, metadata={'seed': 1})]
        mean, _ = aggregate(reports, {'seed': 'mean'})
        text = reports_to_csv(reports, ['seed'], summary=[mean])
        lines = text.splitlines()
        self.assertEqual(lines[0], 'seed,' + ','.join(METRICS))
        self.assertEqual(lines[1], '0,0.125,,0.2,0.3,0.4,')
        self.assertTrue(lines[3].startswith('mean,0.1875,'))
        self.assertEqual(len(lines), 4)
        self.assertEqual(text, reports_to_csv(reports, ['seed'], summary=[mean]))

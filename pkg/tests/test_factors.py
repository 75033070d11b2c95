from unittest import TestCase

import numpy as np

from orientquadrics.core import BehindCamera, DegenerateShape
from orientquadrics.factors import (MEAN_NORM_3D, BoxFactor, NoiseModel, OdometryFactor, Orientation,
                                    OrientationFactor, OrientationTarget, PriorFactor, bbox_residual,
                                    numeric_jacobian, odometry_residual, orientation_residual, step_sigmas)
from orientquadrics.geometry import (BoundingBox2D, CameraIntrinsics, ConstrainedDualQuadric, Pose, apply_motion,
                                     predicted_box)

from .utils import random_pose, random_quadric, rotation_about

try:
    from unittest.mock import MagicMock
except ImportError:
    from mock import MagicMock


def forward_jacobian(residual_fn, variables, step):
    """ Forward difference reference, independent of ``numeric_jacobian``. """
    base = np.atleast_1d(residual_fn(*variables))
    columns = []
    for idx, variable in enumerate(variables):
        for coord in range(variable.dim):
            delta = np.zeros(variable.dim)
            delta[coord] = step
            moved = list(variables)
            moved[idx] = variable.retract(delta)
            columns.append((np.atleast_1d(residual_fn(*moved)) - base) / step)
    return np.column_stack(columns)


def assert_jacobians_close(test, numeric, reference, rtol=1e-4):
    scale = max(np.abs(reference).max(), 1e-3)
    test.assertLess(np.abs(numeric - reference).max() / scale, rtol)


class TestNoiseModel(TestCase):

    def test_whiten(self):
        noise = NoiseModel([2.0, 4.0])
        np.testing.assert_allclose(noise.whiten([2.0, 2.0]), [1.0, 0.5])
        self.assertAlmostEqual(noise.squared_mahalanobis([2.0, 2.0]), 1.25)
        residual = np.array([0.3, -1.2])
        covariance = np.diag(noise.sigmas ** 2)
        self.assertAlmostEqual(noise.squared_mahalanobis(residual),
                               residual.dot(np.linalg.inv(covariance)).dot(residual))

    def test_positive(self):
        with self.assertRaises(ValueError):
            NoiseModel([1.0, 0.0])
        with self.assertRaises(ValueError):
            NoiseModel.isotropic(3, -1.0)

    def test_step_sigmas(self):
        motion = Pose(rotation_about([0, 0, 1], 10.0), [0.3, 0.4, 0.0])
        rot, trans = step_sigmas(motion, 0.05, 0.15, 0.0)
        self.assertAlmostEqual(trans * MEAN_NORM_3D, 0.05 * 0.5)
        self.assertAlmostEqual(rot * MEAN_NORM_3D, 0.15 * np.radians(10.0))
        rot, _ = step_sigmas(Pose(translation=[0.1, 0.0, 0.0]), 0.05, 0.15, np.radians(0.15))
        self.assertAlmostEqual(rot * MEAN_NORM_3D, np.radians(0.15))
        self.assertEqual(step_sigmas(motion, 0.0, 0.0)[0], 0.0)


class TestOrientationTarget(TestCase):

    def test_targets(self):
        self.assertEqual(OrientationTarget.vertical().target, 1.0)
        self.assertEqual(OrientationTarget.horizontal().target, 0.0)
        self.assertIsNone(OrientationTarget.unassigned().target)
        self.assertFalse(OrientationTarget().is_assigned)

    def test_from_string(self):
        self.assertEqual(OrientationTarget(' Vertical'), OrientationTarget(Orientation.VERTICAL))
        self.assertNotEqual(OrientationTarget('horizontal'), OrientationTarget.vertical())
        with self.assertRaises(ValueError):
            OrientationTarget('diagonal')


class TestResiduals(TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(21)
        self.intrinsics = CameraIntrinsics()

    def test_odometry_zero(self):
        pose = random_pose(self.rng)
        motion = random_pose(self.rng)
        np.testing.assert_allclose(odometry_residual(pose, apply_motion(pose, motion), motion), np.zeros(6),
                                   atol=1e-12)

    def test_odometry_offset(self):
        pose = random_pose(self.rng)
        motion = random_pose(self.rng)
        actual = apply_motion(pose, motion).compose(Pose(translation=[0.0, 0.0, 0.1]))
        residual = odometry_residual(pose, actual, motion)
        self.assertAlmostEqual(np.linalg.norm(residual[3:]), 0.1)
        np.testing.assert_allclose(residual[:3], np.zeros(3), atol=1e-12)

    def test_odometry_left_invariance(self):
        pose, nxt, motion, common = [random_pose(self.rng) for _ in range(4)]
        before = np.linalg.norm(odometry_residual(pose, nxt, motion))
        after = np.linalg.norm(odometry_residual(common.compose(pose), common.compose(nxt), motion))
        self.assertAlmostEqual(before, after, places=9)

    def test_bbox_zero_and_shift(self):
        pose = Pose.look_at([0.0, -4.0, 1.0], [0.0, 0.0, 0.5])
        quadric = ConstrainedDualQuadric(translation=[0.0, 0.0, 0.5], radii=[0.3, 0.2, 0.4])
        box = predicted_box(pose, self.intrinsics, quadric)
        np.testing.assert_allclose(bbox_residual(pose, quadric, box, self.intrinsics), np.zeros(4), atol=1e-12)
        shifted = BoundingBox2D(box.xmin + 2.0, box.ymin, box.xmax + 2.0, box.ymax)
        np.testing.assert_allclose(bbox_residual(pose, quadric, shifted, self.intrinsics), [2.0, 0.0, 2.0, 0.0],
                                   atol=1e-9)

    def test_bbox_sphere_example(self):
        measured = BoundingBox2D(254.68, 174.68, 385.32, 305.32)
        residual = bbox_residual(Pose.identity(), ConstrainedDualQuadric(translation=[0, 0, 5.0]), measured,
                                 self.intrinsics)
        self.assertLess(np.abs(residual).max(), 0.1)

    def test_bbox_behind(self):
        with self.assertRaises(BehindCamera):
            bbox_residual(Pose.identity(), ConstrainedDualQuadric(translation=[0, 0, -3.0]),
                          BoundingBox2D(0, 0, 1, 1), self.intrinsics)

    def test_orientation_values(self):
        upright = ConstrainedDualQuadric(radii=[0.1, 0.2, 0.3])
        flat = ConstrainedDualQuadric(radii=[0.3, 0.2, 0.1])
        tilted = ConstrainedDualQuadric(rotation_about([1, 0, 0], 45.0), radii=[0.1, 0.2, 0.3])
        self.assertEqual(orientation_residual(upright, OrientationTarget.vertical()), 0.0)
        self.assertEqual(orientation_residual(flat, OrientationTarget.horizontal()), 0.0)
        self.assertAlmostEqual(orientation_residual(tilted, OrientationTarget.vertical()), 0.29289322, places=8)
        self.assertAlmostEqual(orientation_residual(tilted, OrientationTarget.vertical()), 1.0 - np.cos(np.pi / 4),
                               delta=1e-9)

    def test_horizontal_in_plane(self):
        for yaw in np.linspace(-180.0, 180.0, 13):
            quadric = ConstrainedDualQuadric(rotation_about([0, 0, 1], yaw), radii=[0.5, 0.2, 0.1])
            self.assertAlmostEqual(orientation_residual(quadric, OrientationTarget.horizontal()), 0.0, places=12)

    def test_orientation_sum(self):
        for _ in range(20):
            quadric = random_quadric(self.rng)
            total = (orientation_residual(quadric, OrientationTarget.vertical())
                     - orientation_residual(quadric, OrientationTarget.horizontal()))
            self.assertAlmostEqual(total, 1.0, places=12)

    def test_orientation_errors(self):
        with self.assertRaises(ValueError):
            orientation_residual(ConstrainedDualQuadric(radii=[1, 2, 3]), OrientationTarget.unassigned())
        with self.assertRaises(DegenerateShape):
            orientation_residual(ConstrainedDualQuadric(), OrientationTarget.vertical())


class TestJacobians(TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(5)
        self.intrinsics = CameraIntrinsics()

    def test_linear(self):
        matrix = self.rng.normal(size=(4, 3))
        jac = numeric_jacobian(lambda vec: matrix.dot(vec), [np.zeros(3)])
        np.testing.assert_allclose(jac, matrix, atol=1e-8)
        with self.assertRaises(ValueError):
            numeric_jacobian(lambda vec: vec, [np.zeros(3)], step=0.0)

    def test_orientation_translation_block(self):
        quadric = random_quadric(self.rng)
        jac = numeric_jacobian(lambda q: np.array([orientation_residual(q, OrientationTarget.vertical())]),
                               [quadric])
        np.testing.assert_array_equal(jac[:, 3:6], np.zeros((1, 3)))

    def test_against_forward_differences(self):
        step = 1e-6
        for _ in range(50):
            pose, motion = [random_pose(self.rng, 0.5) for _ in range(2)]
            nxt = apply_motion(pose, motion).retract(self.rng.normal(scale=0.1, size=6))
            assert_jacobians_close(self, numeric_jacobian(lambda a, b: odometry_residual(a, b, motion), [pose, nxt],
                                                          step),
                                   forward_jacobian(lambda a, b: odometry_residual(a, b, motion), [pose, nxt],
                                                    step / 10.0))
            quadric = random_quadric(self.rng)
            try:
                fn = lambda q: np.array([orientation_residual(q, OrientationTarget.vertical())])  # noqa: E731
                assert_jacobians_close(self, numeric_jacobian(fn, [quadric], step),
                                       forward_jacobian(fn, [quadric], step / 10.0))
            except DegenerateShape:  # pragma: no cover
                pass
            camera = Pose.look_at(self.rng.uniform(-1, 1, 3) + [0.0, -4.0, 1.0], quadric.translation)
            measured = BoundingBox2D(200.0, 150.0, 400.0, 300.0)

            def box_fn(p, q):
                return bbox_residual(p, q, measured, self.intrinsics)
            assert_jacobians_close(self, numeric_jacobian(box_fn, [camera, quadric], step),
                                   forward_jacobian(box_fn, [camera, quadric], step / 10.0))


class TestFactors(TestCase):

    def setUp(self):
        self.intrinsics = CameraIntrinsics()
        self.pose = Pose.look_at([0.0, -4.0, 1.0], [0.0, 0.0, 0.5])
        self.quadric = ConstrainedDualQuadric(translation=[0.0, 0.0, 0.5], radii=[0.3, 0.2, 0.4])
        self.values = {'x0': self.pose, 'q1': self.quadric}

    def test_prior(self):
        factor = PriorFactor('x0', self.pose)
        self.assertEqual(factor.error(self.values), 0.0)
        moved = {'x0': self.pose.retract([0.0, 0.0, 0.0, 1e-6, 0.0, 0.0])}
        self.assertAlmostEqual(factor.error(moved), 1.0, places=6)

    def test_box_error_is_mahalanobis(self):
        box = predicted_box(self.pose, self.intrinsics, self.quadric)
        measured = BoundingBox2D(box.xmin + 4.0, box.ymin - 8.0, box.xmax, box.ymax + 2.0)
        factor = BoxFactor('x0', 'q1', measured, self.intrinsics)
        self.assertAlmostEqual(factor.error(self.values), 1.0 + 4.0 + 0.25, places=9)
        residual, jacobian = factor.linearize(self.values)
        self.assertEqual(jacobian.shape, (4, 15))
        np.testing.assert_allclose(residual, np.array([4.0, -8.0, 0.0, 2.0]) / 4.0, atol=1e-9)

    def test_box_degenerate_policy(self):
        factor = BoxFactor('x0', 'q1', BoundingBox2D(0, 0, 10, 10), self.intrinsics)
        behind = {'x0': Pose.look_at([0.0, 4.0, 1.0], [0.0, 8.0, 1.0]), 'q1': self.quadric}
        self.assertEqual(factor.error(behind), 0.0)
        residual, jacobian = factor.linearize(behind)
        self.assertFalse(residual.any() or jacobian.any())
        with self.assertRaises(BehindCamera):
            factor.error(behind, policy='raise')
        self.assertFalse(factor.is_active(behind))
        self.assertTrue(factor.is_active(self.values))

    def test_orientation_factor(self):
        factor = OrientationFactor('q1', OrientationTarget.vertical(), NoiseModel.isotropic(1, 0.5))
        tilted = {'q1': ConstrainedDualQuadric(rotation_about([1, 0, 0], 45.0), radii=[0.1, 0.2, 0.3])}
        self.assertAlmostEqual(factor.error(tilted), (0.29289321881 / 0.5) ** 2, places=9)
        self.assertEqual(factor.error({'q1': ConstrainedDualQuadric()}), 0.0)
        with self.assertRaises(ValueError):
            OrientationFactor('q1', OrientationTarget.unassigned())

    def test_odometry_factor_keys(self):
        nxt = self.pose.compose(Pose(translation=[0.1, 0.0, 0.0]))
        factor = OdometryFactor('x0', 'x1', Pose(translation=[0.1, 0.0, 0.0]), NoiseModel.isotropic(6, 0.1))
        self.assertEqual(factor.keys, ('x0', 'x1'))
        self.assertAlmostEqual(factor.error({'x0': self.pose, 'x1': nxt}), 0.0, places=20)

    def test_evaluate_called_with_values(self):
        factor = OrientationFactor('q1', OrientationTarget.horizontal())
        factor.evaluate = MagicMock(return_value=np.array([0.2]))
        self.assertAlmostEqual(factor.error(self.values), 4.0)
        factor.evaluate.assert_called_once_with(self.quadric)

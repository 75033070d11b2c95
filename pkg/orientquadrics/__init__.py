"""
orientquadrics
--------------

Object level SLAM with ellipsoid (dual quadric) landmarks whose estimated orientation is regularized by
semantic orientation factors: vertical object classes pull their major axis towards the global z axis,
horizontal classes into the ground plane.
"""

from __future__ import absolute_import
from .version import __version__
from .core import (QuadricSLAMError, ConfigError, DatasetError, SolverError, DegenerateShape, BehindCamera,
                   DegenerateConic, InconsistentDataset, EmptyTrack, LengthMismatch, UnmatchedLandmark,
                   SingularSystem, InsufficientViews, PlacementFailure, TrialError)
from .geometry import (Pose, CameraIntrinsics, BoundingBox2D, Box3D, DualConic, ConstrainedDualQuadric,
                       project_quadric, conic_bbox, major_axis, cosine_similarity_z, quadric_aabb)
from .factors import (NoiseModel, Orientation, OrientationTarget, odometry_residual, bbox_residual,
                      orientation_residual)
from .semantics import CategoryTable, DetectionTrack, aggregate_label, reject_high_variance, orientation_target
from .graph import (FactorGraph, Values, GraphConfig, SolverConfig, SolveStats, build_graph, total_error, optimize,
                    initialize_quadrics, prepare_problem)
from .simulator import NoiseConfig, SceneConfig, TrajectoryConfig, SimulatedDataset, simulate
from .evaluation import (MetricReport, ate, landmark_position_error, landmark_shape_error, landmark_quality_error,
                         axis_deviation)

__license__ = "MIT"
__summary__ = "Dual quadric object SLAM with semantic orientation factors"

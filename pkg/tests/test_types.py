"""Domain type invariants: angles, boxes, cameras, planes."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxlab.errors import InvalidBoxError
from boxlab.types import Box3D, CameraModel, ClassLabel, Plane, Vec3, wrap_angle

from conftest import make_box, ring_camera


class TestWrapAngle:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            (0.0, 0.0),
            (math.pi, math.pi),
            (-math.pi, math.pi),  # half-open interval: -pi maps to +pi
            (3.0 * math.pi / 2.0, -math.pi / 2.0),
            (2.0 * math.pi, 0.0),
            (-7.0, -7.0 + 2.0 * math.pi),
        ],
    )
    def test_known_values(self, raw, expected):
        assert wrap_angle(raw) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(-1e6, 1e6))
    def test_always_in_half_open_interval(self, a):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi

    @given(st.floats(-100.0, 100.0))
    def test_preserves_angle_mod_two_pi(self, a):
        w = wrap_angle(a)
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
        assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)


class TestVec3:
    def test_rejects_non_finite(self):
        with pytest.raises(InvalidBoxError):
            Vec3(math.nan, 0.0, 0.0)
        with pytest.raises(InvalidBoxError):
            Vec3(0.0, math.inf, 0.0)

    def test_array_round_trip(self):
        v = Vec3(1.5, -2.0, 3.25)
        assert Vec3.from_array(v.to_array()) == v
        assert tuple(v) == (1.5, -2.0, 3.25)


class TestBox3D:
    def test_rejects_non_positive_dims(self):
        for dims in [(0.0, 1, 1), (1, -2, 1), (1, 1, 0.0)]:
            with pytest.raises(InvalidBoxError):
                make_box(dx=dims[0], dy=dims[1], dz=dims[2])

    def test_rejects_unknown_class(self):
        with pytest.raises(InvalidBoxError):
            Box3D(Vec3(0, 0, 0), Vec3(1, 1, 1), 0.0, "VAN", 0)

    def test_rejects_negative_track(self):
        with pytest.raises(InvalidBoxError):
            make_box(track_id=-1)

    def test_yaw_normalized_on_construction(self):
        assert make_box(yaw=3.0 * math.pi).yaw == pytest.approx(math.pi)
        assert make_box(yaw=-math.pi).yaw == pytest.approx(math.pi)
        assert -math.pi < make_box(yaw=123.456).yaw <= math.pi

    def test_class_set_is_closed(self):
        assert {c.value for c in ClassLabel} == {
            "CAR", "PEDESTRIAN", "MOTORCYCLE", "BICYCLE", "TRUCK",
        }

    def test_volume(self):
        assert make_box(dx=4, dy=2, dz=1.5).volume == pytest.approx(12.0)

    def test_params7_layout(self):
        b = make_box(cx=1, cy=2, cz=3, dx=4, dy=5, dz=6, yaw=0.5)
        assert np.array_equal(b.params7(), np.array([1, 2, 3, 4, 5, 6, 0.5]))


class TestPlane:
    def test_requires_unit_normal(self):
        with pytest.raises(InvalidBoxError):
            Plane(Vec3(0.0, 0.0, 2.0), 0.0)

    def test_signed_distance_sign_convention(self):
        plane = Plane(Vec3(0.0, 0.0, 1.0), -1.0)  # z = 1 plane
        d = plane.signed_distance(np.array([[0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]))
        assert d[0] == pytest.approx(2.0)
        assert d[1] == pytest.approx(-1.0)


class TestCameraModel:
    def test_accepts_valid_rig_camera(self):
        cam = ring_camera("front", 0.0)
        assert cam.fx == 800.0 and cam.cx == 640.0 and cam.skew == 0.0
        assert cam.width == 1280 and cam.height == 720

    def test_rejects_non_orthonormal_rotation(self):
        with pytest.raises(InvalidBoxError):
            CameraModel(
                "bad",
                [800, 0, 640, 0, 800, 360, 0, 0, 1],
                [1, 0, 0, 0, 1, 0, 0, 0, 2],  # scaled row
                [0, 0, 0],
                1280,
                720,
            )

    def test_rejects_reflection(self):
        with pytest.raises(InvalidBoxError):
            CameraModel(
                "mirror",
                [800, 0, 640, 0, 800, 360, 0, 0, 1],
                [1, 0, 0, 0, 1, 0, 0, 0, -1],  # det -1
                [0, 0, 0],
                1280,
                720,
            )

    def test_rejects_principal_point_outside_image(self):
        with pytest.raises(InvalidBoxError):
            CameraModel(
                "off",
                [800, 0, 2000, 0, 800, 360, 0, 0, 1],
                [1, 0, 0, 0, 1, 0, 0, 0, 1],
                [0, 0, 0],
                1280,
                720,
            )

    def test_rejects_non_positive_focal(self):
        with pytest.raises(InvalidBoxError):
            CameraModel(
                "zoom",
                [-800, 0, 640, 0, 800, 360, 0, 0, 1],
                [1, 0, 0, 0, 1, 0, 0, 0, 1],
                [0, 0, 0],
                1280,
                720,
            )

    def test_matrices_read_only(self):
        cam = ring_camera("front", 0.0)
        with pytest.raises(ValueError):
            cam.intrinsics[0, 0] = 1.0

"""Pinhole projection against an independent matrix-route oracle."""
import math

import numpy as np
import pytest

from boxlab.geometry import Z_NEAR, box_corners, project_box, project_box_all, project_point
from boxlab.types import CameraModel

from conftest import make_box, ring_camera
from oracles import corners_oracle, project_box_oracle, project_point_oracle


def identity_camera(fx=1000.0, fy=1000.0, cx=500.0, cy=500.0, w=1000, h=1000):
    k = np.array([[fx, 0.0, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]])
    return CameraModel("ident", k, np.eye(3), np.zeros(3), w, h)


class TestProjectPoint:
    def test_optical_axis_hits_principal_point(self):
        cam = identity_camera()
        assert project_point(cam, np.array([0.0, 0.0, 5.0])) == (500.0, 500.0)

    def test_unit_offset_at_ten_meters(self):
        cam = identity_camera()
        u, v = project_point(cam, np.array([1.0, 0.0, 10.0]))
        assert u == 600.0
        assert v == 500.0

    def test_behind_camera_is_none(self):
        cam = identity_camera()
        assert project_point(cam, np.array([0.0, 0.0, -5.0])) is None

    def test_near_plane_cutoff(self):
        cam = identity_camera()
        assert project_point(cam, np.array([0.0, 0.0, Z_NEAR])) is None
        assert project_point(cam, np.array([0.0, 0.0, Z_NEAR + 1e-6])) is not None

    def test_matches_oracle_on_ring_cameras(self):
        rng = np.random.default_rng(3)
        cams = [ring_camera(f"c{i}", i * math.pi / 3) for i in range(6)]
        pts = rng.uniform(-20, 20, size=(100, 3))
        pts[:, 2] = rng.uniform(-1, 3, size=100)
        for cam in cams:
            for p in pts:
                got = project_point(cam, p)
                want = project_point_oracle(
                    cam.rotation, cam.translation, cam.intrinsics, p
                )
                assert got == want  # bitwise, both routes use scalar arithmetic

    def test_points_outside_image_still_project(self):
        # No image-bounds clipping at the point level.
        cam = identity_camera()
        u, v = project_point(cam, np.array([50.0, 0.0, 1.0]))
        assert u > 1000.0


class TestBoxCorners:
    def test_unit_box_at_origin(self):
        got = box_corners(make_box(dx=2, dy=2, dz=2))
        assert got.shape == (8, 3)
        # Bottom face z = -1, top face z = +1.
        assert np.all(got[:4, 2] == -1.0)
        assert np.all(got[4:, 2] == 1.0)

    def test_matches_rotation_matrix_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            c = rng.uniform(-10, 10, 3)
            d = rng.uniform(0.5, 5, 3)
            yaw = rng.uniform(-math.pi, math.pi)
            box = make_box(cx=c[0], cy=c[1], cz=c[2], dx=d[0], dy=d[1], dz=d[2], yaw=yaw)
            np.testing.assert_allclose(
                box_corners(box), corners_oracle(c, d, yaw), atol=1e-12
            )

    def test_frozen_values_yaw_pi_over_six(self):
        box = make_box(cx=10, cy=5, cz=0, dx=4, dy=2, dz=1.5, yaw=math.pi / 6)
        got = box_corners(box)
        want_bottom = np.array(
            [
                [11.232050807568877, 6.866025403784438, -0.75],
                [7.767949192431123, 4.866025403784439, -0.75],
                [8.767949192431123, 3.1339745962155616, -0.75],
                [12.232050807568877, 5.133974596215561, -0.75],
            ]
        )
        np.testing.assert_allclose(got[:4], want_bottom, atol=1e-12)
        np.testing.assert_allclose(got[4:, :2], want_bottom[:, :2], atol=1e-12)
        assert np.all(got[4:, 2] == 0.75)

    def test_centroid_is_center(self):
        box = make_box(cx=3, cy=-2, cz=1, yaw=0.9)
        np.testing.assert_allclose(
            box_corners(box).mean(axis=0), [3, -2, 1], atol=1e-12
        )

    def test_edge_lengths_match_dims(self):
        box = make_box(dx=4, dy=2, dz=1.5, yaw=0.37)
        c = box_corners(box)
        assert np.linalg.norm(c[0] - c[1]) == pytest.approx(4.0, abs=1e-12)
        assert np.linalg.norm(c[1] - c[2]) == pytest.approx(2.0, abs=1e-12)
        assert np.linalg.norm(c[0] - c[4]) == pytest.approx(1.5, abs=1e-12)


class TestProjectBox:
    def test_matches_oracle_exactly_on_ring(self):
        rng = np.random.default_rng(7)
        cams = [ring_camera(f"cam{i}", i * math.pi / 3) for i in range(6)]
        for _ in range(60):
            box = make_box(
                cx=rng.uniform(-15, 15),
                cy=rng.uniform(-15, 15),
                cz=rng.uniform(-0.5, 1.5),
                dx=rng.uniform(0.5, 5),
                dy=rng.uniform(0.5, 2.5),
                dz=rng.uniform(0.8, 2.2),
                yaw=rng.uniform(-math.pi, math.pi),
            )
            for cam in cams:
                got = project_box(cam, box)
                want = project_box_oracle(
                    cam.rotation,
                    cam.translation,
                    cam.intrinsics,
                    cam.width,
                    cam.height,
                    box_corners(box),
                )
                if want is None:
                    assert got is None
                    continue
                rect, count = want
                assert got is not None
                assert got.rect == rect  # bitwise
                assert got.visible_corner_count == count

    def test_box_behind_camera_is_none(self):
        cam = identity_camera()
        assert project_box(cam, make_box(cx=0, cy=0, cz=-20)) is None

    def test_box_straddling_near_plane_uses_visible_corners(self):
        cam = identity_camera()
        # Center past the near plane, half the box behind it.
        box = make_box(cx=0, cy=0, cz=1.0, dx=2, dy=2, dz=2, yaw=0.0)
        # Camera looks along +z here; box z spans [0, 2] in camera frame.
        got = project_box(cam, box)
        assert got is not None
        assert 0 < got.visible_corner_count < 8

    def test_rect_clipped_to_image(self):
        cam = identity_camera()
        box = make_box(cx=0, cy=0, cz=1.0, dx=4, dy=4, dz=0.5)
        got = project_box(cam, box)
        assert got is not None
        xmin, ymin, xmax, ymax = got.rect
        assert 0 <= xmin <= xmax <= cam.width
        assert 0 <= ymin <= ymax <= cam.height

    def test_fully_offscreen_is_none(self):
        cam = identity_camera()
        # In front of the camera but far off the left edge.
        box = make_box(cx=-500, cy=0, cz=10, dx=1, dy=1, dz=1)
        assert project_box(cam, box) is None

    def test_project_box_all_skips_blind_cameras(self):
        cams = [ring_camera(f"r{i}", i * math.pi / 3) for i in range(6)]
        box = make_box(cx=8, cy=0, cz=0.5)
        out = project_box_all(cams, box)
        names = {c.name for c in cams}
        assert 1 <= len(out) < 6
        for proj in out:
            assert proj.camera in names

    def test_box_behind_every_camera(self):
        # Single forward camera; box far behind it sees nothing.
        cam = identity_camera()
        assert project_box_all([cam], make_box(cx=0, cy=0, cz=-50)) == []

"""Tests for dynamic trajectory correction."""

import json

import numpy as np
import pytest

from src.fpdtrack.correction import FusionPolicy, fuse, fuse_with_flags, stabilize_static_track
from src.fpdtrack.errors import ConfigError, InvariantError
from src.fpdtrack.perception import ClipResult, CameraMotionResult, McmdConfig, MpdConfig
from tests.builders import make_tracks

STATIC_CAMERA = CameraMotionResult(False, 0.0, False, (ClipResult(0, 10, 0.0, False),), McmdConfig())
MOVING_CAMERA = CameraMotionResult(True, 0.9, True, (ClipResult(0, 10, 0.8, True),), McmdConfig())
POLICY = FusionPolicy(
    moving_camera_source="B",
    static_camera_static_source="A",
    static_camera_moving_source="B",
    mpd_reference_source="A",
)


@pytest.fixture
def sources():
    """A is exact on points 0 and 2 but wanders on point 1; B jitters everywhere."""
    rng = np.random.default_rng(21)
    base = np.tile(np.array([[[0.25, 0.5]], [[0.5, 0.5]], [[0.75, 0.25]]]), (1, 10, 1))
    a = base.copy()
    a[1, :, 0] += 0.01 * np.arange(10)
    b = base + rng.normal(0.0, 0.0005, size=base.shape)
    b[:, 0] = base[:, 0]
    visibility_b = np.ones((3, 10), dtype=bool)
    visibility_b[1, 4] = False
    return {"A": make_tracks(a, name="A"), "B": make_tracks(b, visibility_b, name="B")}


class TestFuse:
    """Branch selection and row assembly."""

    def test_moving_camera_copies_source(self, sources):
        fused, flags = fuse(sources, MOVING_CAMERA, POLICY)
        assert flags is None
        assert fused.coords.tobytes() == sources["B"].coords.tobytes()
        np.testing.assert_array_equal(fused.visibility, sources["B"].visibility)

    @pytest.mark.parametrize("rho", [1e-5, 0.00125, 0.5])
    def test_moving_camera_ignores_rho(self, sources, rho):
        fused, _ = fuse(sources, MOVING_CAMERA, POLICY, MpdConfig(rho=rho))
        assert fused == sources["B"]

    def test_static_camera_row_selection(self, sources):
        fused, flags = fuse(sources, STATIC_CAMERA, POLICY)
        assert flags.static_flags.tolist() == [True, False, True]
        np.testing.assert_array_equal(fused.coords[[0, 2]], sources["A"].coords[[0, 2]])
        np.testing.assert_array_equal(fused.coords[1], sources["B"].coords[1])

    def test_visibility_travels_with_row(self, sources):
        fused, _ = fuse(sources, STATIC_CAMERA, POLICY)
        assert not fused.visibility[1, 4]
        assert fused.visibility[[0, 2]].all()

    def test_identical_sources_idempotent(self, sources):
        same = {"A": sources["A"], "B": sources["A"].with_name("B")}
        fused, _ = fuse(same, STATIC_CAMERA, POLICY)
        assert fused == sources["A"]

    def test_fused_name_records_policy(self, sources):
        fused, _ = fuse(sources, STATIC_CAMERA, POLICY)
        assert fused.source_name.startswith("fpd[static-camera:")
        assert fuse(sources, MOVING_CAMERA, POLICY)[0].source_name == "fpd[moving-camera:B]"

    def test_label_permutation(self, sources):
        renamed = {"X": sources["B"], "Y": sources["A"]}
        policy = FusionPolicy(
            moving_camera_source="X",
            static_camera_static_source="Y",
            static_camera_moving_source="X",
            mpd_reference_source="Y",
        )
        assert fuse(renamed, STATIC_CAMERA, policy)[0] == fuse(sources, STATIC_CAMERA, POLICY)[0]

    def test_unknown_label(self, sources):
        with pytest.raises(ConfigError, match="unknown source"):
            fuse({"A": sources["A"]}, STATIC_CAMERA, POLICY)

    def test_shape_mismatch(self, sources):
        short = make_tracks(sources["B"].coords[:, :5], name="B")
        with pytest.raises(ConfigError):
            fuse({"A": sources["A"], "B": short}, STATIC_CAMERA, POLICY)

    def test_query_mismatch(self, sources):
        other = make_tracks(sources["B"].coords, query_frames=[0, 1, 0], name="B")
        with pytest.raises(ConfigError, match="different query points"):
            fuse({"A": sources["A"], "B": other}, STATIC_CAMERA, POLICY)

    def test_static_branch_needs_flags(self, sources):
        with pytest.raises(InvariantError):
            fuse_with_flags(sources, STATIC_CAMERA, POLICY, None)


class TestStabilize:
    def test_median_of_visible_frames(self):
        xy = np.array([[0.4, 0.5], [0.5, 0.6], [0.6, 0.4], [0.9, 0.9]])
        out = stabilize_static_track(xy, np.array([True, True, True, False]))
        np.testing.assert_allclose(out, np.tile([0.5, 0.5], (4, 1)))

    def test_no_visible_frames_unchanged(self):
        xy = np.array([[0.4, 0.5], [0.5, 0.6]])
        np.testing.assert_array_equal(stabilize_static_track(xy, np.zeros(2, dtype=bool)), xy)

    def test_policy_pins_static_rows(self, sources):
        policy = POLICY.model_copy(update={"static_camera_static_source": "B", "stabilize_static": True})
        fused, _ = fuse(sources, STATIC_CAMERA, policy)
        for i in (0, 2):
            assert np.ptp(fused.coords[i], axis=0).max() == 0.0
            np.testing.assert_allclose(fused.coords[i, 0], np.median(sources["B"].coords[i], axis=0))
        np.testing.assert_array_equal(fused.coords[1], sources["B"].coords[1])

    def test_off_by_default(self, sources):
        policy = POLICY.model_copy(update={"static_camera_static_source": "B"})
        fused, _ = fuse(sources, STATIC_CAMERA, policy)
        assert fused == sources["B"]


class TestFusionPolicy:
    """Policy documents."""

    def test_reference_defaults_to_static_source(self):
        policy = FusionPolicy(moving_camera_source="B", static_camera_static_source="A",
                              static_camera_moving_source="B")
        assert policy.mpd_reference_source == "A"

    def test_load(self, tmp_path):
        path = tmp_path / "policy.json"
        path.write_text(json.dumps({
            "moving_camera_source": "cotracker",
            "static_camera_static_source": "tapir",
            "static_camera_moving_source": "cotracker",
        }))
        policy = FusionPolicy.load(path)
        assert policy.mpd_reference_source == "tapir"
        assert policy.stabilize_static is False

    def test_load_rejects_unknown_field(self, tmp_path):
        path = tmp_path / "policy.json"
        path.write_text(json.dumps({**POLICY.model_dump(), "extra": 1}))
        with pytest.raises(ConfigError):
            FusionPolicy.load(path)

    def test_load_missing(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            FusionPolicy.load(tmp_path / "absent.json")

    def test_single_source(self, sources):
        policy = FusionPolicy.single_source("A")
        assert set(policy.labels) == {"A"}
        assert fuse(sources, STATIC_CAMERA, policy)[0] == sources["A"]
        assert fuse(sources, MOVING_CAMERA, policy)[0] == sources["A"]

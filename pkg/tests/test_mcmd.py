"""Tests for multi-granularity camera motion detection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.fpdtrack.errors import ConfigError, InvariantError
from src.fpdtrack.perception import (
    CameraMotionResult,
    ClipResult,
    McmdConfig,
    classify_profile,
    compute_ssim_profile,
    detect_camera_motion,
    dissimilar_fraction,
    moving_score,
    partition_clips,
)
from src.fpdtrack.synth import CameraSpec, SceneSpec, generate_scene
from src.fpdtrack.video.models import Frame, VideoSequence


class TestPartitionClips:
    """Tests for clip partitioning."""

    def test_exact_division(self):
        assert partition_clips(300, 30, 5.0) == [(0, 150), (150, 300)]

    def test_shorter_than_one_clip(self):
        assert partition_clips(10, 30, 5.0) == [(0, 10)]

    def test_single_frame_tail_merges(self):
        assert partition_clips(151, 30, 5.0) == [(0, 151)]

    def test_two_frame_tail_kept(self):
        assert partition_clips(152, 30, 5.0) == [(0, 150), (150, 152)]

    def test_minimum_length_one(self):
        assert partition_clips(3, 1, 0.1) == [(0, 1), (1, 2), (2, 3)]

    def test_invalid(self):
        with pytest.raises(ConfigError):
            partition_clips(0, 30, 5.0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 2000), st.floats(1.0, 60.0), st.floats(0.1, 10.0))
    def test_partition_covers_range(self, frames, fps, seconds):
        clips = partition_clips(frames, fps, seconds)
        assert clips[0][0] == 0 and clips[-1][1] == frames
        for (a, b), (c, _) in zip(clips, clips[1:]):
            assert a < b == c


class TestMovingScore:
    """Tests for the single-granularity moving score."""

    def test_identical_frames(self, noise_frame):
        assert moving_score([noise_frame] * 20, 0.5, 0.5) == (False, 0.0)

    def test_single_frame(self, noise_frame):
        assert moving_score([noise_frame], 0.5, 0.5) == (False, 0.0)

    def test_half_independent_noise(self, rng):
        """Frames 11-20 are unrelated to the reference."""
        reference = Frame(rng.random((32, 32)))
        frames = [reference] * 10 + [Frame(rng.random((32, 32))) for _ in range(10)]
        moving, fraction = moving_score(frames, 0.5, 0.4)
        assert moving is True
        assert fraction == 0.5

    def test_strict_inequalities(self):
        sims = np.array([1.0, 0.5, 0.49, 0.2])
        assert dissimilar_fraction(sims, 0.5) == 0.5
        # fraction exactly eta is not moving
        assert moving_score([Frame(np.zeros((8, 8)))] * 2, 0.5, 0.0)[0] is False

    def test_empty_rejected(self):
        with pytest.raises(ConfigError):
            moving_score([], 0.5, 0.5)


class TestCameraMotionResult:
    def test_and_rule_enforced(self):
        clips = (ClipResult(0, 10, 0.0, False),)
        with pytest.raises(InvariantError):
            CameraMotionResult(True, 0.9, True, clips, McmdConfig())

    def test_to_dict(self):
        clips = (ClipResult(0, 10, 0.8, True),)
        data = CameraMotionResult(True, 0.9, True, clips, McmdConfig(), fps=10.0).to_dict()
        assert data["moving"] is True
        assert data["clips"] == [{"start": 0, "stop": 10, "fraction": 0.8, "moving": True}]
        assert data["config"]["lambda_fine"] == 0.46


class TestDetectCameraMotion:
    """Scene-level behaviour on synthetic videos."""

    def test_static_scene(self, static_scene):
        result = detect_camera_motion(static_scene.video)
        assert result.moving is False

    def test_pan_scene(self):
        spec = SceneSpec(width=64, height=64, num_frames=60, fps=10,
                         camera=CameraSpec(kind="pan", vx=2.0), texture_seed=3)
        result = detect_camera_motion(generate_scene(spec).video)
        assert result.moving is True
        assert result.coarse_fraction > 0.5
        assert any(clip.moving for clip in result.clip_results)

    def test_slow_drift_needs_both_granularities(self):
        """Large cumulative displacement, under 1 px inside every clip."""
        spec = SceneSpec(width=64, height=64, num_frames=500, fps=10, background_grid=2,
                         camera=CameraSpec(kind="slow_drift", vx=0.02), texture_seed=5)
        result = detect_camera_motion(generate_scene(spec).video)
        assert len(result.clip_results) == 10
        assert result.coarse_moving is True
        assert result.fine_moving is False
        assert result.moving is False

    def test_accuracy_on_suite(self):
        """20 static and 20 pan scenes of 150 frames each."""
        rng = np.random.default_rng(77)
        correct = 0
        for i in range(40):
            if i < 20:
                camera = CameraSpec(kind="static")
            else:
                sign = 1.0 if i % 2 else -1.0
                camera = CameraSpec(kind="pan", vx=sign * float(rng.uniform(1.5, 3.0)),
                                    vy=float(rng.uniform(-1.0, 1.0)))
            spec = SceneSpec(width=64, height=64, num_frames=150, fps=30, camera=camera,
                             texture_seed=1000 + i, background_grid=2)
            result = detect_camera_motion(generate_scene(spec).video)
            correct += result.moving == camera.moving
        assert correct / 40 >= 0.95

    def test_repeated_frame_never_moving(self, still_video):
        for cfg in (McmdConfig(), McmdConfig(lambda_coarse=0.99, lambda_fine=0.99, eta=0.01)):
            assert detect_camera_motion(still_video, cfg).moving is False

    def test_profile_reuse_matches_direct(self, pan_scene):
        cfg = McmdConfig(eta=0.3)
        profile = compute_ssim_profile(pan_scene.video, cfg)
        assert classify_profile(profile, cfg) == detect_camera_motion(pan_scene.video, cfg)

    def test_monotone_in_lambda_and_eta(self, pan_scene):
        profile = compute_ssim_profile(pan_scene.video)
        verdicts = [classify_profile(profile, McmdConfig(lambda_coarse=lam, lambda_fine=lam)).moving
                    for lam in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert verdicts == sorted(verdicts)
        verdicts = [classify_profile(profile, McmdConfig(eta=eta)).moving for eta in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert verdicts == sorted(verdicts, reverse=True)

    def test_invalid_config(self, still_video):
        with pytest.raises(ConfigError):
            detect_camera_motion(still_video, McmdConfig(eta=1.0))

    def test_clips_use_own_reference(self):
        """A hard cut halfway: the second clip compares against its own first frame."""
        rng = np.random.default_rng(3)
        a, b = Frame(rng.random((16, 16))), Frame(rng.random((16, 16)))
        video = VideoSequence(tuple([a] * 10 + [b] * 10), fps=2.0)
        result = detect_camera_motion(video, McmdConfig(clip_seconds=5.0))
        assert [(c.start, c.stop) for c in result.clip_results] == [(0, 10), (10, 20)]
        assert all(c.fraction == 0.0 for c in result.clip_results)
        assert result.coarse_fraction == 0.5

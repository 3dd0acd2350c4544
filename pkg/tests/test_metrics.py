"""Tests for Jaccard, Average Jaccard and per-category scores."""

import numpy as np
import pytest

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics import (
    GroundTruthLabels,
    MetricsConfig,
    average_jaccard,
    category_masks,
    category_scores,
    evaluate_directory,
    evaluation_mask,
    jaccard_at,
    mean_skipping_none,
    pair_track_files,
)
from src.fpdtrack.tracks import save_tracks
from tests.builders import make_tracks, random_pair
from tests.oracles import naive_counts


def _one_point_case():
    """Query at frame 0; then TP, FP and FN slots in turn."""
    coords = np.full((1, 4, 2), 0.5)
    gt = make_tracks(coords, np.array([[True, True, False, True]]))
    pred = make_tracks(coords, np.array([[True, True, True, False]]))
    return pred, gt


class TestJaccardAt:
    """Hand-enumerated counts."""

    @pytest.mark.parametrize("delta", [1.0, 4.0, 16.0])
    def test_identity(self, constant_tracks, delta):
        assert jaccard_at(constant_tracks, constant_tracks, delta) == (27, 0, 0, 1.0)

    def test_all_invisible_prediction(self):
        coords = np.full((2, 6, 2), 0.5)
        visibility = np.zeros((2, 6), dtype=bool)
        visibility[:, 0] = True
        gt = make_tracks(coords)
        pred = make_tracks(coords, visibility)
        assert jaccard_at(pred, gt, 4.0) == (0, 0, 10, 0.0)

    def test_one_third(self):
        pred, gt = _one_point_case()
        tp, fp, fn, jac = jaccard_at(pred, gt, 1.0)
        assert (tp, fp, fn) == (1, 1, 1)
        assert jac == pytest.approx(1 / 3)

    def test_include_query_frame(self):
        pred, gt = _one_point_case()
        tp, fp, fn, jac = jaccard_at(pred, gt, 1.0, MetricsConfig(exclude_query_frame=False))
        assert (tp, fp, fn, jac) == (2, 1, 1, 0.5)

    def test_empty_evaluation_scores_one(self):
        gt = make_tracks(np.full((1, 1, 2), 0.5))
        assert jaccard_at(gt, gt, 1.0) == (0, 0, 0, 1.0)

    def test_resolution_of_metric_space(self):
        gt = make_tracks(np.full((1, 3, 2), 0.5))
        coords = gt.coords.copy()
        coords[0, 1:, 0] += 3.0 / 256
        pred = make_tracks(coords)
        assert jaccard_at(pred, gt, 2.0)[3] == 0.0
        # at 128 px the same offset is 1.5 px
        assert jaccard_at(pred, gt, 2.0, MetricsConfig(eval_width=128, eval_height=128))[3] == 1.0

    def test_mismatched_shapes(self, constant_tracks):
        other = make_tracks(constant_tracks.coords[:2])
        with pytest.raises(ConfigError):
            jaccard_at(other, constant_tracks, 1.0)

    def test_points_mask(self):
        pred, gt = _one_point_case()
        assert jaccard_at(pred, gt, 1.0, points=np.array([False]))[:3] == (0, 0, 0)


class TestAverageJaccard:
    """AJ over the default thresholds."""

    def test_three_pixel_offset(self):
        rng = np.random.default_rng(4)
        gt = make_tracks(rng.uniform(0.2, 0.8, size=(5, 8, 2)))
        coords = gt.coords.copy()
        coords[:, :, 0] += 3.0 / 256
        coords[np.arange(5), gt.query_frames] = gt.coords[np.arange(5), gt.query_frames]
        report = average_jaccard(make_tracks(coords), gt)
        assert [r.jaccard for r in report.records] == [0.0, 0.0, 1.0, 1.0, 1.0]
        assert report.average_jaccard == pytest.approx(0.6)
        assert report.num_frames_evaluated == 35
        assert report.jaccard(4.0) == 1.0

    def test_matches_naive_oracle(self):
        """50 seeded random pairs agree count for count."""
        cfg = MetricsConfig()
        for seed in range(50):
            gen = np.random.default_rng(seed)
            pred, gt = random_pair(seed, int(gen.integers(1, 9)), int(gen.integers(2, 13)))
            report = average_jaccard(pred, gt, cfg)
            for record in report.records:
                expected = naive_counts(pred.coords, pred.visibility, gt.coords, gt.visibility,
                                        gt.query_frames, record.delta)
                assert (record.tp, record.fp, record.fn) == expected
            assert report.average_jaccard == pytest.approx(np.mean([r.jaccard for r in report.records]))

    def test_monotone_in_threshold(self):
        for seed in range(10):
            pred, gt = random_pair(seed, 6, 10)
            jaccards = [r.jaccard for r in average_jaccard(pred, gt).records]
            assert jaccards == sorted(jaccards)

    def test_counting_identity(self):
        """TP + FN equals the visible ground-truth slots; TP + FP the visible predicted ones."""
        pred, gt = random_pair(3, 8, 12)
        mask = evaluation_mask(gt, MetricsConfig())
        for record in average_jaccard(pred, gt).records:
            assert record.tp + record.fn == np.count_nonzero(gt.visibility & mask)
            assert record.tp + record.fp == np.count_nonzero(pred.visibility & mask)

    def test_to_dict(self, constant_tracks):
        data = average_jaccard(constant_tracks, constant_tracks).to_dict()
        assert data["average_jaccard"] == 1.0
        assert [r["delta"] for r in data["thresholds"]] == [1.0, 2.0, 4.0, 8.0, 16.0]

    @pytest.mark.parametrize("cfg", [
        MetricsConfig(thresholds=()),
        MetricsConfig(thresholds=(2.0, 1.0)),
        MetricsConfig(thresholds=(0.0, 1.0)),
        MetricsConfig(eval_width=0),
    ])
    def test_invalid_config(self, cfg, constant_tracks):
        with pytest.raises(ConfigError):
            average_jaccard(constant_tracks, constant_tracks, cfg)


class TestCategories:
    """Per-category scoring driven by true labels."""

    def test_masks_static_camera(self):
        masks = category_masks(GroundTruthLabels(False, np.array([True, False, True])))
        assert masks["sc_sp"].tolist() == [True, False, True]
        assert masks["sc_mp"].tolist() == [False, True, False]
        assert not masks["mc_mp"].any()

    def test_masks_moving_camera(self):
        masks = category_masks(GroundTruthLabels(True, np.array([True, False])))
        assert masks["mc_mp"].all()
        assert not masks["sc_sp"].any() and not masks["sc_mp"].any()

    def test_scores(self, constant_tracks):
        coords = constant_tracks.coords.copy()
        coords[1, 1:, 0] += 20.0 / 256
        pred = make_tracks(coords)
        scores = category_scores(pred, constant_tracks, GroundTruthLabels(False, np.array([True, False, True])))
        assert scores == {"sc_sp": 1.0, "sc_mp": 0.0, "mc_mp": None}

    def test_label_length_checked(self, constant_tracks):
        with pytest.raises(ConfigError):
            category_scores(constant_tracks, constant_tracks, GroundTruthLabels(False, np.array([True])))

    def test_labels_round_trip(self, tmp_path):
        labels = GroundTruthLabels(False, np.array([True, False]))
        loaded = GroundTruthLabels.load(labels.save(tmp_path / "labels.json"))
        assert loaded.camera_moving is False
        assert loaded.static_points.tolist() == [True, False]

    def test_labels_invalid(self, tmp_path):
        path = tmp_path / "labels.json"
        path.write_text('{"camera_moving": false}')
        with pytest.raises(ConfigError):
            GroundTruthLabels.load(path)

    def test_mean_skipping_none(self):
        assert mean_skipping_none([0.5, None, 1.0]) == 0.75
        assert mean_skipping_none([None, None]) is None


class TestDatasetEvaluation:
    """Directory-level evaluation."""

    @pytest.fixture
    def dataset(self, tmp_path):
        pred_dir, gt_dir = tmp_path / "pred", tmp_path / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        for seed, name in enumerate(("b_video", "a_video", "c_video")):
            pred, gt = random_pair(seed, 4, 6)
            save_tracks(pred, pred_dir / f"{name}.fpdt")
            save_tracks(gt, gt_dir / f"{name}.json")
        return pred_dir, gt_dir

    def test_pairing_sorted_by_stem(self, dataset):
        pairs = pair_track_files(*dataset)
        assert [name for name, _, _ in pairs] == ["a_video", "b_video", "c_video"]

    def test_missing_prediction(self, dataset):
        pred_dir, gt_dir = dataset
        (pred_dir / "a_video.fpdt").unlink()
        with pytest.raises(ConfigError, match="a_video"):
            pair_track_files(pred_dir, gt_dir)

    @pytest.mark.asyncio
    async def test_evaluate_directory(self, dataset):
        report = await evaluate_directory(*dataset, threads=2)
        assert len(report.videos) == 3
        assert report.mean_average_jaccard == pytest.approx(
            np.mean([r.average_jaccard for _, r in report.videos])
        )
        lines = report.to_csv().splitlines()
        assert lines[0] == "video,aj,j1,j2,j4,j8,j16"
        assert [line.split(",")[0] for line in lines[1:]] == ["a_video", "b_video", "c_video"]

    @pytest.mark.asyncio
    async def test_empty_directory(self, tmp_path):
        (tmp_path / "p").mkdir()
        (tmp_path / "g").mkdir()
        with pytest.raises(ConfigError):
            await evaluate_directory(tmp_path / "p", tmp_path / "g")

from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from motionbench import (
    DatasetError,
    SyntheticSpec,
    decode_groundtruth,
    encode_groundtruth,
    generate_synthetic,
    load_frame,
    scan_dataset,
)
from motionbench.evaluation import GT_FOREGROUND

from conftest import build_dataset_tree


class TestScanDataset:
    def test_well_formed_tree(self, dataset_tree):
        entries = scan_dataset(dataset_tree)
        assert [(e.category, e.name) for e in entries] == [
            ("catA", "vid1"),
            ("catA", "vid2"),
            ("catB", "vid1"),
        ]
        entry = entries[0]
        assert entry.frame_count == 30
        assert entry.temporal_roi == (5, 30)
        assert entry.load_roi().all()

    def test_scan_is_stable_across_calls(self, dataset_tree):
        first = scan_dataset(dataset_tree)
        second = scan_dataset(dataset_tree)
        assert [(e.category, e.name, e.input_paths) for e in first] == [
            (e.category, e.name, e.input_paths) for e in second
        ]

    def test_temporal_roi_parsing(self, tmp_path):
        root = build_dataset_tree(
            tmp_path / "data", {"c": ["v"]}, frame_count=25, temporal_roi=(7, 20)
        )
        (entry,) = scan_dataset(root)
        assert entry.temporal_roi == (7, 20)

    def test_missing_groundtruth_dir(self, tmp_path):
        root = build_dataset_tree(tmp_path / "data", {"c": ["v"]})
        import shutil

        shutil.rmtree(root / "c" / "v" / "groundtruth")
        with pytest.raises(DatasetError, match="c/v"):
            scan_dataset(root)

    def test_count_mismatch_names_video(self, tmp_path):
        root = build_dataset_tree(tmp_path / "data", {"c": ["v"]})
        frames = sorted((root / "c" / "v" / "groundtruth").iterdir())
        frames[-1].unlink()
        with pytest.raises(DatasetError, match="c/v"):
            scan_dataset(root)

    def test_bad_temporal_roi(self, tmp_path):
        root = build_dataset_tree(tmp_path / "data", {"c": ["v"]})
        (root / "c" / "v" / "temporalROI.txt").write_text("1 9999")
        with pytest.raises(DatasetError, match="temporal"):
            scan_dataset(root)

    def test_missing_roi_warns_and_scans(self, tmp_path, caplog):
        root = build_dataset_tree(tmp_path / "data", {"c": ["v"]}, with_roi=False)
        with caplog.at_level("WARNING"):
            (entry,) = scan_dataset(root)
        assert entry.roi_path is None
        assert entry.load_roi() is None
        assert "full frame" in caplog.text


class TestGroundTruthCodec:
    def test_all_zero_is_background(self):
        gt = decode_groundtruth(np.zeros((4, 4), dtype=np.uint8))
        assert (gt.codes == 0).all()

    def test_known_codes_accepted(self):
        codes = np.array([[0, 50, 85], [170, 255, 0]], dtype=np.uint8)
        gt = decode_groundtruth(codes)
        assert np.array_equal(gt.codes, codes)

    def test_unknown_value_reports_coordinates(self):
        codes = np.zeros((3, 3), dtype=np.uint8)
        codes[1, 2] = 100
        with pytest.raises(DatasetError, match=r"100 at pixel \(x=2, y=1\)"):
            decode_groundtruth(codes)

    def test_decode_encode_roundtrip_through_file(self, tmp_path):
        codes = np.array([[0, 50], [170, 255]], dtype=np.uint8)
        path = tmp_path / "gt.png"
        Image.fromarray(codes).save(path)
        gt = decode_groundtruth(path)
        assert np.array_equal(encode_groundtruth(gt), codes)

    def test_load_frame_is_rgb(self, tmp_path):
        path = tmp_path / "in.png"
        Image.fromarray(np.arange(64, dtype=np.uint8).reshape(8, 8)).save(path)
        frame = load_frame(path)
        assert frame.data.shape == (8, 8, 3)


class TestSynthetic:
    def test_static_object_constant_truth(self):
        spec = SyntheticSpec(frame_count=5, velocity=(0, 0), start=(3, 3))
        _, truths = generate_synthetic(spec)
        for truth in truths[1:]:
            assert np.array_equal(truth.codes, truths[0].codes)

    def test_footprint_overlap_geometry(self):
        spec = SyntheticSpec(
            width=16, height=8, object_width=8, object_height=8, frame_count=2,
            positions=[(0, 0), (2, 0)],
        )
        overlap = spec.footprint(0) & spec.footprint(1)
        assert overlap.sum() == 6 * 8

    def test_truth_equals_rendered_support(self):
        spec = SyntheticSpec(frame_count=8, noise=10, seed=3, start=(-4, 2), velocity=(3, 1))
        frames, truths = generate_synthetic(spec)
        for index, truth in enumerate(truths):
            assert np.array_equal(truth.codes == GT_FOREGROUND, spec.footprint(index))

    def test_seeded_noise_is_reproducible(self):
        spec = SyntheticSpec(frame_count=6, noise=12, seed=42)
        first, _ = generate_synthetic(spec)
        second, _ = generate_synthetic(spec)
        for a, b in zip(first, second):
            assert np.array_equal(a.data, b.data)

    def test_clipped_object_positions_allowed(self):
        spec = SyntheticSpec(width=20, height=10, start=(-5, -5), velocity=(0, 0), frame_count=1)
        frames, truths = generate_synthetic(spec)
        assert truths[0].codes.sum() > 0  # partially visible

    def test_fully_inside_flag(self):
        spec = SyntheticSpec(width=20, height=20, object_width=5, object_height=5,
                             start=(-5, 0), velocity=(5, 0), frame_count=4)
        assert [spec.fully_inside(i) for i in range(4)] == [False, True, True, True]

    def test_noise_amplitude_validated(self):
        with pytest.raises(ValueError):
            SyntheticSpec(noise=-1)

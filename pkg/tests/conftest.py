from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from motionbench.dataset import SyntheticSpec, generate_synthetic


def build_dataset_tree(
    root: Path,
    layout: dict[str, list[str]],
    frame_count: int = 30,
    temporal_roi: tuple[int, int] = (5, 30),
    with_roi: bool = True,
) -> Path:
    """Materialize a benchmark-layout tree from synthetic sequences.

    Input frames are written as PNG (the loader accepts jpg/png/bmp) so the
    pixel data survives the round trip exactly.
    """
    seed = 0
    for category, videos in layout.items():
        for video in videos:
            seed += 1
            spec = SyntheticSpec(
                width=32,
                height=24,
                frame_count=frame_count,
                object_width=6,
                object_height=6,
                start=(1, 4),
                velocity=(1, 0),
                noise=2,
                seed=seed,
            )
            frames, truths = generate_synthetic(spec)
            video_dir = root / category / video
            (video_dir / "input").mkdir(parents=True)
            (video_dir / "groundtruth").mkdir(parents=True)
            for i, (frame, truth) in enumerate(zip(frames, truths), start=1):
                Image.fromarray(frame.data).save(video_dir / "input" / f"in{i:06d}.png")
                Image.fromarray(truth.codes).save(video_dir / "groundtruth" / f"gt{i:06d}.png")
            (video_dir / "temporalROI.txt").write_text(
                f"{temporal_roi[0]} {temporal_roi[1]}"
            )
            if with_roi:
                roi = np.full((spec.height, spec.width), 255, dtype=np.uint8)
                Image.fromarray(roi).save(video_dir / "ROI.bmp")
    return root


@pytest.fixture
def dataset_tree(tmp_path: Path) -> Path:
    return build_dataset_tree(tmp_path / "data", {"catA": ["vid1", "vid2"], "catB": ["vid1"]})

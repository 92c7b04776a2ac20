"""Dataset ingestion and a synthetic oracle sequence generator.

The on-disk layout is the change-detection benchmark convention::

    <root>/<category>/<video>/input/inNNNNNN.jpg
    <root>/<category>/<video>/groundtruth/gtNNNNNN.png
    <root>/<category>/<video>/ROI.*            (optional spatial mask)
    <root>/<category>/<video>/temporalROI.txt  (two 1-based frame numbers)

Ground-truth gray codes: 0 background, 50 shadow, 85 outside the region of
interest, 170 unknown, 255 foreground.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .frames import ColorModel, Frame
from .evaluation import GT_CODES, GT_FOREGROUND, GT_BACKGROUND

log = logging.getLogger(__name__)

_INPUT_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")
_GT_SUFFIXES = (".png", ".bmp", ".jpg", ".jpeg")


class DatasetError(ValueError):
    """The dataset tree or one of its files violates the expected layout."""


@dataclass
class GroundTruthFrame:
    """Per-pixel ground-truth codes for one frame."""

    codes: np.ndarray

    def __post_init__(self) -> None:
        codes = np.asarray(self.codes)
        if codes.ndim != 2 or codes.dtype != np.uint8:
            raise DatasetError("ground truth must be a 2-d uint8 plane")
        self.codes = codes

    @property
    def shape(self) -> tuple[int, int]:
        return self.codes.shape[0], self.codes.shape[1]


@dataclass
class VideoEntry:
    """One category/video pair with its frame lists and evaluation ranges."""

    category: str
    name: str
    input_paths: list[Path]
    groundtruth_paths: list[Path]
    roi_path: Path | None
    temporal_roi: tuple[int, int]  # 1-based, inclusive

    @property
    def frame_count(self) -> int:
        return len(self.input_paths)

    def load_roi(self) -> np.ndarray | None:
        if self.roi_path is None:
            return None
        arr = np.asarray(Image.open(self.roi_path).convert("L"))
        return arr > 0


def _sorted_frames(directory: Path, prefix: str, suffixes: tuple[str, ...]) -> list[Path]:
    found = [
        p
        for p in directory.iterdir()
        if p.is_file() and p.name.startswith(prefix) and p.suffix.lower() in suffixes
    ]
    return sorted(found, key=lambda p: p.name)


def scan_dataset(root: str | Path) -> list[VideoEntry]:
    """Collect every category/video pair under ``root``, sorted by name."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    entries: list[VideoEntry] = []
    for category_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for video_dir in sorted(p for p in category_dir.iterdir() if p.is_dir()):
            entries.append(_scan_video(category_dir.name, video_dir))
    return entries


def _scan_video(category: str, video_dir: Path) -> VideoEntry:
    where = f"{category}/{video_dir.name}"
    input_dir = video_dir / "input"
    gt_dir = video_dir / "groundtruth"
    if not input_dir.is_dir():
        raise DatasetError(f"{where}: missing input/ directory")
    if not gt_dir.is_dir():
        raise DatasetError(f"{where}: missing groundtruth/ directory")
    inputs = _sorted_frames(input_dir, "in", _INPUT_SUFFIXES)
    gts = _sorted_frames(gt_dir, "gt", _GT_SUFFIXES)
    if not inputs:
        raise DatasetError(f"{where}: no input frames found")
    if len(inputs) != len(gts):
        raise DatasetError(
            f"{where}: {len(inputs)} input frames but {len(gts)} ground-truth frames"
        )

    troi_path = video_dir / "temporalROI.txt"
    if not troi_path.is_file():
        raise DatasetError(f"{where}: missing temporalROI.txt")
    tokens = troi_path.read_text().split()
    if len(tokens) != 2:
        raise DatasetError(f"{where}: temporalROI.txt must hold two integers")
    try:
        first, last = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise DatasetError(f"{where}: cannot parse temporalROI.txt {tokens!r}") from None
    if not 1 <= first <= last <= len(inputs):
        raise DatasetError(
            f"{where}: temporal ROI {first}..{last} outside 1..{len(inputs)}"
        )

    roi_candidates = sorted(video_dir.glob("ROI.*"))
    roi_path = roi_candidates[0] if roi_candidates else None
    if roi_path is None:
        log.warning("%s: no spatial ROI file, using the full frame", where)

    return VideoEntry(
        category=category,
        name=video_dir.name,
        input_paths=inputs,
        groundtruth_paths=gts,
        roi_path=roi_path,
        temporal_roi=(first, last),
    )


def load_frame(path: str | Path) -> Frame:
    """Decode one input image as an RGB8 frame."""
    with Image.open(path) as img:
        return Frame(np.asarray(img.convert("RGB")), ColorModel.RGB8)


def decode_groundtruth(source: str | Path | np.ndarray) -> GroundTruthFrame:
    """Decode a ground-truth image, rejecting any value outside the label set."""
    if isinstance(source, (str, Path)):
        with Image.open(source) as img:
            codes = np.asarray(img.convert("L"))
    else:
        codes = np.asarray(source, dtype=np.uint8)
    bad = ~np.isin(codes, GT_CODES)
    if bad.any():
        y, x = np.argwhere(bad)[0]
        raise DatasetError(
            f"unknown ground-truth value {int(codes[y, x])} at pixel (x={int(x)}, y={int(y)})"
        )
    return GroundTruthFrame(codes.copy())


def encode_groundtruth(gt: GroundTruthFrame) -> np.ndarray:
    """Inverse of decode: the raw code plane (lossless round trip)."""
    return gt.codes.copy()


@dataclass
class SyntheticSpec:
    """A moving rectangle over a flat background, with exact ground truth.

    The trajectory is either an explicit per-frame position list or a start
    point plus a constant per-frame velocity.  Positions may leave the
    frame; the rendered footprint is clipped.  Noise is additive uniform in
    [-noise, +noise], seeded, and never alters the ground truth.
    """

    width: int = 64
    height: int = 64
    frame_count: int = 60
    background: int = 60
    object_width: int = 12
    object_height: int = 12
    object_intensity: int = 200
    start: tuple[int, int] = (0, 0)  # (x, y) of the top-left corner
    velocity: tuple[int, int] = (1, 0)
    positions: list[tuple[int, int]] | None = None
    noise: int = 0
    seed: int = 0
    name: str = "moving_square"

    def __post_init__(self) -> None:
        if self.noise < 0:
            raise ValueError("noise amplitude must be non-negative")
        if self.frame_count < 1:
            raise ValueError("need at least one frame")
        if self.positions is not None and len(self.positions) != self.frame_count:
            raise ValueError("positions must list one (x, y) pair per frame")

    def position(self, index: int) -> tuple[int, int]:
        if self.positions is not None:
            return tuple(self.positions[index])
        return (
            self.start[0] + self.velocity[0] * index,
            self.start[1] + self.velocity[1] * index,
        )

    def footprint(self, index: int) -> np.ndarray:
        """Boolean object support for one frame (clipped at the borders)."""
        x, y = self.position(index)
        mask = np.zeros((self.height, self.width), dtype=bool)
        x0, x1 = max(0, x), min(self.width, x + self.object_width)
        y0, y1 = max(0, y), min(self.height, y + self.object_height)
        if x0 < x1 and y0 < y1:
            mask[y0:y1, x0:x1] = True
        return mask

    def fully_inside(self, index: int) -> bool:
        x, y = self.position(index)
        return (
            x >= 0
            and y >= 0
            and x + self.object_width <= self.width
            and y + self.object_height <= self.height
        )


def generate_synthetic(spec: SyntheticSpec) -> tuple[list[Frame], list[GroundTruthFrame]]:
    """Render the sequence and its exact ground truth."""
    rng = np.random.default_rng(spec.seed)
    frames: list[Frame] = []
    truths: list[GroundTruthFrame] = []
    for index in range(spec.frame_count):
        support = spec.footprint(index)
        canvas = np.full((spec.height, spec.width), spec.background, dtype=np.float64)
        canvas[support] = spec.object_intensity
        if spec.noise > 0:
            canvas += rng.integers(-spec.noise, spec.noise + 1, size=canvas.shape)
        frames.append(Frame(np.clip(canvas, 0, 255).astype(np.uint8), ColorModel.GRAY8))
        codes = np.where(support, GT_FOREGROUND, GT_BACKGROUND).astype(np.uint8)
        truths.append(GroundTruthFrame(codes))
    return frames, truths

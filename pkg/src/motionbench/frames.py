"""Pixel containers and color conversions shared by every detector."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# ITU-R 601 luma weights; the de-facto standard for RGB -> gray.
_GRAY_WEIGHTS = (0.299, 0.587, 0.114)


class ColorModel(Enum):
    GRAY8 = "gray8"
    RGB8 = "rgb8"
    HSV = "hsv"


class FrameError(ValueError):
    """A frame or mask violates its container contract."""


def _as_uint8(data: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(data)
    if arr.dtype == np.uint8:
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        raise FrameError(f"{what} must hold integers in [0, 255], got dtype {arr.dtype}")
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise FrameError(f"{what} values must lie in [0, 255]")
    return arr.astype(np.uint8)


@dataclass(frozen=True)
class Frame:
    """One decoded video image.

    GRAY8 holds a (height, width) uint8 plane.  RGB8 holds (height, width, 3)
    uint8.  HSV holds (height, width, 3) float64 with hue in radians
    [0, 2*pi) and saturation/value in [0, 1].
    """

    data: np.ndarray
    color_model: ColorModel

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if self.color_model is ColorModel.GRAY8:
            if data.ndim != 2:
                raise FrameError("GRAY8 frames need a 2-d plane")
            data = _as_uint8(data, "GRAY8 frame")
        elif self.color_model is ColorModel.RGB8:
            if data.ndim != 3 or data.shape[2] != 3:
                raise FrameError("RGB8 frames need a (height, width, 3) array")
            data = _as_uint8(data, "RGB8 frame")
        elif self.color_model is ColorModel.HSV:
            if data.ndim != 3 or data.shape[2] != 3:
                raise FrameError("HSV frames need a (height, width, 3) array")
            data = np.asarray(data, dtype=np.float64)
            h, s, v = data[..., 0], data[..., 1], data[..., 2]
            if data.size and not (
                (h >= 0).all()
                and (h < 2 * np.pi).all()
                and (s >= 0).all()
                and (s <= 1).all()
                and (v >= 0).all()
                and (v <= 1).all()
            ):
                raise FrameError("HSV frames need h in [0, 2*pi) and s, v in [0, 1]")
        else:  # pragma: no cover - enum is closed
            raise FrameError(f"unknown color model {self.color_model!r}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise FrameError("frames need at least one pixel")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def plane(self, channel: int = 0) -> np.ndarray:
        """Return one channel as a (height, width) view."""
        if self.color_model is ColorModel.GRAY8:
            if channel != 0:
                raise FrameError("GRAY8 frames have a single plane")
            return self.data
        return self.data[..., channel]


@dataclass
class ForegroundMask:
    """Per-pixel binary decision image: 0 background, 1 foreground.

    ``warmup`` marks masks emitted while a detector is still filling its
    buffers or training; the evaluation layer skips those frames.
    """

    labels: np.ndarray
    warmup: bool = False

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise FrameError("masks need a 2-d label plane")
        labels = _as_uint8(labels, "mask")
        if labels.size and labels.max() > 1:
            raise FrameError("mask labels must be 0 or 1")
        self.labels = labels

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape[0], self.labels.shape[1]

    def foreground_count(self) -> int:
        return int(self.labels.sum())


def all_background(shape: tuple[int, int], warmup: bool = False) -> ForegroundMask:
    return ForegroundMask(np.zeros(shape, dtype=np.uint8), warmup=warmup)


def to_grayscale(frame: Frame) -> Frame:
    """Convert an RGB8 frame to GRAY8 with ITU-R 601 weights."""
    if frame.color_model is not ColorModel.RGB8:
        raise FrameError("to_grayscale expects an RGB8 frame")
    rgb = frame.data.astype(np.float64)
    gray = (
        _GRAY_WEIGHTS[0] * rgb[..., 0]
        + _GRAY_WEIGHTS[1] * rgb[..., 1]
        + _GRAY_WEIGHTS[2] * rgb[..., 2]
    )
    gray = np.clip(np.rint(gray), 0, 255).astype(np.uint8)
    return Frame(gray, ColorModel.GRAY8)


def to_rgb(frame: Frame) -> Frame:
    """Replicate a GRAY8 plane into the three RGB channels."""
    if frame.color_model is ColorModel.RGB8:
        return frame
    if frame.color_model is not ColorModel.GRAY8:
        raise FrameError("to_rgb expects a GRAY8 frame")
    return Frame(np.repeat(frame.data[..., None], 3, axis=-1), ColorModel.RGB8)


def convert(frame: Frame, model: ColorModel) -> Frame:
    """Convert a frame to the requested color model."""
    if frame.color_model is model:
        return frame
    if model is ColorModel.GRAY8:
        return to_grayscale(to_rgb(frame))
    if model is ColorModel.RGB8:
        return to_rgb(frame)
    return to_hsv(to_rgb(frame))


def to_hsv(frame: Frame) -> Frame:
    """Convert an RGB8 frame to the hexcone HSV model.

    Hue is stored in radians in [0, 2*pi); achromatic pixels get hue 0.
    """
    if frame.color_model is not ColorModel.RGB8:
        raise FrameError("to_hsv expects an RGB8 frame")
    rgb = frame.data.astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = mx - mn

    with np.errstate(divide="ignore", invalid="ignore"):
        hr = np.mod((g - b) / delta, 6.0)
        hg = (b - r) / delta + 2.0
        hb = (r - g) / delta + 4.0
        sat = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
    sector = np.select([delta == 0, mx == r, mx == g], [0.0, hr, hg], default=hb)
    hue = np.mod(sector * (np.pi / 3.0), 2 * np.pi)

    out = np.stack([hue, sat, mx], axis=-1)
    return Frame(out, ColorModel.HSV)

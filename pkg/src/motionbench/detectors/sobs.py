"""Simplified self-organized background subtraction (one neuron per pixel).

Each pixel owns an HSV weight triple.  A pixel is background when its
hexcone-embedding distance to the neuron and its brightness difference both
fall under per-frame automatic thresholds; only background pixels trigger
learning, at full rate for the pixel's own neuron and at a reduced rate for
the eight neighboring neurons (toward the neighbors' own incoming values).
"""

from __future__ import annotations

import numpy as np

from ..frames import ColorModel, Frame, ForegroundMask
from ..thresholding import Histogram256, otsu_threshold, quantize_response
from .base import Detector, ParamSpec


def hexcone_embedding(hsv: np.ndarray) -> np.ndarray:
    """Map (..., 3) HSV triples into the cone coordinates used for distance."""
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    return np.stack([v * s * np.cos(h), v * s * np.sin(h), v], axis=-1)


def sobs_distance(neuron: np.ndarray, pixel: np.ndarray) -> np.ndarray:
    """Euclidean distance between HSV triples in the hexcone embedding."""
    a = hexcone_embedding(np.asarray(neuron, dtype=np.float64))
    b = hexcone_embedding(np.asarray(pixel, dtype=np.float64))
    return np.sqrt(((a - b) ** 2).sum(axis=-1))


def sobs_init(frames: list) -> np.ndarray:
    """Initial neuron map: per-pixel, per-channel median over the frames."""
    if not frames:
        raise ValueError("need at least one frame to initialize the neuron map")
    stack = np.stack(
        [f.data if isinstance(f, Frame) else np.asarray(f, dtype=np.float64) for f in frames]
    )
    return np.median(stack, axis=0)


class SimplifiedSobs(Detector):
    """One-to-one SOM background model over HSV frames."""

    method = "sobs"
    input_model = ColorModel.HSV
    PARAMS = (
        ParamSpec("alpha_1", float, 0.02, minimum=0.0, maximum=1.0),
        ParamSpec("alpha_2", float, 0.01, minimum=0.0, maximum=1.0),
        ParamSpec("L", int, 10, minimum=1),
    )

    def __init__(self, **params):
        super().__init__(**params)
        self._boot: list[np.ndarray] = []
        self._neurons: np.ndarray | None = None

    @property
    def neurons(self) -> np.ndarray | None:
        return self._neurons

    def _step(self, frame: Frame) -> ForegroundMask:
        if self._neurons is None:
            self._boot.append(frame.data.copy())
            if len(self._boot) == self.params["L"]:
                self._neurons = sobs_init(self._boot)
                self._boot = []
            return self._warmup()

        pixels = frame.data
        distance = sobs_distance(self._neurons, pixels)
        brightness = np.abs(pixels[..., 2] - self._neurons[..., 2])

        levels_d = quantize_response(distance)
        levels_v = quantize_response(brightness)
        th_d = otsu_threshold(Histogram256.from_levels(levels_d))
        th_v = otsu_threshold(Histogram256.from_levels(levels_v))
        background = (levels_d <= th_d) & (levels_v <= th_v)

        self._learn(pixels, background)
        return ForegroundMask(np.logical_not(background).astype(np.uint8))

    def _learn(self, pixels: np.ndarray, background: np.ndarray) -> None:
        # every background pixel pulls its own neuron with alpha_1 and each
        # of its 8 neighbors' neurons (toward the neighbors' own pixel
        # values) with alpha_2; repeated pulls toward the same target
        # compound multiplicatively, so the order does not matter
        alpha_1 = self.params["alpha_1"]
        alpha_2 = self.params["alpha_2"]
        bg = background.astype(np.int64)
        padded = np.pad(bg, 1)
        neighbor_triggers = np.zeros_like(bg)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                neighbor_triggers += padded[
                    1 + dr : 1 + dr + bg.shape[0], 1 + dc : 1 + dc + bg.shape[1]
                ]
        keep = (1.0 - alpha_1) ** bg * (1.0 - alpha_2) ** neighbor_triggers
        keep = keep[..., None].repeat(3, axis=-1)
        # hue is meaningless for achromatic pixels; leave the neuron hue alone
        achromatic = pixels[..., 1] * pixels[..., 2] == 0
        keep[..., 0] = np.where(achromatic, 1.0, keep[..., 0])
        updated = pixels + keep * (self._neurons - pixels)
        # untouched neurons must stay bit-identical, not round-tripped
        self._neurons = np.where(keep == 1.0, self._neurons, updated)

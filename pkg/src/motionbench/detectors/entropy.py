"""Spatio-temporal entropy detectors.

Both methods histogram quantized values over a w-by-w spatial window
accumulated across frames and flag pixels whose window entropy is high.
STEI histograms the raw intensities of the last L frames; DSTEI histograms
quantized frame differences, either over a sliding window of L differences
or through a recursive accumulator.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..frames import Frame, ForegroundMask
from ..thresholding import StructuringElement, morph_close_open, otsu_binarize
from .base import Detector, ParamSpec


def entropy(pdf: np.ndarray) -> float:
    """Shannon entropy (natural log) of a distribution; 0*log(0) is 0."""
    p = np.asarray(pdf, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("entropy expects a 1-d distribution")
    if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("entropy expects a normalized distribution")
    nonzero = p[p > 0]
    return float(-(nonzero * np.log(nonzero)).sum())


def quantize_levels(values: np.ndarray, bins: int) -> np.ndarray:
    """Quantize 0..255 values into ``bins`` levels with floor scaling."""
    return (np.asarray(values, dtype=np.int64) * bins) // 256


def window_histograms(levels: np.ndarray, bins: int, window: int) -> np.ndarray:
    """Per-pixel histogram of ``levels`` over a window-by-window block.

    Returns a (bins, H, W) stack of counts.  Windows are clipped at the
    border, so border pixels carry fewer samples.
    """
    h, w = levels.shape
    onehot = np.zeros((bins, h, w), dtype=np.uint8)
    rows, cols = np.indices(levels.shape)
    onehot[levels, rows, cols] = 1
    radius = window // 2
    padded = np.pad(onehot, ((0, 0), (radius, radius), (radius, radius)))
    counts = np.zeros((bins, h, w), dtype=np.int16)
    for dr in range(window):
        for dc in range(window):
            counts += padded[:, dr : dr + h, dc : dc + w]
    return counts


def stack_entropy(counts: np.ndarray) -> np.ndarray:
    """Entropy map of a (bins, H, W) stack of per-pixel counts.

    Uses E = log(total) - sum(c*log(c))/total per pixel, normalizing by the
    actual window mass so clipped borders stay well-defined.  Bins are
    processed one at a time to keep the footprint at a few planes.
    """
    total = counts.sum(axis=0, dtype=np.float64)
    acc = np.zeros_like(total)
    for q in range(counts.shape[0]):
        c = counts[q].astype(np.float64)
        acc += np.where(c > 0, c * np.log(np.where(c > 0, c, 1.0)), 0.0)
    safe_total = np.where(total > 0, total, 1.0)
    return np.where(total > 0, np.log(safe_total) - acc / safe_total, 0.0)


class SpatioTemporalEntropy(Detector):
    """Entropy of raw intensities over a w x w x L window (STEI).

    The entropy map is Otsu-thresholded and cleaned with a close-open
    morphological filter.
    """

    method = "stei"
    PARAMS = (
        ParamSpec("w", int, 3, minimum=1),
        ParamSpec("L", int, 5, minimum=1),
        ParamSpec("Q", int, 100, minimum=2, maximum=256),
        ParamSpec("se_size", int, 3, minimum=1),
    )

    def __init__(self, **params):
        super().__init__(**params)
        if self.params["w"] % 2 == 0 or self.params["se_size"] % 2 == 0:
            from .base import ConfigError

            raise ConfigError("stei: window and structuring element sides must be odd")
        self._hists: deque[np.ndarray] = deque(maxlen=self.params["L"])
        self._sum: np.ndarray | None = None
        self._se = StructuringElement.square(self.params["se_size"])

    def _step(self, frame: Frame) -> ForegroundMask:
        levels = quantize_levels(frame.data, self.params["Q"])
        hist = window_histograms(levels, self.params["Q"], self.params["w"])
        if self._sum is None:
            self._sum = np.zeros_like(hist, dtype=np.int32)
        if len(self._hists) == self.params["L"]:
            self._sum -= self._hists[0]
        self._hists.append(hist)
        self._sum += hist
        if len(self._hists) < self.params["L"]:
            return self._warmup()
        emap = stack_entropy(self._sum)
        return morph_close_open(otsu_binarize(emap), self._se)


class DifferenceEntropy(Detector):
    """Entropy of quantized frame differences (DSTEI).

    ``temporal`` selects the accumulation: "windowed" keeps the last L
    difference histograms, "recursive" blends them with factor alpha.
    """

    method = "dstei"
    PARAMS = (
        ParamSpec("w", int, 3, minimum=1),
        ParamSpec("L", int, 5, minimum=1),
        ParamSpec("Q", int, 100, minimum=2, maximum=256),
        ParamSpec("temporal", str, "windowed", choices=("windowed", "recursive")),
        ParamSpec("alpha", float, 0.5, minimum=0.0, maximum=1.0),
    )

    def __init__(self, **params):
        super().__init__(**params)
        if self.params["w"] % 2 == 0:
            from .base import ConfigError

            raise ConfigError("dstei: window side must be odd")
        self._prev: np.ndarray | None = None
        self._hists: deque[np.ndarray] = deque(maxlen=self.params["L"])
        self._sum: np.ndarray | None = None
        self._recursive: np.ndarray | None = None
        self._diffs_seen = 0

    def _step(self, frame: Frame) -> ForegroundMask:
        pixels = frame.data.astype(np.int64)
        prev, self._prev = self._prev, pixels
        if prev is None:
            return self._warmup()
        levels = quantize_levels(np.abs(pixels - prev), self.params["Q"])
        hist = window_histograms(levels, self.params["Q"], self.params["w"])
        self._diffs_seen += 1

        if self.params["temporal"] == "windowed":
            if self._sum is None:
                self._sum = np.zeros_like(hist, dtype=np.int32)
            if len(self._hists) == self.params["L"]:
                self._sum -= self._hists[0]
            self._hists.append(hist)
            self._sum += hist
            counts: np.ndarray = self._sum
        else:
            alpha = self.params["alpha"]
            if self._recursive is None:
                self._recursive = hist.astype(np.float64)
            else:
                self._recursive = alpha * self._recursive + (1.0 - alpha) * hist
            counts = self._recursive

        # both modes warm up over the first L differences
        if self._diffs_seen < self.params["L"]:
            return self._warmup()
        return otsu_binarize(stack_entropy(counts))

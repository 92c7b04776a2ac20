"""Automatic (Otsu) and fixed thresholding plus binary morphology.

The detectors produce real-valued response maps (difference magnitudes,
entropies, reconstruction residuals).  ``quantize_response`` maps such a map
onto 0..255 levels, ``otsu_threshold`` picks the split that maximizes the
between-class variance, and ``otsu_binarize`` combines both: a pixel is
foreground when its level is strictly above the selected split, so the split
level itself stays in the background class.  A constant map therefore always
comes out all-background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .frames import ColorModel, Frame, FrameError, ForegroundMask


@dataclass
class Histogram256:
    """Counts of 8-bit levels; the raw input to threshold selection."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (256,):
            raise ValueError("Histogram256 needs exactly 256 bins")
        if counts.size and counts.min() < 0:
            raise ValueError("histogram counts must be non-negative")
        self.counts = counts

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_levels(cls, levels: np.ndarray) -> "Histogram256":
        levels = np.asarray(levels)
        if levels.dtype != np.uint8:
            raise ValueError("from_levels expects uint8 data")
        return cls(np.bincount(levels.ravel(), minlength=256))


@dataclass
class StructuringElement:
    """Odd-sized binary kernel for morphology; defaults to 3x3 all-ones."""

    shape: np.ndarray

    def __post_init__(self) -> None:
        shape = np.asarray(self.shape, dtype=bool)
        if shape.ndim != 2 or shape.shape[0] % 2 == 0 or shape.shape[1] % 2 == 0:
            raise ValueError("structuring elements must be 2-d with odd sides")
        if not shape.any():
            raise ValueError("structuring elements need at least one active cell")
        self.shape = shape

    @classmethod
    def square(cls, size: int = 3) -> "StructuringElement":
        return cls(np.ones((size, size), dtype=bool))


def otsu_threshold(hist: Histogram256) -> int:
    """Smallest level t maximizing w0*w1*(mu0 - mu1)^2 over {<=t} vs {>t}.

    Candidate splits are restricted to levels whose lower class is
    non-empty, which pins a single-level histogram to that level.
    """
    counts = hist.counts.astype(np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("cannot threshold an empty histogram")
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(counts)
    w1 = total - w0
    sum0 = np.cumsum(levels * counts)
    sum_total = sum0[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = sum0 / w0
        mu1 = (sum_total - sum0) / w1
        sigma_b = w0 * w1 * (mu0 - mu1) ** 2
    sigma_b = np.where((w0 > 0) & (w1 > 0), sigma_b, 0.0)
    sigma_b[w0 == 0] = -np.inf
    return int(np.argmax(sigma_b))


def binarize(image: np.ndarray, threshold: float) -> ForegroundMask:
    """Label 1 exactly where ``image >= threshold``."""
    values = np.asarray(image)
    if values.ndim != 2:
        raise ValueError("binarize expects a 2-d scalar map")
    if not np.isfinite(np.asarray(values, dtype=np.float64)).all():
        raise ValueError("binarize expects finite values")
    return ForegroundMask((values >= threshold).astype(np.uint8))


def quantize_response(response: np.ndarray) -> np.ndarray:
    """Map a non-negative response map onto uint8 levels for Otsu.

    Integer maps are used as-is (clamped at 255); non-integer maps are
    scaled linearly by their maximum.
    """
    resp = np.asarray(response)
    if resp.ndim != 2:
        raise ValueError("expected a 2-d response map")
    if np.issubdtype(resp.dtype, np.integer) or resp.dtype == np.bool_:
        return np.clip(resp, 0, 255).astype(np.uint8)
    resp = resp.astype(np.float64)
    if not np.isfinite(resp).all():
        raise ValueError("response map must be finite")
    if resp.size and resp.min() < 0:
        raise ValueError("response map must be non-negative")
    peak = resp.max() if resp.size else 0.0
    if peak <= 0:
        return np.zeros(resp.shape, dtype=np.uint8)
    return np.rint(resp / peak * 255.0).astype(np.uint8)


def otsu_binarize(response: np.ndarray) -> ForegroundMask:
    """Threshold a response map with a per-map Otsu split.

    Foreground is strictly above the split, so the background class of the
    split is preserved and a constant map yields an all-background mask.
    """
    levels = quantize_response(response)
    t = otsu_threshold(Histogram256.from_levels(levels))
    return binarize(levels, t + 1)


def morph_close_open(mask: ForegroundMask, se: StructuringElement | None = None) -> ForegroundMask:
    """Closing (dilate, erode) followed by opening (erode, dilate).

    Dilation pads with background; erosion ignores out-of-image cells, which
    keeps closing extensive and opening anti-extensive at the border.
    """
    se = se or StructuringElement.square(3)
    m = mask.labels.astype(bool)
    closed = ndimage.binary_erosion(
        ndimage.binary_dilation(m, structure=se.shape, border_value=0),
        structure=se.shape,
        border_value=1,
    )
    opened = ndimage.binary_dilation(
        ndimage.binary_erosion(closed, structure=se.shape, border_value=1),
        structure=se.shape,
        border_value=0,
    )
    return ForegroundMask(opened.astype(np.uint8), warmup=mask.warmup)


def sobel_gradient_magnitude(frame: Frame | np.ndarray) -> np.ndarray:
    """|Gx| + |Gy| with the standard 3x3 Sobel kernels, replicate border."""
    if isinstance(frame, Frame):
        if frame.color_model is not ColorModel.GRAY8:
            raise FrameError("sobel_gradient_magnitude expects a grayscale frame")
        data = frame.data
    else:
        data = np.asarray(frame)
        if data.ndim != 2:
            raise ValueError("sobel_gradient_magnitude expects a 2-d map")
    data = data.astype(np.float64)
    gx = ndimage.sobel(data, axis=1, mode="nearest")
    gy = ndimage.sobel(data, axis=0, mode="nearest")
    return np.abs(gx) + np.abs(gy)

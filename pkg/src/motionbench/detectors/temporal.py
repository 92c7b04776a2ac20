"""Difference and recursive-filter detectors.

Five methods share this module: plain frame difference, three-frame
difference, the running average filter, the forgetting morphological
temporal gradient, and sigma-delta background estimation.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..frames import ColorModel, Frame, ForegroundMask
from ..thresholding import otsu_binarize, sobel_gradient_magnitude
from .base import Detector, InputMismatchError, ParamSpec, as_float

DISTANCES = ("gray", "manhattan", "euclidean", "chebyshev")


def frame_distance(prev: Frame, cur: Frame, distance: str = "gray") -> np.ndarray:
    """Per-pixel distance between two frames.

    "gray" is the absolute gray-level difference; the other three operate on
    RGB channels (sum, L2, and max of the per-channel absolute differences).
    """
    if distance not in DISTANCES:
        raise ValueError(f"distance must be one of {DISTANCES}")
    if prev.shape != cur.shape:
        raise InputMismatchError("frame difference needs equally sized frames")
    if distance == "gray":
        if prev.color_model is not ColorModel.GRAY8 or cur.color_model is not ColorModel.GRAY8:
            raise InputMismatchError("gray distance needs GRAY8 frames")
        return np.abs(as_float(prev.data) - as_float(cur.data))
    if prev.color_model is not ColorModel.RGB8 or cur.color_model is not ColorModel.RGB8:
        raise InputMismatchError(f"{distance} distance needs RGB8 frames")
    diff = np.abs(as_float(cur.data) - as_float(prev.data))
    if distance == "manhattan":
        return diff.sum(axis=-1)
    if distance == "euclidean":
        return np.sqrt((diff**2).sum(axis=-1))
    return diff.max(axis=-1)


class FrameDifference(Detector):
    """Absolute difference against the previous frame, Otsu-thresholded."""

    method = "fd"
    PARAMS = (ParamSpec("distance", str, "gray", choices=DISTANCES),)

    def __init__(self, **params):
        super().__init__(**params)
        self._prev: Frame | None = None

    @property
    def input_model(self):  # type: ignore[override]
        return ColorModel.GRAY8 if self.params["distance"] == "gray" else ColorModel.RGB8

    def _step(self, frame: Frame) -> ForegroundMask:
        prev, self._prev = self._prev, frame
        if prev is None:
            return self._warmup()
        response = frame_distance(prev, frame, self.params["distance"])
        return otsu_binarize(response)


class ThreeFrameDifference(Detector):
    """Minimum of the two thresholded differences around the middle frame.

    Needs the next frame, so output lags input by one frame and the first
    two steps are warm-up.
    """

    method = "3fd"
    latency = 1

    def __init__(self, **params):
        super().__init__(**params)
        self._buffer: list[Frame] = []

    def _step(self, frame: Frame) -> ForegroundMask:
        self._buffer.append(frame)
        if len(self._buffer) < 3:
            return self._warmup()
        prev, cur, nxt = self._buffer
        del self._buffer[0]
        mask1 = otsu_binarize(frame_distance(prev, cur))
        mask2 = otsu_binarize(frame_distance(nxt, cur))
        return ForegroundMask(np.minimum(mask1.labels, mask2.labels))


class RunningAverage(Detector):
    """Recursive background average; change is |frame - background|.

    The response is taken against the background before it absorbs the
    current frame.  The background is kept in floats to avoid quantization
    drift.
    """

    method = "raf"
    PARAMS = (ParamSpec("alpha", float, 0.1, minimum=0.0, maximum=1.0),)

    def __init__(self, **params):
        super().__init__(**params)
        self._background: np.ndarray | None = None

    @property
    def background(self) -> np.ndarray | None:
        return self._background

    def _step(self, frame: Frame) -> ForegroundMask:
        pixels = as_float(frame.data)
        if self._background is None:
            self._background = pixels.copy()
            return otsu_binarize(np.zeros(frame.shape))
        response = np.abs(pixels - self._background)
        alpha = self.params["alpha"]
        self._background = (1.0 - alpha) * self._background + alpha * pixels
        return otsu_binarize(response)


class ForgettingGradient(Detector):
    """Forgetting morphological temporal gradient.

    Tracks a recursive temporal dilation M and erosion m; the gradient
    M - m is the change response.  M >= m holds after every update.
    """

    method = "fmtg"
    PARAMS = (ParamSpec("alpha", float, 0.1, minimum=0.0, maximum=1.0),)

    def __init__(self, **params):
        super().__init__(**params)
        self._upper: np.ndarray | None = None
        self._lower: np.ndarray | None = None

    def _step(self, frame: Frame) -> ForegroundMask:
        pixels = as_float(frame.data)
        alpha = self.params["alpha"]
        if self._upper is None:
            self._upper = pixels.copy()
            self._lower = pixels.copy()
        else:
            self._upper = alpha * pixels + (1.0 - alpha) * np.maximum(pixels, self._upper)
            self._lower = alpha * pixels + (1.0 - alpha) * np.minimum(pixels, self._lower)
        gradient = self._upper - self._lower
        return otsu_binarize(gradient)

    @property
    def gradient(self) -> np.ndarray | None:
        if self._upper is None:
            return None
        return self._upper - self._lower


def geodesic_reconstruct(
    delta: np.ndarray,
    frame: Frame | np.ndarray,
    alpha: float,
    iterations: int = 5,
) -> np.ndarray:
    """Forgetting geodesic reconstruction of ``delta`` under its own mask.

    The marker is the pixelwise minimum of the Sobel gradient magnitudes of
    the frame and of ``delta``; each pass blends the marker with its
    dilation and clips by ``delta``, so the result never exceeds ``delta``.
    """
    delta = np.asarray(delta, dtype=np.float64)
    marker = np.minimum(
        sobel_gradient_magnitude(frame),
        sobel_gradient_magnitude(delta),
    )
    rec = np.minimum(marker, delta)
    for _ in range(iterations):
        dilated = ndimage.grey_dilation(rec, size=(3, 3), mode="constant", cval=0.0)
        step = np.minimum(alpha * rec + (1.0 - alpha) * dilated, delta)
        if np.array_equal(step, rec):
            break
        rec = step
    return rec


class SigmaDelta(Detector):
    """Sigma-delta background estimation.

    The background M follows the signal by unit increments, the difference
    magnitude is compared against an amplified sigma-delta variance V, and
    an optional geodesic reconstruction of the difference suppresses ghosts
    before the label decision.  V is floored at 1 so a zero difference is
    always background.
    """

    method = "sigmadelta"
    PARAMS = (
        ParamSpec("N", int, 3, minimum=1),
        ParamSpec("reconstruction", bool, True),
        ParamSpec("rec_alpha", float, 0.1, minimum=0.0, maximum=1.0),
        ParamSpec("rec_iterations", int, 5, minimum=1),
    )

    def __init__(self, **params):
        super().__init__(**params)
        self._mean: np.ndarray | None = None
        self._variance: np.ndarray | None = None

    @property
    def mean(self) -> np.ndarray | None:
        return self._mean

    @property
    def variance(self) -> np.ndarray | None:
        return self._variance

    def _step(self, frame: Frame) -> ForegroundMask:
        pixels = frame.data.astype(np.int64)
        if self._mean is None:
            self._mean = pixels.copy()
            self._variance = np.ones_like(pixels)
            return ForegroundMask(np.zeros(frame.shape, dtype=np.uint8))
        amplification = self.params["N"]
        self._mean = self._mean + np.sign(pixels - self._mean)
        delta = np.abs(self._mean - pixels)
        active = delta != 0
        update = np.sign(amplification * delta - self._variance)
        self._variance = np.where(active, self._variance + update, self._variance)
        self._variance = np.maximum(self._variance, 1)
        decision_delta: np.ndarray = delta
        if self.params["reconstruction"]:
            decision_delta = geodesic_reconstruct(
                delta,
                frame,
                self.params["rec_alpha"],
                self.params["rec_iterations"],
            )
        return ForegroundMask((decision_delta >= self._variance).astype(np.uint8))

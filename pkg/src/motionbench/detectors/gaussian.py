"""Running Gaussian average and mixture-of-Gaussians detectors.

Both classify a pixel against the model as it stood before the current
frame, then fold the frame in, so a pixel can never explain itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..frames import Frame, ForegroundMask
from .base import Detector, ParamSpec, as_float

VAR_FLOOR = 1e-4  # keeps the matching band non-degenerate


class RunningGaussianAverage(Detector):
    """Single Gaussian per pixel with running-average parameter updates."""

    method = "rga"
    PARAMS = (
        ParamSpec("alpha", float, 0.01, minimum=0.0, maximum=1.0),
        ParamSpec("D", float, 2.5, minimum=0.0),
        ParamSpec("sigma_init", float, 20.0, minimum=0.0),
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
        pixels = as_float(frame.data)
        if self._mean is None:
            self._mean = pixels.copy()
            self._variance = np.full(frame.shape, self.params["sigma_init"] ** 2)
            return ForegroundMask(np.zeros(frame.shape, dtype=np.uint8))
        band = self.params["D"] * np.sqrt(self._variance)
        labels = (np.abs(pixels - self._mean) > band).astype(np.uint8)
        alpha = self.params["alpha"]
        self._mean = alpha * pixels + (1.0 - alpha) * self._mean
        residual = pixels - self._mean
        self._variance = alpha * residual**2 + (1.0 - alpha) * self._variance
        return ForegroundMask(labels)


@dataclass
class PixelMixture:
    """Mixture state for a single pixel, ordered by weight/stddev descending."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.means = np.asarray(self.means, dtype=np.float64)
        self.variances = np.asarray(self.variances, dtype=np.float64)
        if not (self.weights.shape == self.means.shape == self.variances.shape):
            raise ValueError("mixture arrays must share one shape")
        if (self.variances <= 0).any():
            raise ValueError("variances must be positive")

    def rank_order(self) -> np.ndarray:
        ratio = self.weights / np.sqrt(self.variances)
        return np.argsort(-ratio, kind="stable")

    def sort(self) -> None:
        order = self.rank_order()
        self.weights = self.weights[order]
        self.means = self.means[order]
        self.variances = self.variances[order]


def mog_match(mixture: PixelMixture, x: float, deviation: float = 2.5) -> int | None:
    """Index of the first (highest-ranked) Gaussian within the deviation band."""
    hits = np.abs(mixture.means - x) <= deviation * np.sqrt(mixture.variances)
    if not hits.any():
        return None
    return int(np.argmax(hits))


def mog_background_count(mixture: PixelMixture, portion: float) -> int:
    """Smallest B whose leading cumulative weight exceeds ``portion``."""
    cumulative = np.cumsum(mixture.weights)
    above = cumulative > portion
    if not above.any():
        return len(mixture.weights)
    return int(np.argmax(above)) + 1


def mog_update(
    mixture: PixelMixture,
    x: float,
    matched: int | None,
    alpha: float = 0.01,
    sigma_init: float = 20.0,
) -> PixelMixture:
    """Fold one observation into the mixture and restore the rank order.

    On a match the matched Gaussian moves toward x with rate alpha/weight
    (clamped to 1; cold-start Gaussians can carry zero weight) and the rest
    only decay.  With no match the lowest-ranked Gaussian is replaced by a
    fresh one centered at x.  Weights are renormalized either way.
    """
    w = mixture.weights.copy()
    mu = mixture.means.copy()
    var = mixture.variances.copy()
    if matched is not None:
        rho = min(1.0, alpha / max(w[matched], 1e-12))
        w = (1.0 - alpha) * w
        w[matched] += alpha
        mu[matched] = rho * x + (1.0 - rho) * mu[matched]
        var[matched] = rho * (x - mu[matched]) ** 2 + (1.0 - rho) * var[matched]
    else:
        lowest = len(w) - 1
        w[lowest] = w.min()
        mu[lowest] = x
        var[lowest] = sigma_init**2
    var = np.maximum(var, VAR_FLOOR)
    w = w / w.sum()
    out = PixelMixture(w, mu, var)
    out.sort()
    return out


class GaussianMixture(Detector):
    """Per-pixel K-Gaussian background model.

    A pixel is background when some Gaussian among the leading background
    set (cumulative weight above T) matches it within D standard
    deviations.  The internal arrays are kept sorted by weight/stddev along
    the component axis; the per-pixel helpers above define the reference
    semantics.
    """

    method = "mog"
    PARAMS = (
        ParamSpec("K", int, 3, minimum=1, maximum=8),
        ParamSpec("alpha", float, 0.01, minimum=0.0, maximum=1.0),
        ParamSpec("T", float, 0.25, minimum=0.0, maximum=1.0),
        ParamSpec("D", float, 2.5, minimum=0.0),
        ParamSpec("sigma_init", float, 20.0, minimum=0.0),
    )

    def __init__(self, **params):
        super().__init__(**params)
        self._weights: np.ndarray | None = None
        self._means: np.ndarray | None = None
        self._variances: np.ndarray | None = None

    def _seed(self, pixels: np.ndarray) -> None:
        k = self.params["K"]
        h, w = pixels.shape
        sigma0 = max(self.params["sigma_init"] ** 2, VAR_FLOOR)
        self._weights = np.zeros((k, h, w))
        self._means = np.zeros((k, h, w))
        self._variances = np.full((k, h, w), sigma0)
        self._weights[0] = 1.0
        self._means[0] = pixels
        if k > 1:
            # deterministic cold start: spare Gaussians spread over the range
            spread = np.linspace(0.0, 255.0, k - 1) if k > 2 else [0.0]
            for i, center in enumerate(spread, start=1):
                self._means[i] = center

    def mixture_at(self, row: int, col: int) -> PixelMixture:
        """Copy of one pixel's mixture, for inspection and tests."""
        if self._weights is None:
            raise RuntimeError("detector has not seen a frame yet")
        return PixelMixture(
            self._weights[:, row, col].copy(),
            self._means[:, row, col].copy(),
            self._variances[:, row, col].copy(),
        )

    def _step(self, frame: Frame) -> ForegroundMask:
        pixels = as_float(frame.data)
        if self._weights is None:
            self._seed(pixels)
            return ForegroundMask(np.zeros(frame.shape, dtype=np.uint8))

        w, mu, var = self._weights, self._means, self._variances
        alpha = self.params["alpha"]
        deviation = self.params["D"]
        portion = self.params["T"]

        hits = np.abs(mu - pixels) <= deviation * np.sqrt(var)
        # leading Gaussians whose exclusive prefix weight is still <= T;
        # shifted cumsum keeps the comparison bit-identical to the
        # per-pixel prefix rule
        prefix = np.zeros_like(w)
        prefix[1:] = np.cumsum(w, axis=0)[:-1]
        background_set = prefix <= portion
        labels = np.logical_not((hits & background_set).any(axis=0)).astype(np.uint8)

        matched = np.argmax(hits, axis=0)
        has_match = hits.any(axis=0)

        k = w.shape[0]
        rows, cols = np.indices(pixels.shape)
        sel = (matched, rows, cols)

        rho = np.minimum(1.0, alpha / np.maximum(w[sel], 1e-12))
        w_next = (1.0 - alpha) * w
        w_next[sel] = np.where(has_match, w_next[sel] + alpha, w_next[sel])
        mu_next = mu.copy()
        var_next = var.copy()
        mu_match = rho * pixels + (1.0 - rho) * mu[sel]
        var_match = rho * (pixels - mu_match) ** 2 + (1.0 - rho) * var[sel]
        mu_next[sel] = np.where(has_match, mu_match, mu_next[sel])
        var_next[sel] = np.where(has_match, var_match, var_next[sel])

        # unmatched pixels: replace the lowest-ranked Gaussian (arrays are
        # sorted); the surviving weights are not decayed on this path
        replace = ~has_match
        if replace.any():
            w_min = w.min(axis=0)
            w_next[:, replace] = w[:, replace]
            w_next[k - 1][replace] = w_min[replace]
            mu_next[k - 1][replace] = pixels[replace]
            var_next[k - 1][replace] = self.params["sigma_init"] ** 2

        var_next = np.maximum(var_next, VAR_FLOOR)
        w_next = w_next / w_next.sum(axis=0)

        order = np.argsort(-(w_next / np.sqrt(var_next)), axis=0, kind="stable")
        self._weights = np.take_along_axis(w_next, order, axis=0)
        self._means = np.take_along_axis(mu_next, order, axis=0)
        self._variances = np.take_along_axis(var_next, order, axis=0)
        return ForegroundMask(labels)

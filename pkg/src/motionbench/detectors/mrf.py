"""Markov-random-field regularized frame differencing.

The observation is the absolute difference between consecutive frames.  A
binary label field is initialized with a fixed threshold and relaxed by
iterated conditional modes: raster-scan sweeps where each pixel takes the
label minimizing its local Gibbs energy given the current in-place
neighborhood plus fixed past and future label fields.  The in-place raster
order is part of the contract; it makes the relaxation deterministic and
the total energy non-increasing per sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..frames import Frame, ForegroundMask
from ..thresholding import binarize
from .base import Detector, ParamSpec

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a regular dependency
    njit = None


@dataclass
class MrfParams:
    """Energy coefficients and relaxation bounds."""

    beta_s: float = 20.0
    beta_p: float = 10.0
    beta_f: float = 30.0
    alpha: float = 10.0  # label amplitude in the data term
    threshold: float = 35.0
    max_sweeps: int = 20

    def __post_init__(self) -> None:
        if min(self.beta_s, self.beta_p, self.beta_f) <= 0:
            raise ValueError("clique potentials must be positive")
        if self.max_sweeps < 1:
            raise ValueError("need at least one sweep")


def _python_icm_sweep(labels, obs, past, future, inv_two_sigma2, beta_s, beta_p, beta_f, alpha):
    height, width = labels.shape
    flips = 0
    for i in range(height):
        for j in range(width):
            neighbor_sum = 0
            neighbor_count = 0
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if di == 0 and dj == 0:
                        continue
                    ni = i + di
                    nj = j + dj
                    if 0 <= ni < height and 0 <= nj < width:
                        neighbor_sum += int(labels[ni, nj])
                        neighbor_count += 1
            o = obs[i, j]
            e0 = inv_two_sigma2 * o * o
            e1 = inv_two_sigma2 * (o - alpha) * (o - alpha)
            e0 += beta_s * (2 * neighbor_sum - neighbor_count)
            e1 += beta_s * (neighbor_count - 2 * neighbor_sum)
            if past[i, j] == 0:
                e0 -= beta_p
                e1 += beta_p
            else:
                e0 += beta_p
                e1 -= beta_p
            if future[i, j] == 0:
                e0 -= beta_f
                e1 += beta_f
            else:
                e0 += beta_f
                e1 -= beta_f
            # ties keep the current label so a sweep with no flips terminates
            if e1 < e0:
                new = 1
            elif e0 < e1:
                new = 0
            else:
                new = labels[i, j]
            if new != labels[i, j]:
                labels[i, j] = new
                flips += 1
    return flips


if njit is not None:
    _jit_icm_sweep = njit(cache=True)(_python_icm_sweep)
else:  # pragma: no cover
    _jit_icm_sweep = _python_icm_sweep


def icm_sweep(
    labels: np.ndarray,
    obs: np.ndarray,
    past: np.ndarray,
    future: np.ndarray,
    params: MrfParams,
    sigma2: float,
) -> int:
    """One in-place raster sweep; returns the number of flipped labels."""
    return int(
        _jit_icm_sweep(
            labels,
            np.ascontiguousarray(obs, dtype=np.float64),
            np.ascontiguousarray(past, dtype=np.uint8),
            np.ascontiguousarray(future, dtype=np.uint8),
            0.5 / sigma2,
            params.beta_s,
            params.beta_p,
            params.beta_f,
            params.alpha,
        )
    )


def mrf_energy(
    labels: np.ndarray,
    obs: np.ndarray,
    params: MrfParams,
    sigma2: float,
    past: np.ndarray | None = None,
    future: np.ndarray | None = None,
) -> float:
    """Total Gibbs energy: data term plus spatial and temporal cliques.

    Spatial cliques are the unordered 8-neighbor pairs (counted once);
    temporal terms are per-pixel connections to the fixed past and future
    fields when provided.
    """
    labels = np.asarray(labels, dtype=np.int64)
    obs = np.asarray(obs, dtype=np.float64)
    if labels.shape != obs.shape:
        raise ValueError("labels and observation must share one shape")
    psi = params.alpha * labels
    energy = float((0.5 / sigma2 * (obs - psi) ** 2).sum())
    height, width = labels.shape
    for dr, dc in ((0, 1), (1, -1), (1, 0), (1, 1)):  # each 8-neighbor pair once
        rows_a = slice(0, height - dr)
        rows_b = slice(dr, height)
        cols_a = slice(0, width - dc) if dc >= 0 else slice(-dc, width)
        cols_b = slice(dc, width) if dc >= 0 else slice(0, width + dc)
        a = labels[rows_a, cols_a]
        b = labels[rows_b, cols_b]
        same = (a == b).sum()
        energy += params.beta_s * (a.size - 2 * same)
    for level, beta in ((past, params.beta_p), (future, params.beta_f)):
        if level is not None:
            same = (labels == np.asarray(level, dtype=np.int64)).sum()
            energy += beta * (labels.size - 2 * same)
    return energy


def mrf_icm(
    obs: np.ndarray,
    init_labels: np.ndarray,
    past_labels: np.ndarray,
    future_labels: np.ndarray,
    params: MrfParams,
    sigma2: float | None = None,
) -> ForegroundMask:
    """Relax the initial labels to a local energy minimum.

    Stops at the first sweep with zero flips or at ``params.max_sweeps``.
    ``sigma2`` defaults to the variance of the observation, floored at 1.
    """
    obs = np.asarray(obs, dtype=np.float64)
    if sigma2 is None:
        sigma2 = max(float(obs.var()), 1.0)
    labels = np.ascontiguousarray(np.asarray(init_labels, dtype=np.uint8).copy())
    for _ in range(params.max_sweeps):
        if icm_sweep(labels, obs, past_labels, future_labels, params, sigma2) == 0:
            break
    return ForegroundMask(labels)


class MrfMotionDetector(Detector):
    """Frame differencing with MRF/ICM spatio-temporal regularization.

    Labeling frame t needs the difference to frame t+1 (the future field),
    so masks lag the input by one frame and the first two steps are
    warm-up.  The past field is the previous frame's final labels.
    """

    method = "mrfmd"
    latency = 1
    PARAMS = (
        ParamSpec("beta_s", float, 20.0, minimum=1e-9),
        ParamSpec("beta_p", float, 10.0, minimum=1e-9),
        ParamSpec("beta_f", float, 30.0, minimum=1e-9),
        ParamSpec("alpha", float, 10.0),
        ParamSpec("Th", float, 35.0, minimum=0.0),
        ParamSpec("max_sweeps", int, 20, minimum=1),
    )

    def __init__(self, **params):
        super().__init__(**params)
        self._mrf = MrfParams(
            beta_s=self.params["beta_s"],
            beta_p=self.params["beta_p"],
            beta_f=self.params["beta_f"],
            alpha=self.params["alpha"],
            threshold=self.params["Th"],
            max_sweeps=self.params["max_sweeps"],
        )
        self._prev_pixels: np.ndarray | None = None
        self._pending_obs: np.ndarray | None = None
        self._last_labels: np.ndarray | None = None

    def _step(self, frame: Frame) -> ForegroundMask:
        pixels = frame.data.astype(np.int64)
        prev, self._prev_pixels = self._prev_pixels, pixels
        if prev is None:
            return self._warmup()
        obs = np.abs(pixels - prev).astype(np.float64)
        pending, self._pending_obs = self._pending_obs, obs
        if pending is None:
            return self._warmup()

        threshold = self._mrf.threshold
        init = binarize(pending, threshold).labels
        future = binarize(obs, threshold).labels
        past = (
            self._last_labels
            if self._last_labels is not None
            else np.zeros_like(init)
        )
        mask = mrf_icm(pending, init, past, future, self._mrf)
        self._last_labels = mask.labels
        return mask

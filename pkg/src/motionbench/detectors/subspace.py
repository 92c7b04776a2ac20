"""Eigen-space background model (PCA over reshaped training frames)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..frames import Frame, ForegroundMask
from ..thresholding import otsu_binarize
from .base import Detector, ParamSpec, as_float


@dataclass
class EigenModel:
    """Mean vector and the leading orthonormal eigenvectors of a training set."""

    mean: np.ndarray
    basis: np.ndarray  # (pixels, M) columns, orthonormal
    eigenvalues: np.ndarray  # non-increasing, one per basis column
    shape: tuple[int, int]

    @property
    def components(self) -> int:
        return self.basis.shape[1]


def eigen_train(frames: list, components: int) -> EigenModel:
    """Fit the mean and top eigenvectors of the reshaped training frames.

    Uses the singular decomposition of the centered data matrix; the
    covariance normalization is 1/N.  If the data rank falls below the
    requested component count the basis is truncated with a warning.
    """
    if components < 1:
        raise ValueError("need at least one component")
    if len(frames) < components:
        raise ValueError(f"need at least {components} training frames, got {len(frames)}")
    planes = [f.data if isinstance(f, Frame) else np.asarray(f) for f in frames]
    shape = planes[0].shape
    if any(p.shape != shape for p in planes):
        raise ValueError("training frames must share one shape")
    data = np.stack([as_float(p).ravel() for p in planes], axis=1)  # (pixels, N)
    n = data.shape[1]
    mean = data.mean(axis=1)
    centered = data - mean[:, None]
    u, s, _ = np.linalg.svd(centered, full_matrices=False)
    rank = int((s > s[0] * 1e-10).sum()) if s.size and s[0] > 0 else 0
    kept = min(components, rank)
    if kept < components:
        warnings.warn(
            f"training data has rank {rank}; keeping {kept} of {components} components",
            stacklevel=2,
        )
    return EigenModel(
        mean=mean,
        basis=u[:, :kept],
        eigenvalues=(s[:kept] ** 2) / n,
        shape=shape,
    )


def eigen_residual(model: EigenModel, frame: Frame | np.ndarray) -> np.ndarray:
    """|frame - reconstruction| after projecting onto the model's basis."""
    plane = frame.data if isinstance(frame, Frame) else np.asarray(frame)
    if plane.shape != model.shape:
        raise ValueError(f"frame shape {plane.shape} does not match model {model.shape}")
    vector = as_float(plane).ravel() - model.mean
    projected = model.basis.T @ vector
    background = model.basis @ projected + model.mean
    return np.abs(as_float(plane).ravel() - background).reshape(model.shape)


class EigenBackground(Detector):
    """Background as a low-dimensional eigen-space of spaced training frames.

    The first N frames spaced ``spacing`` apart form the training set; all
    frames up to and including the last sample are warm-up.  The model is
    never updated afterward.
    """

    method = "eigbg"
    PARAMS = (
        ParamSpec("N", int, 28, minimum=1),
        ParamSpec("M", int, 3, minimum=1),
        ParamSpec("spacing", int, 10, minimum=1),
    )

    def __init__(self, **params):
        super().__init__(**params)
        if self.params["M"] > self.params["N"]:
            from .base import ConfigError

            raise ConfigError("eigbg: M cannot exceed the training-set size N")
        self._samples: list[np.ndarray] = []
        self._model: EigenModel | None = None

    @property
    def model(self) -> EigenModel | None:
        return self._model

    def _step(self, frame: Frame) -> ForegroundMask:
        if self._model is None:
            if self._t % self.params["spacing"] == 0 and len(self._samples) < self.params["N"]:
                self._samples.append(frame.data.copy())
                if len(self._samples) == self.params["N"]:
                    self._model = eigen_train(self._samples, self.params["M"])
                    self._samples = []
            return self._warmup()
        return otsu_binarize(eigen_residual(self._model, frame))

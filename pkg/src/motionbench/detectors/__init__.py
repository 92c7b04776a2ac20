"""Detector registry: twelve streaming motion detectors behind one contract."""

from __future__ import annotations

from .base import ConfigError, Detector, DetectorConfig, InputMismatchError, ParamSpec
from .entropy import DifferenceEntropy, SpatioTemporalEntropy, entropy
from .gaussian import (
    GaussianMixture,
    PixelMixture,
    RunningGaussianAverage,
    mog_background_count,
    mog_match,
    mog_update,
)
from .mrf import MrfMotionDetector, MrfParams, icm_sweep, mrf_energy, mrf_icm
from .sobs import SimplifiedSobs, sobs_distance, sobs_init
from .subspace import EigenBackground, EigenModel, eigen_residual, eigen_train
from .temporal import (
    ForgettingGradient,
    FrameDifference,
    RunningAverage,
    SigmaDelta,
    ThreeFrameDifference,
    frame_distance,
    geodesic_reconstruct,
)

_DETECTORS: tuple[type[Detector], ...] = (
    FrameDifference,
    ThreeFrameDifference,
    RunningAverage,
    ForgettingGradient,
    SigmaDelta,
    MrfMotionDetector,
    RunningGaussianAverage,
    GaussianMixture,
    SpatioTemporalEntropy,
    DifferenceEntropy,
    EigenBackground,
    SimplifiedSobs,
)

REGISTRY: dict[str, type[Detector]] = {cls.method: cls for cls in _DETECTORS}


def available_methods() -> tuple[str, ...]:
    """Method identifiers in canonical benchmark order."""
    return tuple(REGISTRY)


def get_detector_class(method: str) -> type[Detector]:
    try:
        return REGISTRY[method]
    except KeyError:
        raise ConfigError(
            f"unknown method {method!r}; available: {', '.join(REGISTRY)}"
        ) from None


def create_detector(method: str | DetectorConfig, **params) -> Detector:
    """Instantiate a detector by method name or from a DetectorConfig."""
    if isinstance(method, DetectorConfig):
        if params:
            raise ConfigError("pass parameters inside the config, not alongside it")
        return get_detector_class(method.method).from_config(method)
    return get_detector_class(method)(**params)


__all__ = [
    "ConfigError",
    "Detector",
    "DetectorConfig",
    "DifferenceEntropy",
    "EigenBackground",
    "EigenModel",
    "ForgettingGradient",
    "FrameDifference",
    "GaussianMixture",
    "InputMismatchError",
    "MrfMotionDetector",
    "MrfParams",
    "ParamSpec",
    "PixelMixture",
    "REGISTRY",
    "RunningAverage",
    "RunningGaussianAverage",
    "SigmaDelta",
    "SimplifiedSobs",
    "SpatioTemporalEntropy",
    "ThreeFrameDifference",
    "available_methods",
    "create_detector",
    "eigen_residual",
    "eigen_train",
    "entropy",
    "frame_distance",
    "geodesic_reconstruct",
    "get_detector_class",
    "icm_sweep",
    "mog_background_count",
    "mog_match",
    "mog_update",
    "mrf_energy",
    "mrf_icm",
    "sobs_distance",
    "sobs_init",
]

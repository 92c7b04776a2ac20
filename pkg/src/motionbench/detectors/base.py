"""Uniform streaming contract implemented by every detector.

A detector consumes frames in temporal order through ``step`` and returns one
binary mask per call.  Masks emitted while the model is still booting carry
``warmup=True``.  Methods that need a future frame (three-frame difference,
the MRF detector) report ``latency=1``: the mask returned at step t describes
frame t-1.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

from ..frames import ColorModel, Frame, ForegroundMask, all_background


class ConfigError(ValueError):
    """A detector configuration is missing, mistyped, or out of range."""


class InputMismatchError(ValueError):
    """A frame does not match the detector's declared input contract."""


@dataclass(frozen=True)
class ParamSpec:
    """One tunable parameter: name, type, default, and allowed range."""

    name: str
    type: type
    default: Any
    minimum: float | None = None
    maximum: float | None = None
    choices: tuple[str, ...] | None = None

    def coerce(self, value: Any) -> Any:
        if self.type is bool:
            if isinstance(value, bool):
                out = value
            elif isinstance(value, str):
                lowered = value.strip().lower()
                if lowered in ("1", "true", "yes", "on"):
                    out = True
                elif lowered in ("0", "false", "no", "off"):
                    out = False
                else:
                    raise ConfigError(f"{self.name}: cannot read {value!r} as a flag")
            elif isinstance(value, (int, float)) and value in (0, 1):
                out = bool(value)
            else:
                raise ConfigError(f"{self.name}: cannot read {value!r} as a flag")
        elif self.type is int:
            try:
                out = int(str(value), 0) if isinstance(value, str) else int(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{self.name}: cannot read {value!r} as an integer") from None
            if isinstance(value, float) and value != out:
                raise ConfigError(f"{self.name}: expected an integer, got {value!r}")
        elif self.type is float:
            try:
                out = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{self.name}: cannot read {value!r} as a number") from None
        elif self.type is str:
            out = str(value)
            if self.choices and out not in self.choices:
                raise ConfigError(f"{self.name}: must be one of {self.choices}, got {out!r}")
        else:  # pragma: no cover - specs only use the four types above
            raise ConfigError(f"{self.name}: unsupported parameter type {self.type}")
        if self.minimum is not None and out < self.minimum:
            raise ConfigError(f"{self.name}: {out!r} is below the minimum {self.minimum}")
        if self.maximum is not None and out > self.maximum:
            raise ConfigError(f"{self.name}: {out!r} is above the maximum {self.maximum}")
        return out


@dataclass
class DetectorConfig:
    """Method identifier plus a parameter bag validated against its schema."""

    method: str
    params: dict[str, Any] = field(default_factory=dict)

    def resolve(self) -> dict[str, Any]:
        """Apply defaults and validate; unknown keys are rejected."""
        from . import get_detector_class  # local import to avoid a cycle

        cls = get_detector_class(self.method)
        specs = {spec.name: spec for spec in cls.PARAMS}
        unknown = set(self.params) - set(specs)
        if unknown:
            raise ConfigError(
                f"{self.method}: unknown parameter(s) {sorted(unknown)}; "
                f"known: {sorted(specs)}"
            )
        resolved = {}
        for name, spec in specs.items():
            if name in self.params:
                resolved[name] = spec.coerce(self.params[name])
            else:
                resolved[name] = spec.default
        return resolved


class Detector(abc.ABC):
    """Base class for all streaming detectors.

    State is single-writer: one instance processes one frame sequence.
    Identical frame sequences with identical configs yield bit-identical
    masks.
    """

    method: ClassVar[str]
    input_model: ClassVar[ColorModel] = ColorModel.GRAY8
    latency: ClassVar[int] = 0
    PARAMS: ClassVar[tuple[ParamSpec, ...]] = ()

    def __init__(self, **params: Any) -> None:
        self.params = DetectorConfig(self.method, params).resolve()
        self._shape: tuple[int, int] | None = None
        self._t = -1

    @classmethod
    def from_config(cls, config: DetectorConfig) -> "Detector":
        if config.method != cls.method:
            raise ConfigError(f"config is for {config.method!r}, not {cls.method!r}")
        return cls(**config.params)

    @property
    def frames_seen(self) -> int:
        return self._t + 1

    def step(self, frame: Frame) -> ForegroundMask:
        """Consume the next frame and return the mask for it.

        For detectors with ``latency`` 1 the returned mask describes the
        previous frame once warm-up is over.
        """
        if frame.color_model is not self.input_model:
            raise InputMismatchError(
                f"{self.method} expects {self.input_model.value} frames, "
                f"got {frame.color_model.value}"
            )
        if self._shape is None:
            self._shape = frame.shape
        elif frame.shape != self._shape:
            raise InputMismatchError(
                f"{self.method} was initialized for {self._shape}, got {frame.shape}"
            )
        self._t += 1
        mask = self._step(frame)
        if mask.shape != self._shape:  # pragma: no cover - internal contract
            raise InputMismatchError("detector produced a mask of the wrong shape")
        return mask

    def _warmup(self) -> ForegroundMask:
        assert self._shape is not None
        return all_background(self._shape, warmup=True)

    @abc.abstractmethod
    def _step(self, frame: Frame) -> ForegroundMask:
        """Method-specific update; ``frame`` is already validated."""


def as_float(plane: np.ndarray) -> np.ndarray:
    return plane.astype(np.float64)

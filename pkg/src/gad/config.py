"""Run configuration shared by the controller, harness, and CLI."""
from __future__ import annotations

from dataclasses import dataclass

from .capture import MODE_PERSONALIZED, MODE_UNIFORM, CaptureParams
from .errors import ConfigurationError
from .lstm import HyperParams


@dataclass(frozen=True)
class GadConfig:
    mode: str = MODE_PERSONALIZED
    uniform_L: int = 46
    verify_steps: int = 2  # F: walking steps streamed through verification
    seed: int = 140
    converter_lr: float = 0.0055
    converter_epochs: int = 100
    detector_lr: float = 0.001
    detector_epochs: int = 50
    warmup: int = 46
    min_step: int = 30
    max_step: int = 80
    cycles: int = 8
    align_len: int = 46  # re-alignment buffer size for the detection phase

    def __post_init__(self):
        if self.mode not in (MODE_PERSONALIZED, MODE_UNIFORM):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.verify_steps < 1:
            raise ConfigurationError("verify_steps (F) must be >= 1")
        if self.align_len < 1:
            raise ConfigurationError("align_len must be >= 1")

    def capture_params(self) -> CaptureParams:
        return CaptureParams(
            warmup=self.warmup,
            min_step=self.min_step,
            max_step=self.max_step,
            cycles=self.cycles,
            mode=self.mode,
            uniform_L=self.uniform_L,
        )

    def converter_hp(self) -> HyperParams:
        return HyperParams(
            learning_rate=self.converter_lr,
            max_epochs=self.converter_epochs,
            seed=self.seed,
        )

    def detector_hp(self) -> HyperParams:
        return HyperParams(
            learning_rate=self.detector_lr,
            max_epochs=self.detector_epochs,
            seed=self.seed,
        )

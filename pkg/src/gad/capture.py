"""Gait segment capture state machine.

Consumes RAM values one at a time and emits a GaitSegment once roughly eight
gait cycles have been observed: T_start is the argmin of the first `warmup`
values, T_end the argmin of the [T_start+min_step, T_start+max_step] window
(personalized mode) or T_start + uniform_L (uniform mode), and T_fin the
argmin of the last step window. All windows are inclusive and 1-based; argmin
ties resolve to the earliest index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, DataError, UsageError
from .streammath import argmin_index

MODE_PERSONALIZED = "personalized"
MODE_UNIFORM = "uniform"


@dataclass(frozen=True)
class CaptureParams:
    warmup: int = 46
    min_step: int = 30
    max_step: int = 80
    cycles: int = 8
    mode: str = MODE_PERSONALIZED
    uniform_L: int = 46

    def __post_init__(self):
        if self.min_step >= self.max_step:
            raise ConfigurationError("min_step must be < max_step")
        if self.warmup < 1:
            raise ConfigurationError("warmup must be >= 1")
        if self.cycles < 2:
            raise ConfigurationError("cycles must be >= 2")
        if self.mode not in (MODE_PERSONALIZED, MODE_UNIFORM):
            raise ConfigurationError(f"unknown capture mode {self.mode!r}")
        if self.uniform_L < 1:
            raise ConfigurationError("uniform_L must be >= 1")


@dataclass(frozen=True)
class GaitSegment:
    values: tuple[float, ...]
    t_start: int
    t_end: int
    t_fin: int
    step_len: int


class SegmentCapture:
    """One capture session; feed RAM values until a segment is emitted."""

    def __init__(self, params: CaptureParams):
        self.params = params
        self._buf: list[float] = []
        self.t_start: int | None = None
        self.t_end: int | None = None
        self.step_len: int | None = None
        self.done = False

    @property
    def count(self) -> int:
        return len(self._buf)

    def feed(self, r: float) -> GaitSegment | None:
        if self.done:
            raise UsageError("feed after segment emission")
        if not math.isfinite(r):
            raise DataError(f"non-finite RAM value {r}")
        p = self.params
        self._buf.append(r)
        i = len(self._buf)

        if i == p.warmup:
            self.t_start = argmin_index(self._buf[: p.warmup], 1)
            if p.mode == MODE_UNIFORM:
                self.step_len = p.uniform_L
                self.t_end = self.t_start + p.uniform_L

        if (
            p.mode == MODE_PERSONALIZED
            and self.t_start is not None
            and self.step_len is None
            and i == self.t_start + p.max_step
        ):
            lo = self.t_start + p.min_step
            hi = self.t_start + p.max_step
            self.t_end = argmin_index(self._buf[lo - 1 : hi], lo)
            self.step_len = self.t_end - self.t_start

        if (
            self.step_len is not None
            and i == self.t_start + p.cycles * self.step_len
        ):
            lo = self.t_start + (p.cycles - 1) * self.step_len
            hi = self.t_start + p.cycles * self.step_len
            t_fin = argmin_index(self._buf[lo - 1 : hi], lo)
            self.done = True
            return GaitSegment(
                values=tuple(self._buf[self.t_start - 1 : t_fin]),
                t_start=self.t_start,
                t_end=self.t_end,
                t_fin=t_fin,
                step_len=self.step_len,
            )
        return None

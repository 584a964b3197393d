"""Four stages wired into the dual cascaded detector.

BaseGen feeds a captured gait segment through converter s1; every AARE it
emits goes to detector d1 first, then to converter s2; s2's emissions go to
detector d2. The same stage objects keep running in the online detection
phase (knowledge inheritance: no state reset between generation and
detection). Anomaly verdicts from d1/d2 are combined with OR and attributed
to the triggering stream index.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass

from .capture import GaitSegment
from .errors import GenerationError, UsageError
from .lstm import HyperParams
from .stage import DETECTOR_WINDOW, ROLE_CONVERTER, ROLE_DETECTOR, Stage

SERIAL_VERSION = 1

SOURCE_AD1 = "AD1"
SOURCE_AD2 = "AD2"
SOURCE_BOTH = "both"
SOURCE_NONE = "none"


@dataclass(frozen=True)
class Decision:
    anomaly: bool
    source: str
    stream_index: int


class DetectorState:
    """The four wired stages plus the step length; built by BaseGen, run by OLAD."""

    def __init__(
        self,
        step_len: int,
        converter_hp: HyperParams,
        detector_hp: HyperParams,
    ):
        if step_len < 2:
            raise UsageError("step length must be >= 2")
        self.step_len = step_len
        self.s1 = Stage(ROLE_CONVERTER, step_len, converter_hp)
        self.d1 = Stage(ROLE_DETECTOR, DETECTOR_WINDOW, detector_hp)
        self.s2 = Stage(ROLE_CONVERTER, step_len, converter_hp)
        self.d2 = Stage(ROLE_DETECTOR, DETECTOR_WINDOW, detector_hp)
        self.ready = False

    def _feed(self, r: float) -> tuple[bool, bool]:
        """Push one value through the cascade; fan-out order is d1 before s2."""
        d1_anom = False
        d2_anom = False
        o1 = self.s1.feed(r)
        if o1.emitted_aare is not None:
            d1_anom = self.d1.feed(o1.emitted_aare).anomaly
            o2 = self.s2.feed(o1.emitted_aare)
            if o2.emitted_aare is not None:
                d2_anom = self.d2.feed(o2.emitted_aare).anomaly
        return d1_anom, d2_anom

    def run_basegen(self, segment: GaitSegment) -> None:
        """Train the cascade on a captured segment; sets `ready` on completion."""
        for r in segment.values:
            self._feed(r)
        self.ready = self.d1.model is not None and self.d2.model is not None
        if not self.ready:
            raise GenerationError(
                "segment too short to train both detectors "
                f"(length {len(segment.values)}, s2 emitted {self.d2.input_count})"
            )

    def feed_online(self, r: float, stream_index: int) -> Decision:
        if not self.ready:
            raise UsageError("online feed before detector generation completed")
        d1_anom, d2_anom = self._feed(r)
        if d1_anom and d2_anom:
            source = SOURCE_BOTH
        elif d1_anom:
            source = SOURCE_AD1
        elif d2_anom:
            source = SOURCE_AD2
        else:
            source = SOURCE_NONE
        return Decision(d1_anom or d2_anom, source, stream_index)

    def snapshot(self) -> "DetectorState":
        return copy.deepcopy(self)

    # --- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": SERIAL_VERSION,
            "step_len": self.step_len,
            "ready": self.ready,
            "s1": self.s1.to_dict(),
            "d1": self.d1.to_dict(),
            "s2": self.s2.to_dict(),
            "d2": self.d2.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DetectorState":
        if d.get("version") != SERIAL_VERSION:
            raise UsageError(f"unsupported detector format version {d.get('version')}")
        obj = cls.__new__(cls)
        obj.step_len = d["step_len"]
        obj.ready = d["ready"]
        obj.s1 = Stage.from_dict(d["s1"])
        obj.d1 = Stage.from_dict(d["d1"])
        obj.s2 = Stage.from_dict(d["s2"])
        obj.d2 = Stage.from_dict(d["d2"])
        return obj


def basegen_run(
    segment: GaitSegment,
    converter_hp: HyperParams,
    detector_hp: HyperParams,
) -> DetectorState:
    det = DetectorState(segment.step_len, converter_hp, detector_hp)
    det.run_basegen(segment)
    return det

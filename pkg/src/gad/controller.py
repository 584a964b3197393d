"""Top-level per-session state machine.

Phases: idle -> capturing -> verifying -> {idle (fail) | verified}
-> aligning -> detecting.

A generation request starts segment capture; once the segment is emitted the
cascade is trained on it synchronously and verification begins. Verification
streams every subsequent sample through the online detector until the stream
index reaches T_start + L*(cycles + F); any anomaly in that span fails
verification and resets the session. A detection request (allowed only after
a pass) buffers the next `align_len` RAM values, replays from their minimum
onward into the detector, then streams live.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cascade import DetectorState, basegen_run
from .capture import SegmentCapture
from .config import GadConfig
from .errors import UsageError
from .streammath import AccelInstance, argmin_index, ram

PHASE_IDLE = "idle"
PHASE_CAPTURING = "capturing"
PHASE_VERIFYING = "verifying"
PHASE_VERIFIED = "verified"
PHASE_ALIGNING = "aligning"
PHASE_DETECTING = "detecting"

EVENT_SEGMENT_CAPTURED = "segment_captured"
EVENT_MODEL_READY = "model_ready"
EVENT_VERIFICATION_PASSED = "verification_passed"
EVENT_VERIFICATION_FAILED = "verification_failed"
EVENT_ANOMALY = "anomaly"
EVENT_RESTART_REQUIRED = "restart_required"


@dataclass(frozen=True)
class Event:
    kind: str
    stream_index: int
    detail: dict = field(default_factory=dict)


class Controller:
    def __init__(self, config: GadConfig | None = None):
        self.config = config or GadConfig()
        self.phase = PHASE_IDLE
        self.i = 0
        self.capture: SegmentCapture | None = None
        self.det: DetectorState | None = None
        self.verify_limit: int | None = None
        self._align: list[float] = []

    @classmethod
    def resume_verified(
        cls, detector: DetectorState, config: GadConfig | None = None
    ) -> "Controller":
        """A controller whose detector already passed verification elsewhere.

        Used by the evaluation harness to replay many impostor streams against
        one stored detector snapshot.
        """
        if not detector.ready:
            raise UsageError("resume_verified needs a completed detector")
        ctrl = cls(config)
        ctrl.det = detector
        ctrl.phase = PHASE_VERIFIED
        return ctrl

    def _reset(self) -> None:
        self.phase = PHASE_IDLE
        self.i = 0
        self.capture = None
        self.det = None
        self.verify_limit = None
        self._align = []

    # --- requests -------------------------------------------------------------

    def request_generate(self) -> None:
        if self.phase != PHASE_IDLE:
            raise UsageError(f"generation request in phase {self.phase!r}")
        self._reset()
        self.capture = SegmentCapture(self.config.capture_params())
        self.phase = PHASE_CAPTURING

    def request_detect(self) -> None:
        if self.phase != PHASE_VERIFIED:
            raise UsageError(f"detection request in phase {self.phase!r}")
        self._align = []
        self.phase = PHASE_ALIGNING

    # --- streaming --------------------------------------------------------------

    def on_sample(self, a: AccelInstance) -> list[Event]:
        if self.phase in (PHASE_IDLE, PHASE_VERIFIED):
            raise UsageError(f"sample received in phase {self.phase!r}")
        self.i += 1
        r = ram(a)
        if self.phase == PHASE_CAPTURING:
            return self._on_capturing(r)
        if self.phase == PHASE_VERIFYING:
            return self._on_verifying(r)
        if self.phase == PHASE_ALIGNING:
            return self._on_aligning(r)
        return self._on_detecting(r)

    def _on_capturing(self, r: float) -> list[Event]:
        segment = self.capture.feed(r)
        if segment is None:
            return []
        self.det = basegen_run(
            segment, self.config.converter_hp(), self.config.detector_hp()
        )
        self.verify_limit = segment.t_start + segment.step_len * (
            self.config.cycles + self.config.verify_steps
        )
        self.phase = PHASE_VERIFYING
        detail = {
            "L": segment.step_len,
            "T_start": segment.t_start,
            "T_end": segment.t_end,
            "T_fin": segment.t_fin,
        }
        return [
            Event(EVENT_SEGMENT_CAPTURED, self.i, detail),
            Event(EVENT_MODEL_READY, self.i, {"L": segment.step_len}),
        ]

    def _on_verifying(self, r: float) -> list[Event]:
        if self.i >= self.verify_limit:
            # The sample that reaches the limit ends verification unfed.
            self.phase = PHASE_VERIFIED
            return [Event(EVENT_VERIFICATION_PASSED, self.i)]
        decision = self.det.feed_online(r, self.i)
        if decision.anomaly:
            events = [
                Event(EVENT_ANOMALY, self.i, {"source": decision.source}),
                Event(EVENT_VERIFICATION_FAILED, self.i),
                Event(EVENT_RESTART_REQUIRED, self.i),
            ]
            self._reset()
            return events
        return []

    def _on_aligning(self, r: float) -> list[Event]:
        self._align.append(r)
        if len(self._align) < self.config.align_len:
            return []
        # Buffer full: replay from its minimum onward, then go live.
        k = argmin_index(self._align, 1)
        events: list[Event] = []
        for v in self._align[k - 1 :]:
            decision = self.det.feed_online(v, self.i)
            if decision.anomaly:
                events.append(
                    Event(EVENT_ANOMALY, self.i, {"source": decision.source})
                )
        self._align = []
        self.phase = PHASE_DETECTING
        return events

    def _on_detecting(self, r: float) -> list[Event]:
        decision = self.det.feed_online(r, self.i)
        if decision.anomaly:
            return [Event(EVENT_ANOMALY, self.i, {"source": decision.source})]
        return []

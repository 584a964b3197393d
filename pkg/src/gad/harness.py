"""Desk-scale reproduction of the verification and impersonation protocol.

Per-subject verification runs the full controller over the subject's trace.
The all-pairs impersonation experiment restores each genuine subject's
post-verification detector snapshot, requests detection, and streams the
impostor's samples (including the re-alignment buffer) until the first
anomaly. Self-pairs are excluded from the detection ratio and run instead as
false-positive controls on the genuine subject's own continuation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cascade import DetectorState
from .config import GadConfig
from .controller import (
    EVENT_ANOMALY,
    EVENT_VERIFICATION_FAILED,
    EVENT_VERIFICATION_PASSED,
    Controller,
)
from .dataio import Trace
from .errors import UsageError

REASON_INSUFFICIENT = "insufficient data"
REASON_ANOMALY = "verification anomaly"


@dataclass
class SubjectResult:
    subject_id: str
    passed: bool
    reason: str | None = None
    step_len: int | None = None
    t_start: int | None = None
    # Samples fed through verification. The sample whose index reaches the
    # verification limit ends verification unfed, so it is not counted and a
    # continuation stream starting at samples[consumed:] is gap-free.
    consumed: int = 0
    detector: DetectorState | None = None


@dataclass
class VerificationSummary:
    mode: str
    passed: int
    failed: int
    total: int
    per_subject: dict[str, SubjectResult]


@dataclass(frozen=True)
class PairResult:
    genuine_id: str
    impostor_id: str
    detected: bool
    latency: int | None  # impostor-relative sample index of the first anomaly


@dataclass
class ImpersonationReport:
    ratio: float
    results: list[PairResult]
    controls: list[PairResult] = field(default_factory=list)

    @property
    def false_positive_rate(self) -> float:
        if not self.controls:
            return 0.0
        return sum(c.detected for c in self.controls) / len(self.controls)


@dataclass
class LatencyHistogram:
    bins: list[tuple[int, int, int]]  # (lo, hi, count), hi exclusive
    early_window: int
    early_fraction: float
    detected: int


def minimum_trace_length(config: GadConfig) -> int:
    return config.warmup + (config.cycles + config.verify_steps) * config.max_step


def run_verification(traces, config: GadConfig) -> VerificationSummary:
    per_subject: dict[str, SubjectResult] = {}
    for trace in sorted(traces, key=lambda t: t.subject_id):
        per_subject[trace.subject_id] = verify_subject(trace, config)
    passed = sum(r.passed for r in per_subject.values())
    return VerificationSummary(
        mode=config.mode,
        passed=passed,
        failed=len(per_subject) - passed,
        total=len(per_subject),
        per_subject=per_subject,
    )


def verify_subject(trace: Trace, config: GadConfig) -> SubjectResult:
    """Run capture + generation + verification over one subject's trace."""
    result = SubjectResult(subject_id=trace.subject_id, passed=False)
    if len(trace) < minimum_trace_length(config):
        result.reason = REASON_INSUFFICIENT
        return result
    ctrl = Controller(config)
    ctrl.request_generate()
    for k, sample in enumerate(trace.samples, 1):
        for ev in ctrl.on_sample(sample):
            if ev.kind == "segment_captured":
                result.step_len = ev.detail["L"]
                result.t_start = ev.detail["T_start"]
            elif ev.kind == EVENT_VERIFICATION_PASSED:
                result.passed = True
                result.consumed = k - 1
                result.detector = ctrl.det.snapshot()
            elif ev.kind == EVENT_VERIFICATION_FAILED:
                result.reason = REASON_ANOMALY
                return result
        if result.passed:
            return result
    result.reason = REASON_INSUFFICIENT
    return result


def stream_detection(
    detector: DetectorState,
    samples,
    config: GadConfig,
    max_samples: int | None = None,
) -> int | None:
    """Stream samples into a fresh copy of `detector` in detection mode.

    Returns the 1-based index (relative to the streamed samples) of the first
    anomaly, or None. The stored detector is never mutated.
    """
    ctrl = Controller.resume_verified(detector.snapshot(), config)
    ctrl.request_detect()
    for k, sample in enumerate(samples, 1):
        if max_samples is not None and k > max_samples:
            return None
        for ev in ctrl.on_sample(sample):
            if ev.kind == EVENT_ANOMALY:
                return k
    return None


def run_impersonation(
    summary: VerificationSummary,
    traces_by_id: dict[str, Trace],
    config: GadConfig,
    max_samples: int | None = None,
    run_controls: bool = True,
) -> ImpersonationReport:
    passed = [
        r for _, r in sorted(summary.per_subject.items()) if r.passed
    ]
    if len(passed) < 2:
        raise UsageError("impersonation needs at least 2 passed subjects")
    results: list[PairResult] = []
    for genuine in passed:
        for impostor in passed:
            if impostor.subject_id == genuine.subject_id:
                continue
            samples = traces_by_id[impostor.subject_id].samples
            latency = stream_detection(
                genuine.detector, samples, config, max_samples
            )
            results.append(
                PairResult(
                    genuine_id=genuine.subject_id,
                    impostor_id=impostor.subject_id,
                    detected=latency is not None,
                    latency=latency,
                )
            )
    controls: list[PairResult] = []
    if run_controls:
        for genuine in passed:
            continuation = traces_by_id[genuine.subject_id].samples[
                genuine.consumed :
            ]
            if len(continuation) < config.align_len + 10:
                continue
            latency = stream_detection(
                genuine.detector, continuation, config, max_samples
            )
            controls.append(
                PairResult(
                    genuine_id=genuine.subject_id,
                    impostor_id=genuine.subject_id,
                    detected=latency is not None,
                    latency=latency,
                )
            )
    ratio = sum(r.detected for r in results) / len(results)
    return ImpersonationReport(ratio=ratio, results=results, controls=controls)


def latency_histogram(
    results, early_window: int = 154, bin_width: int = 50
) -> LatencyHistogram:
    results = list(results)
    if not results:
        raise UsageError("latency histogram over empty results")
    latencies = sorted(r.latency for r in results if r.detected)
    bins: list[tuple[int, int, int]] = []
    early = 0
    if latencies:
        top = latencies[-1]
        n_bins = (top - 1) // bin_width + 1
        counts = [0] * n_bins
        for lat in latencies:
            counts[(lat - 1) // bin_width] += 1
            if lat <= early_window:
                early += 1
        bins = [
            (b * bin_width + 1, (b + 1) * bin_width + 1, c)
            for b, c in enumerate(counts)
        ]
    fraction = early / len(latencies) if latencies else 0.0
    return LatencyHistogram(
        bins=bins,
        early_window=early_window,
        early_fraction=fraction,
        detected=len(latencies),
    )

"""Trace ingestion, synthetic gait generation, and impersonation splicing.

Trace files are delimited text (comma or tab), one 3-axis sample per row,
with a configurable column mapping and optional header. Synthetic traces put
the whole signal on the z axis (x = y = 0), so the RAM series equals the
generated waveform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DataError, ParseError
from .streammath import AccelInstance

WAVEFORM_SINE = "sine"
WAVEFORM_SAWTOOTH = "sawtooth"
WAVEFORM_TWO_HARMONIC = "two_harmonic"
WAVEFORMS = (WAVEFORM_SINE, WAVEFORM_SAWTOOTH, WAVEFORM_TWO_HARMONIC)


@dataclass(frozen=True)
class Trace:
    subject_id: str
    samples: tuple[AccelInstance, ...]
    rate_hz: float | None = None

    def __post_init__(self):
        if not self.samples:
            raise DataError(f"trace {self.subject_id!r} is empty")

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class SynthSpec:
    period: int
    n: int
    seed: int
    amplitude: float = 2.0
    baseline: float = 9.8
    noise_sigma: float = 0.0
    waveform: str = WAVEFORM_SINE

    def __post_init__(self):
        if self.period < 2:
            raise ConfigurationError("period must be >= 2")
        if self.n < 10 * self.period:
            raise ConfigurationError("n must be >= 10 * period")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be >= 0")
        if self.waveform not in WAVEFORMS:
            raise ConfigurationError(f"unknown waveform {self.waveform!r}")


def synth_trace(spec: SynthSpec, subject_id: str = "synth") -> Trace:
    t = np.arange(spec.n, dtype=np.float64)
    phase = 2.0 * np.pi * t / spec.period
    if spec.waveform == WAVEFORM_SINE:
        wf = np.sin(phase)
    elif spec.waveform == WAVEFORM_SAWTOOTH:
        wf = 2.0 * ((t % spec.period) / spec.period) - 1.0
    else:
        wf = 0.75 * np.sin(phase) + 0.25 * np.sin(2.0 * phase + 0.9)
    z = spec.baseline + spec.amplitude * wf
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        z = z + rng.normal(0.0, spec.noise_sigma, size=spec.n)
    samples = tuple(AccelInstance(0.0, 0.0, float(v)) for v in z)
    return Trace(subject_id=subject_id, samples=samples)


def read_trace(
    path,
    subject_id: str | None = None,
    columns: tuple[int, int, int] = (0, 1, 2),
    header: bool = False,
    delimiter: str | None = None,
    rate_hz: float | None = None,
) -> Trace:
    """One AccelInstance per row, order preserved.

    `delimiter` None auto-detects comma vs tab from the first data line.
    """
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    start = 1 if header else 0
    samples: list[AccelInstance] = []
    for lineno, line in enumerate(lines, 1):
        if lineno <= start or not line.strip():
            continue
        sep = delimiter
        if sep is None:
            sep = "\t" if "\t" in line else ","
        fields = line.split(sep)
        try:
            ax = float(fields[columns[0]])
            ay = float(fields[columns[1]])
            az = float(fields[columns[2]])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"cannot parse row {line!r}: {exc}", lineno) from exc
        if not (math.isfinite(ax) and math.isfinite(ay) and math.isfinite(az)):
            raise ParseError(f"non-finite value in row {line!r}", lineno)
        samples.append(AccelInstance(ax, ay, az))
    if not samples:
        raise DataError(f"no samples in {path}")
    return Trace(
        subject_id=subject_id or path.stem,
        samples=tuple(samples),
        rate_hz=rate_hz,
    )


def write_trace(trace: Trace, path) -> None:
    """Comma-delimited ax,ay,az rows; float repr round-trips exactly."""
    lines = [f"{a.ax!r},{a.ay!r},{a.az!r}" for a in trace.samples]
    Path(path).write_text("\n".join(lines) + "\n")


def concat_traces(x: Trace, y: Trace, subject_id: str | None = None):
    """x's samples followed by y's; returns (trace, splice_index).

    splice_index is the 1-based position of y's first sample.
    """
    merged = Trace(
        subject_id=subject_id or f"{x.subject_id}+{y.subject_id}",
        samples=x.samples + y.samples,
        rate_hz=x.rate_hz,
    )
    return merged, len(x.samples) + 1

"""Real-time gait anomaly detection from 3-axis accelerometer streams."""

from .capture import CaptureParams, GaitSegment, SegmentCapture
from .cascade import Decision, DetectorState, basegen_run
from .config import GadConfig
from .controller import Controller, Event
from .dataio import SynthSpec, Trace, concat_traces, read_trace, synth_trace, write_trace
from .errors import (
    ConfigurationError,
    DataError,
    GadError,
    GenerationError,
    ParseError,
    TrainingError,
    UsageError,
)
from .lstm import HyperParams, PredictionModel
from .stage import Stage, StageOutput
from .streammath import AccelInstance, PairWindow, ThresholdState, argmin_index, ram

__all__ = [
    "AccelInstance",
    "CaptureParams",
    "ConfigurationError",
    "Controller",
    "DataError",
    "Decision",
    "DetectorState",
    "Event",
    "GadConfig",
    "GadError",
    "GaitSegment",
    "GenerationError",
    "HyperParams",
    "PairWindow",
    "ParseError",
    "PredictionModel",
    "SegmentCapture",
    "Stage",
    "StageOutput",
    "SynthSpec",
    "ThresholdState",
    "Trace",
    "TrainingError",
    "UsageError",
    "argmin_index",
    "basegen_run",
    "concat_traces",
    "ram",
    "read_trace",
    "synth_trace",
    "write_trace",
]

__version__ = "0.1.0"

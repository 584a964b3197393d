"""The generic predict -> AARE -> threshold -> retrain unit.

A converter stage (window w = step length) predicts its input series and
emits AARE values downstream; on threshold exceedance it silently retrains on
the latest w inputs. A detector stage (window 3) predicts an AARE series; on
exceedance it retrains on the latest 3 inputs, re-predicts the current value,
and reports an anomaly only if the exceedance persists.

Timing contract: the first AARE is produced exactly at input_count = 2w, and
the prediction recorded for position t+1 is made by whichever model is
current after processing position t.
"""
from __future__ import annotations

import copy
import math
from collections import deque
from dataclasses import dataclass

from .errors import DataError, UsageError
from .lstm import HyperParams, PredictionModel
from .streammath import PairWindow, ThresholdState

ROLE_CONVERTER = "converter"
ROLE_DETECTOR = "detector"

DETECTOR_WINDOW = 3


@dataclass
class StageOutput:
    emitted_aare: float | None = None
    retrained: bool = False
    anomaly: bool = False


class Stage:
    def __init__(self, role: str, window: int, hp: HyperParams):
        if role not in (ROLE_CONVERTER, ROLE_DETECTOR):
            raise UsageError(f"unknown stage role {role!r}")
        if window < 2:
            raise UsageError("stage window must be >= 2")
        self.role = role
        self.window = window
        self.hp = hp
        self.input_count = 0
        # Last window+1 inputs: the trailing `window` values are the sliding
        # prediction window, the extra value lets a detector re-predict the
        # current position after a retrain.
        self._buf: deque[float] = deque(maxlen=window + 1)
        self._pairs = PairWindow(window)
        self.thresholds = ThresholdState()
        self.model: PredictionModel | None = None
        self._pending: float | None = None

    # --- internals -----------------------------------------------------------

    def _train_new(self, values) -> PredictionModel:
        return PredictionModel(self.hp).fit(values)

    def _latest_window(self) -> list[float]:
        return list(self._buf)[-self.window :]

    def _previous_window(self) -> list[float]:
        return list(self._buf)[: self.window]

    # --- API -----------------------------------------------------------------

    @property
    def aare_count(self) -> int:
        return self.thresholds.count

    def feed(self, v: float) -> StageOutput:
        if not math.isfinite(v):
            raise DataError(f"non-finite stage input {v}")
        self.input_count += 1
        self._buf.append(v)
        out = StageOutput()

        if self.input_count < self.window:
            return out
        if self.input_count == self.window:
            self.model = self._train_new(self._latest_window())
            self._pending = self.model.predict_next(self._latest_window())
            return out

        # input_count > window: pair up the prediction made for this position.
        self._pairs.push(v, self._pending)
        if self.input_count >= 2 * self.window:
            a = self._pairs.aare()
            if self.role == ROLE_CONVERTER:
                out.emitted_aare = a
                self.thresholds.update(a)
                thd = self.thresholds.thd
                if thd is not None and a > thd:
                    self.model = self._train_new(self._latest_window())
                    out.retrained = True
            else:
                thd = self.thresholds.thd
                if thd is not None and a > thd:
                    self.model = self._train_new(self._latest_window())
                    out.retrained = True
                    new_pred = self.model.predict_next(self._previous_window())
                    self._pairs.replace_last(v, new_pred)
                    a = self._pairs.aare()
                    if a > thd:
                        out.anomaly = True
                self.thresholds.update(a)
        self._pending = self.model.predict_next(self._latest_window())
        return out

    def snapshot(self) -> "Stage":
        if self.model is None:
            raise UsageError("snapshot of a stage without a trained model")
        return copy.deepcopy(self)

    # --- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "window": self.window,
            "hp": self.model.to_dict()["hp"] if self.model else {
                "learning_rate": self.hp.learning_rate,
                "max_epochs": self.hp.max_epochs,
                "hidden_layers": self.hp.hidden_layers,
                "hidden_units": self.hp.hidden_units,
                "activation": self.hp.activation,
                "seed": self.hp.seed,
            },
            "input_count": self.input_count,
            "buf": list(self._buf),
            "pairs": self._pairs.pairs(),
            "thresholds": self.thresholds.to_dict(),
            "model": self.model.to_dict() if self.model else None,
            "pending": self._pending,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Stage":
        stage = cls(d["role"], d["window"], HyperParams(**d["hp"]))
        stage.input_count = d["input_count"]
        for v in d["buf"]:
            stage._buf.append(v)
        for actual, predicted in d["pairs"]:
            stage._pairs.push(actual, predicted)
        stage.thresholds = ThresholdState.from_dict(d["thresholds"])
        stage.model = (
            PredictionModel.from_dict(d["model"]) if d["model"] is not None else None
        )
        stage._pending = d["pending"]
        return stage

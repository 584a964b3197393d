"""A minimal, deterministic one-step-ahead LSTM predictor.

Architecture is fixed: one LSTM layer (10 hidden units by default, tanh cell
activations, sigmoid gates) plus a scalar linear output unit. Training is
full-batch Adam on the MSE of the window's one-step-ahead pairs (teacher
forcing), with early stopping.

Reproducibility contract: weights are drawn from one numpy PCG64 generator
seeded with `hp.seed`, consumed in the fixed order W_in, W_rec, W_out
(uniform in +/- sqrt(6 / (fan_in + fan_out)) per matrix); biases start at
zero. Identical seed + hyperparameters + training data therefore give
bit-identical models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigurationError, DataError, TrainingError, UsageError

# Early stopping: stop once the epoch loss has improved by less than
# EARLY_STOP_TOL for EARLY_STOP_PATIENCE consecutive epochs (floor 1 epoch).
EARLY_STOP_TOL = 1e-6
EARLY_STOP_PATIENCE = 5

# Windows whose value range is below this are mapped to the constant 0 and
# inverted back exactly (guards tanh saturation and zero-range division).
SCALE_MIN_RANGE = 1e-9

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

SERIAL_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    learning_rate: float
    max_epochs: int
    hidden_layers: int = 1
    hidden_units: int = 10
    activation: str = "tanh"
    seed: int = 140

    def __post_init__(self):
        if self.hidden_layers != 1:
            raise ConfigurationError("only a single hidden layer is supported")
        if self.hidden_units < 1:
            raise ConfigurationError("hidden_units must be >= 1")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ConfigurationError("learning_rate must be a positive real")
        if self.max_epochs < 1:
            raise ConfigurationError("max_epochs must be >= 1")
        if self.activation != "tanh":
            raise ConfigurationError("only tanh activation is supported")

    @classmethod
    def converter_profile(cls, seed: int = 140) -> "HyperParams":
        return cls(learning_rate=0.0055, max_epochs=100, seed=seed)

    @classmethod
    def detector_profile(cls, seed: int = 140) -> "HyperParams":
        return cls(learning_rate=0.001, max_epochs=50, seed=seed)


@njit(cache=True)
def _forward(wi, wr, b, wo, bo, x):
    """Run the LSTM over x, returning outputs plus caches for BPTT.

    Gate layout along axis 0 of wi/wr/b is [input, forget, cell, output],
    each a block of n rows.
    """
    t_len = x.shape[0]
    n = wr.shape[1]
    hs = np.zeros((t_len + 1, n))
    cs = np.zeros((t_len + 1, n))
    gi = np.empty((t_len, n))
    gf = np.empty((t_len, n))
    gg = np.empty((t_len, n))
    go = np.empty((t_len, n))
    ct = np.empty((t_len, n))
    y = np.empty(t_len)
    for t in range(t_len):
        z = wi[:, 0] * x[t] + np.dot(wr, hs[t]) + b
        gi[t] = 1.0 / (1.0 + np.exp(-z[:n]))
        gf[t] = 1.0 / (1.0 + np.exp(-z[n : 2 * n]))
        gg[t] = np.tanh(z[2 * n : 3 * n])
        go[t] = 1.0 / (1.0 + np.exp(-z[3 * n :]))
        c = gf[t] * cs[t] + gi[t] * gg[t]
        tc = np.tanh(c)
        ct[t] = tc
        cs[t + 1] = c
        hs[t + 1] = go[t] * tc
        y[t] = np.dot(wo, hs[t + 1]) + bo
    return y, hs, cs, gi, gf, gg, go, ct


@njit(cache=True)
def _predict_last(wi, wr, b, wo, bo, x):
    """Forward pass keeping only the running state; returns the last output."""
    t_len = x.shape[0]
    n = wr.shape[1]
    h = np.zeros(n)
    c = np.zeros(n)
    for t in range(t_len):
        z = wi[:, 0] * x[t] + np.dot(wr, h) + b
        i = 1.0 / (1.0 + np.exp(-z[:n]))
        f = 1.0 / (1.0 + np.exp(-z[n : 2 * n]))
        g = np.tanh(z[2 * n : 3 * n])
        o = 1.0 / (1.0 + np.exp(-z[3 * n :]))
        c = f * c + i * g
        h = o * np.tanh(c)
    return np.dot(wo, h) + bo


@njit(cache=True)
def _backward(wi, wr, wo, x, targets, y, hs, cs, gi, gf, gg, go, ct):
    """Exact BPTT gradients of the mean squared one-step error."""
    t_len = x.shape[0]
    n = wr.shape[1]
    dwi = np.zeros_like(wi)
    dwr = np.zeros_like(wr)
    db = np.zeros(4 * n)
    dwo = np.zeros(n)
    dbo = 0.0
    dh_next = np.zeros(n)
    dc_next = np.zeros(n)
    dz = np.empty(4 * n)
    for t in range(t_len - 1, -1, -1):
        dy = 2.0 * (y[t] - targets[t]) / t_len
        dh = dy * wo + dh_next
        dwo += dy * hs[t + 1]
        dbo += dy
        do = dh * ct[t]
        dc = dh * go[t] * (1.0 - ct[t] * ct[t]) + dc_next
        di = dc * gg[t]
        dg = dc * gi[t]
        df = dc * cs[t]
        dz[:n] = di * gi[t] * (1.0 - gi[t])
        dz[n : 2 * n] = df * gf[t] * (1.0 - gf[t])
        dz[2 * n : 3 * n] = dg * (1.0 - gg[t] * gg[t])
        dz[3 * n :] = do * go[t] * (1.0 - go[t])
        for k in range(4 * n):
            dwi[k, 0] += dz[k] * x[t]
        for k in range(4 * n):
            for j in range(n):
                dwr[k, j] += dz[k] * hs[t, j]
        db += dz
        dh_next = np.dot(dz, wr)
        dc_next = dc * gf[t]
    return dwi, dwr, db, dwo, dbo


def _uniform_init(rng: np.random.Generator, shape, fan_in: int, fan_out: int):
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class PredictionModel:
    """Seedable one-step-ahead predictor over a fixed-length sliding window."""

    def __init__(self, hp: HyperParams):
        self.hp = hp
        n = hp.hidden_units
        rng = np.random.default_rng(hp.seed)
        self.wi = _uniform_init(rng, (4 * n, 1), 1, 4 * n)
        self.wr = _uniform_init(rng, (4 * n, n), n, 4 * n)
        self.b = np.zeros(4 * n)
        self.wo = _uniform_init(rng, (n,), n, 1)
        self.bo = 0.0
        self.mid = 0.0
        self.half = 0.0
        self.window_size: int | None = None
        self.last_loss: float | None = None

    # --- scaling -----------------------------------------------------------

    def _fit_scaler(self, window: np.ndarray) -> None:
        lo = float(window.min())
        hi = float(window.max())
        self.mid = (lo + hi) / 2.0
        half = (hi - lo) / 2.0
        self.half = half if half >= SCALE_MIN_RANGE else 0.0

    def _scale(self, window: np.ndarray) -> np.ndarray:
        if self.half == 0.0:
            return np.zeros_like(window)
        return (window - self.mid) / self.half

    def _inverse(self, y: float) -> float:
        return self.mid + y * self.half

    # --- training / prediction ---------------------------------------------

    @property
    def trained(self) -> bool:
        return self.window_size is not None

    def parameter_count(self) -> int:
        return self.wi.size + self.wr.size + self.b.size + self.wo.size + 1

    def fit(self, window) -> "PredictionModel":
        """Fit the model to predict value t+1 from the prefix ending at t.

        Uses every adjacent pair in the window (many-to-many teacher forcing),
        full-batch Adam, and early stopping. The scaler is refit to this
        window. Returns self.
        """
        window = np.asarray(window, dtype=np.float64)
        if window.ndim != 1 or window.shape[0] < 2:
            raise TrainingError("training window must hold at least 2 values")
        if not np.all(np.isfinite(window)):
            raise DataError("training window contains non-finite values")
        self._fit_scaler(window)
        xs = self._scale(window)
        inputs = np.ascontiguousarray(xs[:-1])
        targets = np.ascontiguousarray(xs[1:])

        params = [self.wi, self.wr, self.b, self.wo]
        m = [np.zeros_like(p) for p in params]
        v = [np.zeros_like(p) for p in params]
        m_bo = 0.0
        v_bo = 0.0
        lr = self.hp.learning_rate
        prev_loss = math.inf
        stalled = 0
        loss = math.inf
        for epoch in range(1, self.hp.max_epochs + 1):
            y, hs, cs, gi, gf, gg, go, ct = _forward(
                self.wi, self.wr, self.b, self.wo, self.bo, inputs
            )
            loss = float(np.mean((y - targets) ** 2))
            grads = _backward(
                self.wi, self.wr, self.wo, inputs, targets, y, hs, cs,
                gi, gf, gg, go, ct,
            )
            bc1 = 1.0 - ADAM_BETA1**epoch
            bc2 = 1.0 - ADAM_BETA2**epoch
            for p, mk, vk, g in zip(params, m, v, grads[:4]):
                mk *= ADAM_BETA1
                mk += (1.0 - ADAM_BETA1) * g
                vk *= ADAM_BETA2
                vk += (1.0 - ADAM_BETA2) * g * g
                p -= lr * (mk / bc1) / (np.sqrt(vk / bc2) + ADAM_EPS)
            g_bo = grads[4]
            m_bo = ADAM_BETA1 * m_bo + (1.0 - ADAM_BETA1) * g_bo
            v_bo = ADAM_BETA2 * v_bo + (1.0 - ADAM_BETA2) * g_bo * g_bo
            self.bo -= lr * (m_bo / bc1) / (math.sqrt(v_bo / bc2) + ADAM_EPS)

            if prev_loss - loss < EARLY_STOP_TOL:
                stalled += 1
                if stalled >= EARLY_STOP_PATIENCE:
                    break
            else:
                stalled = 0
            prev_loss = loss

        if not all(np.all(np.isfinite(p)) for p in params) or not math.isfinite(
            self.bo
        ):
            raise TrainingError("training produced non-finite weights")
        self.window_size = window.shape[0]
        self.last_loss = loss
        return self

    def predict_next(self, window) -> float:
        """Predict the value following `window`. Pure: no state mutation."""
        if not self.trained:
            raise UsageError("predict_next on an untrained model")
        window = np.asarray(window, dtype=np.float64)
        if window.ndim != 1 or window.shape[0] != self.window_size:
            raise UsageError(
                f"window length {window.shape[0]} != trained size {self.window_size}"
            )
        if not np.all(np.isfinite(window)):
            raise DataError("prediction window contains non-finite values")
        xs = np.ascontiguousarray(self._scale(window))
        y = _predict_last(self.wi, self.wr, self.b, self.wo, self.bo, xs)
        return self._inverse(float(y))

    # --- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": SERIAL_VERSION,
            "hp": {
                "learning_rate": self.hp.learning_rate,
                "max_epochs": self.hp.max_epochs,
                "hidden_layers": self.hp.hidden_layers,
                "hidden_units": self.hp.hidden_units,
                "activation": self.hp.activation,
                "seed": self.hp.seed,
            },
            "wi": self.wi.tolist(),
            "wr": self.wr.tolist(),
            "b": self.b.tolist(),
            "wo": self.wo.tolist(),
            "bo": self.bo,
            "mid": self.mid,
            "half": self.half,
            "window_size": self.window_size,
            "last_loss": self.last_loss,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionModel":
        if d.get("version") != SERIAL_VERSION:
            raise UsageError(f"unsupported model format version {d.get('version')}")
        model = cls(HyperParams(**d["hp"]))
        model.wi = np.array(d["wi"], dtype=np.float64)
        model.wr = np.array(d["wr"], dtype=np.float64)
        model.b = np.array(d["b"], dtype=np.float64)
        model.wo = np.array(d["wo"], dtype=np.float64)
        model.bo = float(d["bo"])
        model.mid = float(d["mid"])
        model.half = float(d["half"])
        model.window_size = d["window_size"]
        model.last_loss = d["last_loss"]
        return model


def init_model(hp: HyperParams) -> PredictionModel:
    return PredictionModel(hp)


def train(model: PredictionModel, window, hp: HyperParams | None = None) -> PredictionModel:
    if hp is not None and hp != model.hp:
        model = PredictionModel(hp)
    return model.fit(window)


def predict_next(model: PredictionModel, window) -> float:
    return model.predict_next(window)

"""Stacked LSTM regressor built on numpy.

Two recurrent layers feed a ReLU dense layer and a linear output neuron.
Gradients come from exact backpropagation through the unrolled sequence;
training is full-batch Adam. Everything is deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit as sigmoid

from .base import BaseEstimator
from .exceptions import ShapeMismatch
from .preprocessing import ScalerParams, make_windows, minmax_apply, minmax_fit, minmax_invert
from .validation import as_float_1d
from .weeks import Disease

GATES = ("f", "i", "c", "o")


@dataclass
class LstmLayerWeights:
    """Gate weights over the concatenated [h_{t-1}, x_t] input.

    Each W_* has shape (units, units + input_dim); biases have shape (units,).
    """

    W_f: np.ndarray
    W_i: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray

    @property
    def units(self) -> int:
        return self.W_f.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_f.shape[1] - self.units

    def __post_init__(self):
        shape = self.W_f.shape
        for g in GATES:
            if getattr(self, f"W_{g}").shape != shape:
                raise ShapeMismatch("gate weight matrices must share one shape")
            if getattr(self, f"b_{g}").shape != (shape[0],):
                raise ShapeMismatch("gate bias length must equal units")


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, units: int, batch: int | None = None) -> "LstmState":
        shape = (units,) if batch is None else (batch, units)
        return cls(h=np.zeros(shape), c=np.zeros(shape))


@dataclass
class GateCache:
    """Forward-pass intermediates one BPTT step needs."""

    inputs: np.ndarray  # [h_{t-1}, x_t]
    f: np.ndarray
    i: np.ndarray
    c_tilde: np.ndarray
    o: np.ndarray
    c_prev: np.ndarray
    tanh_c: np.ndarray


@dataclass(frozen=True)
class NetworkConfig:
    layer_units: tuple[int, int] = (64, 32)
    dense_units: int = 32
    window: int = 5
    seed: int = 0

    def __post_init__(self):
        if any(u <= 0 for u in self.layer_units) or self.dense_units <= 0:
            raise ValueError("unit counts must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")


def network_config_for(disease: Disease, seed: int = 0) -> NetworkConfig:
    """Per-disease defaults: malaria gets the wider (128, 64) network."""
    if disease == Disease.MALARIA:
        return NetworkConfig(layer_units=(128, 64), dense_units=64, seed=seed)
    return NetworkConfig(layer_units=(64, 32), dense_units=32, seed=seed)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


class LstmNetwork:
    """Weight container for the two recurrent layers plus the dense head."""

    def __init__(
        self,
        config: NetworkConfig,
        layers: list[LstmLayerWeights],
        dense_W: np.ndarray,
        dense_b: np.ndarray,
        head_w: np.ndarray,
        head_b: np.ndarray,
        scaler: ScalerParams | None = None,
    ):
        self.config = config
        self.layers = layers
        self.dense_W = dense_W
        self.dense_b = dense_b
        self.head_w = head_w
        self.head_b = head_b
        self.scaler = scaler

    def parameters(self) -> dict[str, np.ndarray]:
        """Live tensor references, keyed by the names the serializer uses."""
        params: dict[str, np.ndarray] = {}
        for idx, layer in enumerate(self.layers):
            for g in GATES:
                params[f"lstm{idx}.W_{g}"] = getattr(layer, f"W_{g}")
                params[f"lstm{idx}.b_{g}"] = getattr(layer, f"b_{g}")
        params["dense.W"] = self.dense_W
        params["dense.b"] = self.dense_b
        params["head.w"] = self.head_w
        params["head.b"] = self.head_b
        return params

    def set_parameters(self, params: dict[str, np.ndarray]) -> None:
        for idx, layer in enumerate(self.layers):
            for g in GATES:
                setattr(layer, f"W_{g}", params[f"lstm{idx}.W_{g}"])
                setattr(layer, f"b_{g}", params[f"lstm{idx}.b_{g}"])
        self.dense_W = params["dense.W"]
        self.dense_b = params["dense.b"]
        self.head_w = params["head.w"]
        self.head_b = params["head.b"]


def init_network(config: NetworkConfig, scaler: ScalerParams | None = None) -> LstmNetwork:
    """Uniform weights in [-s, s] with s = 1/sqrt(fan_in); zero biases.

    Draw order is fixed (layer by layer, gates f,i,c,o, then dense, then
    head) so a seed fully determines the network.
    """
    rng = np.random.default_rng(config.seed)
    layers = []
    input_dim = 1
    for units in config.layer_units:
        fan_in = units + input_dim
        s = 1.0 / np.sqrt(fan_in)
        tensors = {}
        for g in GATES:
            tensors[f"W_{g}"] = rng.uniform(-s, s, size=(units, fan_in))
            tensors[f"b_{g}"] = np.zeros(units)
        layers.append(LstmLayerWeights(**tensors))
        input_dim = units
    s = 1.0 / np.sqrt(config.layer_units[1])
    dense_W = rng.uniform(-s, s, size=(config.dense_units, config.layer_units[1]))
    dense_b = np.zeros(config.dense_units)
    s = 1.0 / np.sqrt(config.dense_units)
    head_w = rng.uniform(-s, s, size=config.dense_units)
    head_b = np.zeros(1)
    return LstmNetwork(config, layers, dense_W, dense_b, head_w, head_b, scaler)


def lstm_cell_step(weights: LstmLayerWeights, x_t: np.ndarray, prev: LstmState) -> tuple[LstmState, GateCache]:
    """One gate update.

    f = sigmoid(W_f [h, x] + b_f) decides what to drop from the cell;
    i and the tanh candidate write new content; C_t = f*C + i*c_tilde;
    h_t = o * tanh(C_t). Accepts a single vector or a batch (last axis is
    the feature axis).
    """
    x_t = np.asarray(x_t, dtype=float)
    if x_t.shape[-1] != weights.input_dim:
        raise ShapeMismatch(f"input dim {x_t.shape[-1]} != expected {weights.input_dim}")
    if prev.h.shape[-1] != weights.units or prev.c.shape[-1] != weights.units:
        raise ShapeMismatch("state width does not match layer units")
    inputs = np.concatenate([prev.h, x_t], axis=-1)
    f = sigmoid(inputs @ weights.W_f.T + weights.b_f)
    i = sigmoid(inputs @ weights.W_i.T + weights.b_i)
    c_tilde = np.tanh(inputs @ weights.W_c.T + weights.b_c)
    c = f * prev.c + i * c_tilde
    o = sigmoid(inputs @ weights.W_o.T + weights.b_o)
    tanh_c = np.tanh(c)
    h = o * tanh_c
    cache = GateCache(inputs=inputs, f=f, i=i, c_tilde=c_tilde, o=o, c_prev=prev.c, tanh_c=tanh_c)
    return LstmState(h=h, c=c), cache


@dataclass
class ForwardCache:
    layer_caches: list[list[GateCache]]
    h_final: np.ndarray
    dense_pre: np.ndarray
    dense_out: np.ndarray


def _forward_batch(net: LstmNetwork, X: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    n, window = X.shape
    if window != net.config.window:
        raise ShapeMismatch(f"sequence length {window} != window {net.config.window}")
    layer_caches: list[list[GateCache]] = []
    seq = [X[:, t : t + 1] for t in range(window)]
    for layer in net.layers:
        state = LstmState.zeros(layer.units, batch=n)
        caches = []
        outputs = []
        for x_t in seq:
            state, cache = lstm_cell_step(layer, x_t, state)
            caches.append(cache)
            outputs.append(state.h)
        layer_caches.append(caches)
        seq = outputs
    h_final = seq[-1]
    dense_pre = h_final @ net.dense_W.T + net.dense_b
    dense_out = np.maximum(dense_pre, 0.0)
    preds = dense_out @ net.head_w + net.head_b[0]
    return preds, ForwardCache(layer_caches, h_final, dense_pre, dense_out)


def network_forward(net: LstmNetwork, sequence) -> tuple[float, ForwardCache]:
    """Predict one step from a scaled window; states start at zero."""
    seq = as_float_1d(sequence, name="sequence")
    preds, cache = _forward_batch(net, seq.reshape(1, -1))
    return float(preds[0]), cache


def _layer_backward(
    layer: LstmLayerWeights, caches: list[GateCache], dh_ext: list[np.ndarray]
) -> tuple[dict[str, np.ndarray], list[np.ndarray]]:
    """Walk the unrolled steps backwards, accumulating gate-weight gradients.

    dh_ext[t] is the loss gradient injected at h_t from above (the next layer
    or the dense head); returns gradients plus d/d(input) per step for the
    layer below.
    """
    units = layer.units
    grads = {f"W_{g}": np.zeros_like(getattr(layer, f"W_{g}")) for g in GATES}
    grads.update({f"b_{g}": np.zeros_like(getattr(layer, f"b_{g}")) for g in GATES})
    dx_per_t: list[np.ndarray] = [np.empty(0)] * len(caches)
    dh_next = np.zeros_like(dh_ext[-1])
    dc_next = np.zeros_like(dh_ext[-1])
    for t in range(len(caches) - 1, -1, -1):
        cc = caches[t]
        dh = dh_ext[t] + dh_next
        do = dh * cc.tanh_c
        dz_o = do * cc.o * (1.0 - cc.o)
        dc = dc_next + dh * cc.o * (1.0 - cc.tanh_c**2)
        df = dc * cc.c_prev
        dz_f = df * cc.f * (1.0 - cc.f)
        di = dc * cc.c_tilde
        dz_i = di * cc.i * (1.0 - cc.i)
        dct = dc * cc.i
        dz_c = dct * (1.0 - cc.c_tilde**2)
        dconcat = np.zeros_like(cc.inputs)
        for g, dz in (("f", dz_f), ("i", dz_i), ("c", dz_c), ("o", dz_o)):
            grads[f"W_{g}"] += dz.T @ cc.inputs
            grads[f"b_{g}"] += dz.sum(axis=0)
            dconcat += dz @ getattr(layer, f"W_{g}")
        dh_next = dconcat[:, :units]
        dx_per_t[t] = dconcat[:, units:]
        dc_next = dc * cc.f
    return grads, dx_per_t


def _normalize_batch(batch) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(batch, tuple) and len(batch) == 2 and isinstance(batch[0], np.ndarray):
        X, y = batch
        return np.asarray(X, dtype=float), np.asarray(y, dtype=float)
    pairs = list(batch)
    if not pairs:
        raise ShapeMismatch("batch is empty")
    X = np.asarray([p[0] for p in pairs], dtype=float)
    y = np.asarray([p[1] for p in pairs], dtype=float)
    return X, y


def _loss_and_grads(net: LstmNetwork, X: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    preds, cache = _forward_batch(net, X)
    n = len(y)
    err = preds - y
    loss = float(err @ err / n)
    dpred = 2.0 * err / n

    grads: dict[str, np.ndarray] = {}
    grads["head.w"] = cache.dense_out.T @ dpred
    grads["head.b"] = np.array([dpred.sum()])
    ddense_out = np.outer(dpred, net.head_w)
    dz_dense = ddense_out * (cache.dense_pre > 0)
    grads["dense.W"] = dz_dense.T @ cache.h_final
    grads["dense.b"] = dz_dense.sum(axis=0)
    dh_final = dz_dense @ net.dense_W

    window = X.shape[1]
    # top layer gets loss gradient only at the last step
    dh_ext = [np.zeros_like(dh_final) for _ in range(window)]
    dh_ext[-1] = dh_final
    for idx in range(len(net.layers) - 1, -1, -1):
        layer_grads, dx = _layer_backward(net.layers[idx], cache.layer_caches[idx], dh_ext)
        for name, g in layer_grads.items():
            grads[f"lstm{idx}.{name}"] = g
        dh_ext = dx
    return loss, grads


def compute_gradients(net: LstmNetwork, batch) -> dict[str, np.ndarray]:
    """Exact MSE gradients for every tensor, via BPTT over the unrolled window."""
    X, y = _normalize_batch(batch)
    _, grads = _loss_and_grads(net, X, y)
    return grads


def mse_loss(net: LstmNetwork, batch) -> float:
    X, y = _normalize_batch(batch)
    preds, _ = _forward_batch(net, X)
    err = preds - y
    return float(err @ err / len(y))


@dataclass
class AdamState:
    """First/second moment accumulators plus the step hyperparameters."""

    learning_rate: float
    beta1: float
    beta2: float
    eps: float
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray], cfg: TrainConfig) -> "AdamState":
        return cls(
            learning_rate=cfg.learning_rate,
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            eps=cfg.eps,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


def adam_step(
    opt_state: AdamState, weights: dict[str, np.ndarray], grads: dict[str, np.ndarray], t: int
) -> tuple[dict[str, np.ndarray], AdamState]:
    """Standard Adam with bias correction; functional, returns new tensors."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if set(weights) != set(grads):
        raise ShapeMismatch("weights and grads must have the same keys")
    new_w: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    b1, b2 = opt_state.beta1, opt_state.beta2
    for key, w in weights.items():
        g = grads[key]
        if g.shape != w.shape:
            raise ShapeMismatch(f"gradient shape {g.shape} != weight shape {w.shape} for {key}")
        m = b1 * opt_state.m[key] + (1.0 - b1) * g
        v = b2 * opt_state.v[key] + (1.0 - b2) * g**2
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        new_w[key] = w - opt_state.learning_rate * m_hat / (np.sqrt(v_hat) + opt_state.eps)
        new_m[key] = m
        new_v[key] = v
    return new_w, replace(opt_state, m=new_m, v=new_v)


def train(net: LstmNetwork, windows, cfg: TrainConfig = TrainConfig()) -> tuple[LstmNetwork, list[float]]:
    """Full-batch Adam for cfg.epochs; loss_history holds the MSE each epoch
    was trained on (evaluated before that epoch's update)."""
    X, y = _normalize_batch(windows)
    state = AdamState.for_params(net.parameters(), cfg)
    history: list[float] = []
    for epoch in range(1, cfg.epochs + 1):
        loss, grads = _loss_and_grads(net, X, y)
        new_params, state = adam_step(state, net.parameters(), grads, epoch)
        net.set_parameters(new_params)
        history.append(loss)
    return net, history


def forecast_recursive(net: LstmNetwork, scaler: ScalerParams, recent, horizon: int = 5) -> list[float]:
    """Iterated one-step forecasting over a rolling window.

    ``recent`` holds the last ``window`` unscaled observations. Each scaled
    prediction is appended to the window as-is; inversion to the original
    scale and the >= 0 clamp happen at the end.
    """
    values = as_float_1d(recent, name="recent")
    if len(values) != net.config.window:
        raise ShapeMismatch(f"recent must hold exactly {net.config.window} values, got {len(values)}")
    window = list(minmax_apply(scaler, values))
    preds_scaled: list[float] = []
    for _ in range(horizon):
        pred, _ = network_forward(net, window)
        preds_scaled.append(pred)
        window = window[1:] + [pred]
    return [max(0.0, v) for v in minmax_invert(scaler, preds_scaled)]


def lstm_one_step_predictions(net: LstmNetwork, scaler: ScalerParams, values, n_eval: int) -> list[float]:
    """One-step-ahead predictions for the last n_eval points, unscaled.

    Windows are built from actual history, so this measures pure one-step
    skill (the held-out evaluation protocol).
    """
    arr = as_float_1d(values, name="values")
    scaled = np.asarray(minmax_apply(scaler, arr))
    X, _ = make_windows(scaled, net.config.window)
    if n_eval > len(X):
        raise ShapeMismatch(f"asked for {n_eval} predictions but only {len(X)} windows exist")
    preds, _ = _forward_batch(net, X[-n_eval:])
    return list(minmax_invert(scaler, preds))


# -- serialization -----------------------------------------------------------

FORMAT_TAG = "lstm-network/1"


def dumps_lstm(net: LstmNetwork) -> str:
    """Versioned text dump: config header then row-major tensors.

    Floats are written with repr, which round-trips bit-exactly.
    """
    lines = [
        f"format={FORMAT_TAG}",
        "layer_units=" + ",".join(str(u) for u in net.config.layer_units),
        f"dense_units={net.config.dense_units}",
        f"window={net.config.window}",
        f"seed={net.config.seed}",
    ]
    if net.scaler is not None:
        lines.append(f"scaler_min={net.scaler.min_value!r}")
        lines.append(f"scaler_max={net.scaler.max_value!r}")
    for name, tensor in net.parameters().items():
        mat = np.atleast_2d(tensor)
        lines.append(f"tensor {name} {mat.shape[0]} {mat.shape[1]}")
        for row in mat:
            lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def loads_lstm(text: str) -> LstmNetwork:
    lines = text.strip().splitlines()
    header: dict[str, str] = {}
    idx = 0
    while idx < len(lines) and not lines[idx].startswith("tensor "):
        key, _, value = lines[idx].partition("=")
        header[key.strip()] = value.strip()
        idx += 1
    if header.get("format") != FORMAT_TAG:
        raise ValueError(f"not an {FORMAT_TAG} record")
    config = NetworkConfig(
        layer_units=tuple(int(u) for u in header["layer_units"].split(",")),
        dense_units=int(header["dense_units"]),
        window=int(header["window"]),
        seed=int(header["seed"]),
    )
    scaler = None
    if "scaler_min" in header:
        scaler = ScalerParams(float(header["scaler_min"]), float(header["scaler_max"]))

    tensors: dict[str, np.ndarray] = {}
    while idx < len(lines):
        _, name, rows_s, cols_s = lines[idx].split()
        rows, cols = int(rows_s), int(cols_s)
        data = [
            [float(v) for v in lines[idx + 1 + r].split()]
            for r in range(rows)
        ]
        tensors[name] = np.asarray(data)
        idx += 1 + rows

    net = init_network(config, scaler)
    params = {}
    for name, current in net.parameters().items():
        stored = tensors[name]
        params[name] = stored.reshape(current.shape)
    net.set_parameters(params)
    return net


def save_lstm(net: LstmNetwork, path) -> None:
    from pathlib import Path

    Path(path).write_text(dumps_lstm(net), encoding="utf-8")


def load_lstm(path) -> LstmNetwork:
    from pathlib import Path

    return loads_lstm(Path(path).read_text(encoding="utf-8"))


class LstmForecaster(BaseEstimator):
    """Estimator facade: scales the series, trains the network, forecasts.

    The scaler is fit on exactly the values passed to ``fit`` (the training
    segment), never on held-out data.
    """

    def __init__(
        self,
        layer_units: tuple[int, int] = (64, 32),
        dense_units: int = 32,
        window: int = 5,
        seed: int = 0,
        epochs: int = 100,
        learning_rate: float = 0.001,
    ):
        self.layer_units = layer_units
        self.dense_units = dense_units
        self.window = window
        self.seed = seed
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.net_: LstmNetwork | None = None
        self.loss_history_: list[float] | None = None
        self.recent_: np.ndarray | None = None

    def fit(self, y, X=None) -> "LstmForecaster":
        values = as_float_1d(y, name="y")
        scaler = minmax_fit(values)
        scaled = np.asarray(minmax_apply(scaler, values))
        windows = make_windows(scaled, self.window)
        config = NetworkConfig(
            layer_units=tuple(self.layer_units),
            dense_units=self.dense_units,
            window=self.window,
            seed=self.seed,
        )
        net = init_network(config, scaler)
        cfg = TrainConfig(epochs=self.epochs, learning_rate=self.learning_rate)
        self.net_, self.loss_history_ = train(net, windows, cfg)
        self.recent_ = values[-self.window :]
        return self

    def predict(self, horizon: int = 5) -> list[float]:
        self._check_fitted("net_")
        return forecast_recursive(self.net_, self.net_.scaler, self.recent_, horizon)

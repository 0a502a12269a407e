"""Graph convolutional regressor with a logistic head, trained from scratch.

Architecture: K propagation layers followed by a sigmoid readout on item rows,

    H[l+1] = ELU(N @ H[l] @ W[l])          l = 0 .. K-1
    yhat_i = sigmoid(w_out . H[K][n+i] + b_out)

where ``N`` is the row-normalized operator from :mod:`peergrade.graph`
(users in rows 0..n-1, items in rows n..n+m-1).  Training minimizes the mean
square error over the labeled items with full-batch Adam; gradients are
computed by hand-written reverse-mode differentiation.  Everything is 64-bit
and deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit as sigmoid

from .errors import TrainingDivergedError, ValidationError
from .graph import Dataset, GroundTruth, PropagationMatrix, propagation_matrix

FEATURE_KINDS = ("ones", "one-hot")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters: 2 layers of width 64, 800 epochs of Adam at lr 0.02."""

    layers: int = 2
    dim: int = 64
    epochs: int = 800
    learning_rate: float = 0.02
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    features: str = "ones"

    def __post_init__(self):
        if self.layers < 1 or self.dim < 1 or self.epochs < 1:
            raise ValidationError("layers, dim and epochs must all be >= 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.features not in FEATURE_KINDS:
            raise ValidationError(f"features must be one of {FEATURE_KINDS}")


@dataclass(frozen=True)
class ModelParams:
    """Layer weights plus the logistic head.  Treat as immutable once trained.

    The same container carries gradients (one array per parameter tensor).
    """

    W: tuple[np.ndarray, ...]
    w_out: np.ndarray
    b_out: float

    @property
    def layers(self) -> int:
        return len(self.W)

    @property
    def dim(self) -> int:
        return self.W[-1].shape[1]


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per parameter tensor."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0


@dataclass
class ForwardCache:
    """Per-layer intermediates kept for backpropagation."""

    h: list[np.ndarray]        # H[0] .. H[K]
    z: list[np.ndarray]        # pre-activations Z[1] .. Z[K]
    propagated: list[np.ndarray]  # N @ H[l] for l = 0 .. K-1
    logits: np.ndarray
    predictions: np.ndarray
    params_token: int
    n: int
    m: int


def initial_features(kind: str, prop: PropagationMatrix) -> np.ndarray:
    """Default node features: a single all-ones column (or one-hot rows)."""
    size = prop.size
    if kind == "ones":
        return np.ones((size, 1))
    if kind == "one-hot":
        return np.eye(size)
    raise ValidationError(f"unknown feature kind {kind!r}")


def init_params(cfg: TrainConfig, d0: int, rng: np.random.Generator) -> ModelParams:
    """Uniform fan-based initialization; head bias starts at zero."""
    shapes = [(d0, cfg.dim)] + [(cfg.dim, cfg.dim)] * (cfg.layers - 1)
    W = []
    for fan_in, fan_out in shapes:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        W.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
    head_bound = np.sqrt(6.0 / (cfg.dim + 1))
    w_out = rng.uniform(-head_bound, head_bound, size=cfg.dim)
    return ModelParams(W=tuple(W), w_out=w_out, b_out=0.0)


def _elu(x: np.ndarray) -> np.ndarray:
    out = x.copy()
    neg = x <= 0
    out[neg] = np.expm1(x[neg])
    return out


def _elu_grad(x: np.ndarray) -> np.ndarray:
    out = np.ones_like(x)
    neg = x <= 0
    out[neg] = np.exp(x[neg])
    return out


def forward(
    params: ModelParams, prop: PropagationMatrix, h0: np.ndarray
) -> tuple[np.ndarray, ForwardCache]:
    """Run the network; returns predictions for every item plus the cache."""
    h0 = np.asarray(h0, dtype=np.float64)
    if h0.ndim != 2 or h0.shape[0] != prop.size:
        raise ValidationError(
            f"feature matrix has shape {h0.shape}, expected ({prop.size}, d0)"
        )
    if params.W[0].shape[0] != h0.shape[1]:
        raise ValidationError(
            f"W[0] expects {params.W[0].shape[0]} input features, h0 has {h0.shape[1]}"
        )

    h = [h0]
    z: list[np.ndarray] = []
    propagated: list[np.ndarray] = []
    for W in params.W:
        nh = prop.N @ h[-1]
        propagated.append(nh)
        z.append(nh @ W)
        h.append(_elu(z[-1]))

    item_emb = h[-1][prop.n:]
    logits = item_emb @ params.w_out + params.b_out
    preds = sigmoid(logits)
    cache = ForwardCache(
        h=h, z=z, propagated=propagated, logits=logits, predictions=preds,
        params_token=id(params), n=prop.n, m=prop.m,
    )
    return preds, cache


def mse_loss(predictions: np.ndarray, truth: GroundTruth, train_ids: Sequence[int]) -> float:
    """Mean square error over the training items.

    ``predictions`` covers all items (output of :func:`forward`).
    """
    ids = np.asarray(train_ids, dtype=np.int64)
    if ids.size == 0:
        raise ValidationError("training set is empty")
    if not np.all(truth.mask[ids]):
        raise ValidationError("every training item needs a known ground-truth value")
    err = truth.v[ids] - predictions[ids]
    return float(np.mean(err * err))


def backward(
    params: ModelParams,
    prop: PropagationMatrix,
    cache: ForwardCache,
    truth: GroundTruth,
    train_ids: Sequence[int],
) -> ModelParams:
    """Exact gradients of the training loss w.r.t. every parameter."""
    if cache.params_token != id(params) or len(cache.z) != params.layers:
        raise ValidationError("forward cache does not match these parameters")
    ids = np.asarray(train_ids, dtype=np.int64)
    if ids.size == 0:
        raise ValidationError("training set is empty")

    preds = cache.predictions
    d_pred = np.zeros(cache.m)
    d_pred[ids] = 2.0 * (preds[ids] - truth.v[ids]) / ids.size
    d_logit = d_pred * preds * (1.0 - preds)

    item_emb = cache.h[-1][cache.n:]
    g_w_out = item_emb.T @ d_logit
    g_b_out = float(d_logit.sum())

    d_h = np.zeros_like(cache.h[-1])
    d_h[cache.n:] = np.outer(d_logit, params.w_out)

    NT = prop.N.T.tocsr()
    g_W: list[np.ndarray] = [np.empty(0)] * params.layers
    for layer in range(params.layers - 1, -1, -1):
        d_z = d_h * _elu_grad(cache.z[layer])
        g_W[layer] = cache.propagated[layer].T @ d_z
        if layer > 0:
            d_h = NT @ (d_z @ params.W[layer].T)

    return ModelParams(W=tuple(g_W), w_out=g_w_out, b_out=g_b_out)


def _param_arrays(params: ModelParams) -> list[np.ndarray]:
    return [*params.W, params.w_out, np.array([params.b_out])]


def _params_from_arrays(arrays: list[np.ndarray], layers: int) -> ModelParams:
    return ModelParams(
        W=tuple(arrays[:layers]), w_out=arrays[layers], b_out=float(arrays[layers + 1][0])
    )


def init_adam_state(params: ModelParams) -> AdamState:
    arrays = _param_arrays(params)
    return AdamState(
        m=[np.zeros_like(a) for a in arrays],
        v=[np.zeros_like(a) for a in arrays],
        t=0,
    )


def adam_step(
    params: ModelParams, grads: ModelParams, state: AdamState, cfg: TrainConfig
) -> tuple[ModelParams, AdamState]:
    """One bias-corrected Adam update; returns fresh params and state."""
    p_arrays = _param_arrays(params)
    g_arrays = _param_arrays(grads)
    t = state.t + 1
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(p_arrays, g_arrays, state.m, state.v):
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * (g * g)
        m_hat = m / (1.0 - cfg.beta1 ** t)
        v_hat = v / (1.0 - cfg.beta2 ** t)
        new_p.append(p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon))
        new_m.append(m)
        new_v.append(v)
    return _params_from_arrays(new_p, params.layers), AdamState(m=new_m, v=new_v, t=t)


def train(
    dataset: Dataset,
    cfg: TrainConfig,
    prop: Optional[PropagationMatrix] = None,
) -> tuple[ModelParams, list[float]]:
    """Full-batch training; returns last-epoch parameters and per-epoch loss.

    Each epoch runs one forward pass over the whole graph, computes the loss
    on the train split only, and takes one Adam step.  There is no early
    stopping and no validation split.
    """
    if dataset.split is None or not dataset.split.train:
        raise ValidationError("dataset has no train split")
    train_ids = dataset.split.train
    if prop is None:
        prop = propagation_matrix(dataset.graph)
    h0 = initial_features(cfg.features, prop)
    rng = np.random.default_rng(cfg.seed)
    params = init_params(cfg, h0.shape[1], rng)
    state = init_adam_state(params)

    history: list[float] = []
    for epoch in range(cfg.epochs):
        preds, cache = forward(params, prop, h0)
        loss = mse_loss(preds, dataset.truth, train_ids)
        if not np.isfinite(loss):
            raise TrainingDivergedError(epoch, loss)
        history.append(loss)
        grads = backward(params, prop, cache, dataset.truth, train_ids)
        params, state = adam_step(params, grads, state, cfg)
    return params, history


def predict(
    params: ModelParams,
    prop: PropagationMatrix,
    h0: np.ndarray,
    item_ids: Sequence[int],
) -> np.ndarray:
    """Predicted valuations for the requested items, in request order."""
    ids = np.asarray(item_ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= prop.m):
        bad = ids[(ids < 0) | (ids >= prop.m)][0]
        raise ValidationError(f"unknown item index {bad} (m={prop.m})")
    preds, _ = forward(params, prop, h0)
    return preds[ids]


# --- checkpoint serialization ------------------------------------------------

def train_config_dict(cfg: TrainConfig) -> dict:
    return {
        "layers": cfg.layers, "dim": cfg.dim, "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate, "beta1": cfg.beta1,
        "beta2": cfg.beta2, "epsilon": cfg.epsilon,
        "seed": cfg.seed, "features": cfg.features,
    }


def checkpoint_document(params: ModelParams, cfg: TrainConfig) -> dict:
    """JSON-ready checkpoint: config echo plus row-major flattened weights."""
    return {
        "schema_version": 1,
        "kind": "model-checkpoint",
        "train_config": train_config_dict(cfg),
        "d0": int(params.W[0].shape[0]),
        "weights": {
            "W": [w.reshape(-1).tolist() for w in params.W],
            "w_out": params.w_out.tolist(),
            "b_out": params.b_out,
        },
    }


def save_model(params: ModelParams, cfg: TrainConfig, path) -> None:
    from .io import canonical_json  # local import to avoid a cycle

    Path(path).write_text(canonical_json(checkpoint_document(params, cfg)), encoding="utf-8")


def load_model(path) -> tuple[ModelParams, TrainConfig]:
    from .io import parse_train_config, read_json_document

    doc = read_json_document(path, expected_kind="model-checkpoint")
    allowed = {"schema_version", "kind", "train_config", "d0", "weights"}
    unknown = set(doc) - allowed
    if unknown:
        raise ValidationError(f"/: unknown key {sorted(unknown)[0]!r} in checkpoint")
    cfg = parse_train_config(doc.get("train_config", {}), where="/train_config")
    d0 = int(doc["d0"])
    weights = doc["weights"]
    shapes = [(d0, cfg.dim)] + [(cfg.dim, cfg.dim)] * (cfg.layers - 1)
    flat = weights["W"]
    if len(flat) != len(shapes):
        raise ValidationError(
            f"checkpoint has {len(flat)} weight matrices, config expects {len(shapes)}"
        )
    W = []
    for values, shape in zip(flat, shapes):
        arr = np.asarray(values, dtype=np.float64)
        if arr.size != shape[0] * shape[1]:
            raise ValidationError(f"weight matrix of size {arr.size} does not fit shape {shape}")
        W.append(arr.reshape(shape))
    w_out = np.asarray(weights["w_out"], dtype=np.float64)
    if w_out.shape != (cfg.dim,):
        raise ValidationError(f"head weight length {w_out.shape[0]} does not match dim {cfg.dim}")
    params = ModelParams(W=tuple(W), w_out=w_out, b_out=float(weights["b_out"]))
    if not all(np.all(np.isfinite(w)) for w in _param_arrays(params)):
        raise ValidationError("checkpoint contains non-finite weights")
    return params, cfg

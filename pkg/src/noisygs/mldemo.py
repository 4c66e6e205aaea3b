"""Small ReLU network training as a nonsmooth noisy-oracle testbed.

The objective is binary cross entropy of a one-hidden-layer ReLU network
over a synthetic two-Gaussian dataset. ReLU kinks make it nonsmooth, and
mini-batching makes the oracle inexact in two distinct ways worth
contrasting: freshly resampled fixed-size batches give errors that are
neither deterministic nor bounded, while an adaptive scheme that grows a
point-keyed batch until its error against the full-data values is inside a
prescribed bound behaves exactly like a deterministic bounded-error oracle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .oracle import OracleHandle, TruthAccess, _canonical_bytes, keyed_seed


@dataclass(frozen=True)
class Dataset:
    """Feature matrix of shape (N, p) with 0/1 labels of shape (N,).

    standardized promises zero-mean unit-variance feature columns and is
    checked on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValueError("features must be (N, p) and labels (N,) with matching N")
        if X.shape[0] == 0 or X.shape[1] == 0:
            raise ValueError("dataset must be nonempty")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError("labels must be 0 or 1")
        if self.standardized:
            mu = X.mean(axis=0)
            var = X.var(axis=0)
            if np.max(np.abs(mu)) > 1e-10 or np.max(np.abs(var - 1.0)) > 1e-8:
                raise ValueError("standardized data must have mean 0, variance 1 columns")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)


def synth_dataset(num_points: int, num_features: int, separation: float,
                  seed: int = 0) -> Dataset:
    """Two standardized Gaussian clouds separated along the first feature.

    Half the points (rounded down) carry label 1 and are shifted by
    +separation/2 on feature 0, the rest by -separation/2. Rows are
    shuffled and features standardized to zero mean, unit variance.
    """
    if num_points < 2 or num_features < 1:
        raise ValueError("need at least 2 points and 1 feature")
    rng = np.random.default_rng(seed)
    y = np.zeros(num_points)
    y[: num_points // 2] = 1.0
    X = rng.standard_normal((num_points, num_features))
    X[:, 0] += np.where(y == 1.0, 0.5 * separation, -0.5 * separation)
    perm = rng.permutation(num_points)
    X, y = X[perm], y[perm]
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0.0] = 1.0
    return Dataset(features=(X - mu) / sd, labels=y, standardized=True)


def save_dataset_csv(data: Dataset, path) -> None:
    """Write rows as f1..fp,label with a header, UTF-8, LF endings."""
    p = data.features.shape[1]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{i + 1}" for i in range(p)] + ["label"])
        for row, lab in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [str(int(lab))])


def load_dataset_csv(path) -> Dataset:
    """Read a dataset written by save_dataset_csv. Never marks standardized."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "label":
            raise ValueError("expected a header ending in 'label'")
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != len(header):
        raise ValueError("malformed dataset rows")
    return Dataset(features=arr[:, :-1], labels=arr[:, -1])


def weight_count(num_features: int, hidden: int = 10) -> int:
    """Flat parameter count: first layer, its bias, output layer, its bias."""
    return hidden * num_features + hidden + hidden + 1


def init_weights(num_features: int, hidden: int = 10, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.5, 0.5, size=weight_count(num_features, hidden))


@dataclass(frozen=True)
class MlpParams:
    """Structured view of the flat weight vector."""

    hidden_weights: np.ndarray
    hidden_bias: np.ndarray
    out_weights: np.ndarray
    out_bias: float

    def __post_init__(self):
        W1 = np.asarray(self.hidden_weights, dtype=float)
        b1 = np.asarray(self.hidden_bias, dtype=float)
        w2 = np.asarray(self.out_weights, dtype=float)
        h = W1.shape[0] if W1.ndim == 2 else -1
        if W1.ndim != 2 or b1.shape != (h,) or w2.shape != (h,):
            raise ValueError("layer shapes disagree")
        if not (np.all(np.isfinite(W1)) and np.all(np.isfinite(b1))
                and np.all(np.isfinite(w2)) and np.isfinite(self.out_bias)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "hidden_weights", W1)
        object.__setattr__(self, "hidden_bias", b1)
        object.__setattr__(self, "out_weights", w2)
        object.__setattr__(self, "out_bias", float(self.out_bias))

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.hidden_weights.ravel(), self.hidden_bias,
                               self.out_weights, [self.out_bias]])

    @staticmethod
    def from_flat(w, num_features: int, hidden: int = 10) -> "MlpParams":
        w = np.asarray(w, dtype=float)
        if w.shape != (weight_count(num_features, hidden),):
            raise ValueError("weight vector has the wrong length")
        W1, b1, w2, b2 = _unpack(w, num_features, hidden)
        return MlpParams(hidden_weights=W1.copy(), hidden_bias=b1.copy(),
                         out_weights=w2.copy(), out_bias=float(b2))


def _unpack(w: np.ndarray, num_features: int, hidden: int):
    W1 = w[: hidden * num_features].reshape(hidden, num_features)
    b1 = w[hidden * num_features: hidden * num_features + hidden]
    w2 = w[hidden * num_features + hidden: hidden * num_features + 2 * hidden]
    b2 = w[-1]
    return W1, b1, w2, b2


def _sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _forward_loss(w, X, y, hidden: int) -> float:
    """Mean binary cross entropy only, skipping the backward pass.

    Line-search trials query the objective many times per accepted step, so
    the gradient work is worth avoiding there.
    """
    w = np.asarray(w, dtype=float)
    num_features = X.shape[1]
    if w.shape != (weight_count(num_features, hidden),):
        raise ValueError("weight vector has the wrong length")
    W1, b1, w2, b2 = _unpack(w, num_features, hidden)
    logit = np.maximum(X @ W1.T + b1, 0.0) @ w2 + b2
    return float(np.mean(np.logaddexp(0.0, logit) - y * logit))


def loss_and_grad(w, X, y, hidden: int = 10) -> tuple[float, np.ndarray]:
    """Mean binary cross entropy and a subgradient, both over the given rows.

    The forward pass is X -> ReLU(X W1^T + b1) -> logit, with the loss
    written as softplus(logit) - y * logit for numerical stability. ReLU
    contributes derivative zero at its kink.
    """
    w = np.asarray(w, dtype=float)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    num_features = X.shape[1]
    if w.shape != (weight_count(num_features, hidden),):
        raise ValueError("weight vector has the wrong length")
    W1, b1, w2, b2 = _unpack(w, num_features, hidden)
    pre = X @ W1.T + b1
    act = np.maximum(pre, 0.0)
    logit = act @ w2 + b2
    loss = float(np.mean(np.logaddexp(0.0, logit) - y * logit))
    batch = X.shape[0]
    dlogit = (_sigmoid(logit) - y) / batch
    db2 = dlogit.sum()
    dw2 = act.T @ dlogit
    dact = np.outer(dlogit, w2)
    dpre = dact * (pre > 0.0)
    dW1 = dpre.T @ X
    db1 = dpre.sum(axis=0)
    grad = np.concatenate([dW1.ravel(), db1, dw2, [db2]])
    return loss, grad


def accuracy(data: Dataset, w, hidden: int = 10) -> float:
    """Fraction of rows classified correctly, ties going to the positive class."""
    w = np.asarray(w, dtype=float)
    W1, b1, w2, b2 = _unpack(w, data.features.shape[1], hidden)
    logit = np.maximum(data.features @ W1.T + b1, 0.0) @ w2 + b2
    return float(np.mean((logit >= 0.0) == (data.labels == 1.0)))


def adaptive_batch_eval(data: Dataset, w, eps_f: float, seed: int,
                        hidden: int = 10) -> tuple[float, np.ndarray, int]:
    """Loss and gradient from a point-keyed batch grown until inside the bound.

    The whole dataset is permuted by a key derived from (seed, w), so the
    same w always sees the same sample order. Starting from a prefix of 16
    rows the batch doubles, cumulatively and without replacement, until the
    batch estimates are within eps_f of the full-data loss and sqrt(eps_f)
    of the full-data gradient. If doubling reaches the whole dataset the
    exact full-data values are returned with zero error. eps_f of 0 or
    infinity is allowed; the former always consumes the full dataset.
    Returns (loss, gradient, rows used).
    """
    w = np.asarray(w, dtype=float)
    if math.isnan(eps_f) or eps_f < 0.0:
        raise ValueError("eps_f must be nonnegative")
    total = data.features.shape[0]
    f_full, g_full = loss_and_grad(w, data.features, data.labels, hidden)
    if total <= 16:
        return f_full, g_full, total
    rng = np.random.default_rng(keyed_seed(seed, w, tag=b"batch"))
    perm = rng.permutation(total)
    grad_tol = math.sqrt(eps_f)
    size = 16
    while size < total:
        f_b, g_b = loss_and_grad(w, data.features[perm[:size]],
                                 data.labels[perm[:size]], hidden)
        if abs(f_b - f_full) <= eps_f and np.linalg.norm(g_b - g_full) <= grad_tol:
            return f_b, g_b, size
        size = min(2 * size, total)
    return f_full, g_full, total


@dataclass(frozen=True)
class BatchOracleConfig:
    """How the training oracle estimates the loss.

    mode "full" evaluates everything exactly. Mode "fixed" draws a fresh
    batch of batch_size rows per value query (the gradient reuses the most
    recent batch), giving an oracle that is noisy but not deterministic.
    Mode "adaptive" uses adaptive_batch_eval with the given eps_f target.
    """

    mode: str = "full"
    batch_size: int = 128
    eps_f: float = 0.05
    resample_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("full", "fixed", "adaptive"):
            raise ValueError(f"unknown batch mode {self.mode!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if not (self.eps_f > 0.0):
            raise ValueError("eps_f must be positive")


def bce_loss_oracle(data: Dataset, config: BatchOracleConfig = BatchOracleConfig(),
                    hidden: int = 10) -> OracleHandle:
    """Oracle over the flat weight vector for the given dataset.

    Truth access always evaluates the full dataset. The handle's meta dict
    carries the mode; adaptive mode additionally tracks samples_total (sum
    of rows used per distinct query point) and last_used there. Fixed mode
    rejects batch sizes above the dataset size and is flagged as not
    deterministic, since the same w can see different batches.
    """
    num_features = data.features.shape[1]
    dims = weight_count(num_features, hidden)

    def full_f(w):
        return _forward_loss(w, data.features, data.labels, hidden)

    def full_g(w):
        return loss_and_grad(w, data.features, data.labels, hidden)[1]

    truth = TruthAccess(f=full_f, g=full_g)
    meta = {"mode": config.mode, "hidden": hidden}

    if config.mode == "full":
        return OracleHandle(dims=dims, eval_f=full_f, eval_g=full_g, truth_access=truth,
                            deterministic=True, meta=meta)

    if config.mode == "fixed":
        if config.batch_size > data.features.shape[0]:
            raise ValueError("batch_size exceeds the dataset size")
        state: dict = {"counter": 0, "batch": None}
        meta["state"] = state
        # One generator for the oracle's lifetime; its position is the
        # iteration counter, so the batch sequence is a pure function of
        # resample_seed while each draw stays cheap.
        batch_rng = np.random.default_rng(np.random.SeedSequence(config.resample_seed))

        def draw_batch():
            state["counter"] += 1
            idx = batch_rng.choice(
                data.features.shape[0], size=config.batch_size, replace=False)
            state["batch"] = idx
            return idx

        def fixed_f(w):
            idx = draw_batch()
            return _forward_loss(w, data.features[idx], data.labels[idx], hidden)

        def fixed_g(w):
            idx = state["batch"] if state["batch"] is not None else draw_batch()
            return loss_and_grad(w, data.features[idx], data.labels[idx], hidden)[1]

        return OracleHandle(dims=dims, eval_f=fixed_f, eval_g=fixed_g, truth_access=truth,
                            deterministic=False, meta=meta)

    meta["samples_total"] = 0
    meta["last_used"] = 0
    cache: dict = {"key": None, "value": None}

    def adaptive(w):
        w = np.asarray(w, dtype=float)
        key = _canonical_bytes(w)
        if cache["key"] != key:
            loss, grad, used = adaptive_batch_eval(data, w, config.eps_f,
                                                   config.resample_seed, hidden)
            cache["key"] = key
            cache["value"] = (loss, grad, used)
            meta["samples_total"] += used
            meta["last_used"] = used
        return cache["value"]

    def adaptive_f(w):
        return adaptive(w)[0]

    def adaptive_g(w):
        return adaptive(w)[1]

    return OracleHandle(dims=dims, eval_f=adaptive_f, eval_g=adaptive_g, truth_access=truth,
                        deterministic=True, meta=meta)

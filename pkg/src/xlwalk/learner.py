"""The trainable model a walker carries.

Two architectures share one flat parameter vector: multinomial softmax
regression and a single tanh hidden layer. Training is plain mini-batch SGD
on cross-entropy with optional L2; updates are functional so callers can
keep multiple model copies without aliasing.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

SOFTMAX = "softmax"
MLP = "mlp"


@dataclass(frozen=True)
class ModelParams:
    arch: str
    n_dims: int
    n_classes: int
    hidden: int  # 0 for softmax regression
    theta: np.ndarray  # flat float64 parameter vector

    def __post_init__(self):
        expected = param_length(self.arch, self.n_dims, self.n_classes, self.hidden)
        if self.theta.shape != (expected,):
            raise ConfigError(
                f"{self.arch} model over {self.n_dims} dims / {self.n_classes} classes "
                f"needs {expected} parameters, got {self.theta.shape}"
            )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    batch_size: int = 32
    l2: float = 0.0


def param_length(arch: str, n_dims: int, n_classes: int, hidden: int = 0) -> int:
    if arch == SOFTMAX:
        return n_classes * (n_dims + 1)
    if arch == MLP:
        return hidden * (n_dims + 1) + n_classes * (hidden + 1)
    raise ConfigError(f"unknown architecture {arch!r}")


def init_model(arch: str, n_dims: int, n_classes: int, seed: int, hidden: int = 64) -> ModelParams:
    """Small random initialization, deterministic in the seed."""
    if arch == SOFTMAX:
        hidden = 0
    rng = np.random.default_rng(np.random.SeedSequence([0x30, seed]))
    if arch == SOFTMAX:
        theta = rng.normal(0.0, 0.01, size=param_length(arch, n_dims, n_classes))
    elif arch == MLP:
        w1 = rng.normal(0.0, 1.0 / np.sqrt(n_dims + 1), size=hidden * (n_dims + 1))
        w2 = rng.normal(0.0, 1.0 / np.sqrt(hidden + 1), size=n_classes * (hidden + 1))
        theta = np.concatenate([w1, w2])
    else:
        raise ConfigError(f"unknown architecture {arch!r}")
    return ModelParams(arch=arch, n_dims=n_dims, n_classes=n_classes, hidden=hidden, theta=theta)


def _split_mlp(m: ModelParams):
    cut = m.hidden * (m.n_dims + 1)
    w1 = m.theta[:cut].reshape(m.hidden, m.n_dims + 1)
    w2 = m.theta[cut:].reshape(m.n_classes, m.hidden + 1)
    return w1, w2


def _logits(m: ModelParams, features: np.ndarray) -> np.ndarray:
    if m.arch == SOFTMAX:
        w = m.theta.reshape(m.n_classes, m.n_dims + 1)
        return features @ w[:, :-1].T + w[:, -1]
    w1, w2 = _split_mlp(m)
    h = np.tanh(features @ w1[:, :-1].T + w1[:, -1])
    return h @ w2[:, :-1].T + w2[:, -1]


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def loss_and_grad(
    m: ModelParams, features: np.ndarray, labels: np.ndarray, l2: float = 0.0
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy plus 0.5*l2*|theta|^2 and its gradient in theta."""
    n = features.shape[0]
    if m.arch == SOFTMAX:
        w = m.theta.reshape(m.n_classes, m.n_dims + 1)
        logits = features @ w[:, :-1].T + w[:, -1]
        logp = _log_softmax(logits)
        probs = np.exp(logp)
        delta = probs.copy()
        delta[np.arange(n), labels] -= 1.0
        delta /= n
        grad_w = np.concatenate([delta.T @ features, delta.sum(axis=0)[:, None]], axis=1)
        grad = grad_w.ravel()
    else:
        w1, w2 = _split_mlp(m)
        pre = features @ w1[:, :-1].T + w1[:, -1]
        h = np.tanh(pre)
        logits = h @ w2[:, :-1].T + w2[:, -1]
        logp = _log_softmax(logits)
        probs = np.exp(logp)
        delta = probs.copy()
        delta[np.arange(n), labels] -= 1.0
        delta /= n
        grad_w2 = np.concatenate([delta.T @ h, delta.sum(axis=0)[:, None]], axis=1)
        back = (delta @ w2[:, :-1]) * (1.0 - h * h)
        grad_w1 = np.concatenate([back.T @ features, back.sum(axis=0)[:, None]], axis=1)
        grad = np.concatenate([grad_w1.ravel(), grad_w2.ravel()])
    loss = -logp[np.arange(n), labels].mean()
    if l2 > 0.0:
        loss += 0.5 * l2 * float(m.theta @ m.theta)
        grad = grad + l2 * m.theta
    return float(loss), grad


def sgd_steps(
    m: ModelParams,
    features: np.ndarray,
    labels: np.ndarray,
    k: int,
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> ModelParams:
    """k mini-batch SGD steps; batches drawn with replacement from the local set."""
    if features.shape[0] == 0:
        raise ValueError("cannot train on an empty sample set")
    if k < 1:
        raise ConfigError("need at least one SGD step")
    theta = m.theta.copy()
    model = replace(m, theta=theta)
    n = features.shape[0]
    for _ in range(k):
        batch = rng.integers(0, n, size=cfg.batch_size)
        _, grad = loss_and_grad(model, features[batch], labels[batch], cfg.l2)
        theta -= cfg.learning_rate * grad
    return replace(m, theta=theta)


def evaluate(m: ModelParams, features: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    """Mean cross-entropy and top-1 accuracy on the given samples."""
    if features.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty sample set")
    logp = _log_softmax(_logits(m, features))
    loss = -logp[np.arange(features.shape[0]), labels].mean()
    accuracy = float((logp.argmax(axis=1) == labels).mean())
    return float(loss), accuracy


def weighted_average(models: list[ModelParams], weights: list[float]) -> ModelParams:
    """Componentwise weighted mean of same-shape models."""
    if not models:
        raise ConfigError("no models to average")
    head = models[0]
    for m in models[1:]:
        if m.arch != head.arch or m.theta.shape != head.theta.shape:
            raise ConfigError("cannot average models with mismatched architectures")
    if len(weights) != len(models):
        raise ConfigError("one weight per model required")
    w = np.array(weights, dtype=np.float64)
    if (w < 0).any():
        raise ConfigError("weights must be non-negative")
    total = w.sum()
    if total == 0.0:
        logger.warning("all aggregation weights are zero; falling back to equal weights")
        w = np.ones_like(w)
        total = w.sum()
    stacked = np.stack([m.theta for m in models])
    return replace(head, theta=(w / total) @ stacked)


def save_model(m: ModelParams, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            {
                "arch": m.arch,
                "n_dims": m.n_dims,
                "n_classes": m.n_classes,
                "hidden": m.hidden,
                "theta": m.theta.tolist(),
            }
        )
    )


def load_model(path: str | Path) -> ModelParams:
    doc = json.loads(Path(path).read_text())
    return ModelParams(
        arch=doc["arch"],
        n_dims=doc["n_dims"],
        n_classes=doc["n_classes"],
        hidden=doc["hidden"],
        theta=np.array(doc["theta"], dtype=np.float64),
    )

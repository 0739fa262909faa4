"""Behavioral-cloning trainer: MSE on steering labels, SGD or Adam."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .layers import Network

log = logging.getLogger("teacar.train")


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 64
    learning_rate: float = 1e-4
    seed: int = 0
    optimizer: str = "adam"  # sgd | adam
    loss: str = "mse"
    val_split: float = 0.1
    stop_at_val_mse: float | None = None

    def __post_init__(self):
        if not (0.0 < self.val_split < 1.0):
            raise ValidationError(f"val_split must be in (0,1), got {self.val_split}")
        if self.optimizer not in ("sgd", "adam"):
            raise ValidationError(f"optimizer must be sgd or adam, got {self.optimizer!r}")
        if self.loss != "mse":
            raise ValidationError(f"only mse loss is supported, got {self.loss!r}")


class Sgd:
    def __init__(self, lr):
        self.lr = lr

    def step(self, layers):
        for layer in layers:
            layer.weight -= self.lr * layer.grad_weight
            layer.bias -= self.lr * layer.grad_bias


class Adam:
    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._slots = {}

    def _slot(self, key, like):
        if key not in self._slots:
            self._slots[key] = (np.zeros_like(like), np.zeros_like(like))
        return self._slots[key]

    def step(self, layers):
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for i, layer in enumerate(layers):
            for name in ("weight", "bias"):
                param = getattr(layer, name)
                grad = getattr(layer, "grad_" + name)
                m, v = self._slot((i, name), param)
                m += (1.0 - self.beta1) * (grad - m)
                v += (1.0 - self.beta2) * (grad * grad - v)
                param -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def make_optimizer(cfg: TrainConfig):
    return Adam(cfg.learning_rate) if cfg.optimizer == "adam" else Sgd(cfg.learning_rate)


def mse_loss(pred: np.ndarray, labels: np.ndarray):
    """Returns (loss, grad wrt pred). pred is (N,1), labels (N,)."""
    diff = pred[:, 0] - labels
    loss = float(np.mean(diff * diff))
    grad = (2.0 / len(labels)) * diff[:, None]
    return loss, grad.astype(pred.dtype)


def backward_and_step(net: Network, images: np.ndarray, labels: np.ndarray, optimizer) -> float:
    """One training step on a batch; returns the pre-step batch loss."""
    pred = net.forward(images)
    loss, grad = mse_loss(pred, labels)
    net.backward(grad)
    optimizer.step(net.param_layers())
    return loss


def batch_input(images_u8: np.ndarray, dtype=np.float32) -> np.ndarray:
    """(N,H,W,C) uint8 -> normalized (N,C,H,W) batch."""
    x = images_u8.astype(dtype) / dtype(255.0)
    return np.ascontiguousarray(x.transpose(0, 3, 1, 2))


def evaluate_mse(net: Network, images_u8, labels, batch_size=64) -> float:
    total = 0.0
    for lo in range(0, len(labels), batch_size):
        chunk = slice(lo, lo + batch_size)
        pred = net.forward(batch_input(images_u8[chunk]))
        diff = pred[:, 0] - labels[chunk]
        total += float(np.sum(diff * diff))
    return total / len(labels)


def fit(net: Network, images_u8: np.ndarray, labels: np.ndarray, cfg: TrainConfig) -> dict:
    """Train with a seeded shuffle and train/val split.

    Returns {"epochs_run", "train_mse": [...], "val_mse": [...]}.
    Stops early once val MSE reaches cfg.stop_at_val_mse, when set.
    """
    n = len(labels)
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(n)
    n_val = max(1, int(round(n * cfg.val_split)))
    val_idx, train_idx = order[:n_val], order[n_val:]
    labels = np.asarray(labels, dtype=np.float32)

    optimizer = make_optimizer(cfg)
    history = {"epochs_run": 0, "train_mse": [], "val_mse": []}
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        perm = train_idx[rng.permutation(len(train_idx))]
        losses = []
        for lo in range(0, len(perm), cfg.batch_size):
            idx = perm[lo : lo + cfg.batch_size]
            losses.append(backward_and_step(net, batch_input(images_u8[idx]), labels[idx], optimizer))
        val = evaluate_mse(net, images_u8[val_idx], labels[val_idx], cfg.batch_size)
        history["train_mse"].append(float(np.mean(losses)))
        history["val_mse"].append(val)
        history["epochs_run"] = epoch + 1
        log.info(
            "epoch %d/%d train_mse=%.5f val_mse=%.5f (%.1fs)",
            epoch + 1, cfg.epochs, history["train_mse"][-1], val, time.perf_counter() - t0,
        )
        if cfg.stop_at_val_mse is not None and val <= cfg.stop_at_val_mse:
            break
    return history

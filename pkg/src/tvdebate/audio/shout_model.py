"""Per-second shouting classifier: a small 1-D CNN written directly in numpy.

Four blocks of (same-padded convolution over time, ReLU, max-pool by 2,
dropout) feed a single dense sigmoid unit. Training uses mean binary
cross-entropy, hand-written backprop and Adam.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .. import container

log = logging.getLogger(__name__)

KIND = "shout-cnn"


class ShoutModelError(ValueError):
    pass


@dataclass(frozen=True)
class Architecture:
    input_frames: int = 100
    n_coeffs: int = 26
    channels: tuple[int, ...] = (16, 16, 32, 32)
    kernel: int = 5
    dropout: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(int(c) for c in self.channels))
        if self.kernel % 2 == 0:
            raise ShoutModelError("kernel must be odd for same padding")
        if self.final_frames < 1:
            raise ShoutModelError("input too short for the number of pooling stages")

    @property
    def final_frames(self) -> int:
        t = self.input_frames
        for _ in self.channels:
            t //= 2
        return t

    def shapes(self) -> dict[str, tuple[int, ...]]:
        out = {}
        c_in = self.n_coeffs
        for i, c in enumerate(self.channels):
            out[f"conv{i}.w"] = (self.kernel * c_in, c)
            out[f"conv{i}.b"] = (c,)
            c_in = c
        out["dense.w"] = (self.final_frames * c_in, 1)
        out["dense.b"] = (1,)
        return out


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 2e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_params(arch: Architecture, rng: np.random.Generator) -> dict[str, np.ndarray]:
    params = {}
    for name, shape in arch.shapes().items():
        if name.endswith(".b"):
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.normal(0.0, np.sqrt(2.0 / shape[0]), size=shape)
    return params


def _im2col(x: np.ndarray, k: int) -> np.ndarray:
    # (B, T, C) -> (B, T, k*C) with zero same-padding
    pad = k // 2
    xp = np.pad(x, ((0, 0), (pad, pad), (0, 0)))
    win = sliding_window_view(xp, k, axis=1)  # (B, T, C, k)
    return win.transpose(0, 1, 3, 2).reshape(x.shape[0], x.shape[1], k * x.shape[2])


def _col2im(dcols: np.ndarray, k: int, c: int) -> np.ndarray:
    B, T, _ = dcols.shape
    pad = k // 2
    d = dcols.reshape(B, T, k, c)
    dxp = np.zeros((B, T + 2 * pad, c))
    for j in range(k):
        dxp[:, j:j + T] += d[:, :, j]
    return dxp[:, pad:pad + T]


def forward(params, arch: Architecture, x: np.ndarray, masks: Optional[list] = None, cache: Optional[list] = None):
    """Logits for a batch ``x`` of shape (B, frames, coeffs).

    ``masks`` holds one dropout multiplier array per block (None = no dropout).
    """
    h = x
    for i in range(len(arch.channels)):
        cols = _im2col(h, arch.kernel)
        z = cols @ params[f"conv{i}.w"] + params[f"conv{i}.b"]
        a = np.maximum(z, 0.0)
        T2 = a.shape[1] // 2
        pairs = a[:, :2 * T2].reshape(a.shape[0], T2, 2, a.shape[2])
        pooled = pairs.max(axis=2)
        out = pooled * masks[i] if masks is not None else pooled
        if cache is not None:
            cache.append((h.shape, cols, z, pairs, pooled))
        h = out
    flat = h.reshape(h.shape[0], -1)
    if cache is not None:
        cache.append(flat)
    return (flat @ params["dense.w"] + params["dense.b"])[:, 0]


def bce_from_logits(logits: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def loss_and_grads(params, arch: Architecture, x, y, masks=None):
    cache: list = []
    logits = forward(params, arch, x, masks, cache)
    loss = bce_from_logits(logits, y)
    B = x.shape[0]
    grads = {}
    dz = ((sigmoid(logits) - y) / B)[:, None]
    flat = cache.pop()
    grads["dense.w"] = flat.T @ dz
    grads["dense.b"] = dz.sum(axis=0)
    dh = (dz @ params["dense.w"].T)
    for i in reversed(range(len(arch.channels))):
        in_shape, cols, z, pairs, pooled = cache[i]
        dh = dh.reshape(pooled.shape)
        if masks is not None:
            dh = dh * masks[i]
        # route the pooled gradient to the argmax of each pair
        first = pairs[:, :, 0] >= pairs[:, :, 1]
        da = np.zeros_like(z)
        T2 = pooled.shape[1]
        da[:, 0:2 * T2:2] = dh * first
        da[:, 1:2 * T2:2] = dh * ~first
        dz_ = da * (z > 0)
        grads[f"conv{i}.w"] = cols.reshape(-1, cols.shape[2]).T @ dz_.reshape(-1, dz_.shape[2])
        grads[f"conv{i}.b"] = dz_.sum(axis=(0, 1))
        if i > 0:
            dcols = dz_ @ params[f"conv{i}.w"].T
            dh = _col2im(dcols, arch.kernel, in_shape[2])
    return loss, grads


def dropout_masks(arch: Architecture, batch: int, rng: np.random.Generator) -> list:
    keep = 1.0 - arch.dropout
    masks = []
    t = arch.input_frames
    for c in arch.channels:
        t //= 2
        masks.append((rng.random((batch, t, c)) < keep) / keep)
    return masks


@dataclass
class ShoutModel:
    arch: Architecture
    params: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def logits(self, blocks: np.ndarray) -> np.ndarray:
        x = np.asarray(blocks, dtype=np.float64)
        if x.ndim == 2:
            x = x[None]
        if x.shape[1:] != (self.arch.input_frames, self.arch.n_coeffs):
            raise ShoutModelError(
                f"shape-mismatch: expected (*, {self.arch.input_frames}, {self.arch.n_coeffs}), got {x.shape}"
            )
        return forward(self.params, self.arch, x)

    def predict_proba(self, blocks: np.ndarray) -> np.ndarray:
        return sigmoid(self.logits(blocks))

    def to_bytes(self) -> bytes:
        arch = asdict(self.arch)
        arch["channels"] = list(self.arch.channels)
        return container.dumps(KIND, arch, self.params, self.metadata)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ShoutModel":
        arch, tensors, meta = container.loads(blob, KIND)
        arch = Architecture(**arch)
        params = {k: v.astype(np.float64) for k, v in tensors.items()}
        expected = arch.shapes()
        if set(params) != set(expected) or any(params[k].shape != s for k, s in expected.items()):
            raise ShoutModelError("container tensors do not match architecture")
        return cls(arch, params, meta)

    def save(self, path: Path | str) -> None:
        container.atomic_write(path, self.to_bytes())

    @classmethod
    def load(cls, path: Path | str) -> "ShoutModel":
        return cls.from_bytes(Path(path).read_bytes())

    @classmethod
    def zeros(cls, arch: Architecture = Architecture()) -> "ShoutModel":
        return cls(arch, {k: np.zeros(s) for k, s in arch.shapes().items()})


def predict_shout(model: ShoutModel, block) -> float:
    """Shout probability for one 100x26 block; label is ``p >= 0.5``."""
    x = np.asarray(block, dtype=np.float64)
    if x.shape != (model.arch.input_frames, model.arch.n_coeffs):
        raise ShoutModelError(f"shape-mismatch: {x.shape}")
    return float(model.predict_proba(x)[0])


def train_shout_model(blocks, labels, hyperparams: Optional[TrainConfig] = None, seed: int = 0,
                      arch: Optional[Architecture] = None) -> ShoutModel:
    x = np.asarray(blocks, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 3 or len(x) != len(y):
        raise ShoutModelError("blocks must be (n, frames, coeffs) with one label each")
    if len(np.unique(y)) < 2:
        raise ShoutModelError("single-class-labels")
    hp = hyperparams or TrainConfig()
    arch = arch or Architecture(input_frames=x.shape[1], n_coeffs=x.shape[2])
    rng = np.random.default_rng(seed)
    params = init_params(arch, rng)
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    curve = []
    for epoch in range(hp.epochs):
        order = rng.permutation(len(x))
        total = 0.0
        for start in range(0, len(x), hp.batch_size):
            idx = order[start:start + hp.batch_size]
            masks = dropout_masks(arch, len(idx), rng) if arch.dropout > 0 else None
            loss, grads = loss_and_grads(params, arch, x[idx], y[idx], masks)
            if not np.isfinite(loss):
                raise ShoutModelError(f"non-finite-loss at epoch {epoch}")
            total += loss * len(idx)
            step += 1
            for k in params:
                m[k] = hp.beta1 * m[k] + (1 - hp.beta1) * grads[k]
                v[k] = hp.beta2 * v[k] + (1 - hp.beta2) * grads[k] ** 2
                mhat = m[k] / (1 - hp.beta1 ** step)
                vhat = v[k] / (1 - hp.beta2 ** step)
                params[k] = params[k] - hp.learning_rate * mhat / (np.sqrt(vhat) + hp.eps)
        curve.append(total / len(x))
        log.debug("epoch %d loss %.5f", epoch, curve[-1])
    # store exactly what the container can hold
    params = {k: p.astype(np.float32).astype(np.float64) for k, p in params.items()}
    meta = {"epochs": hp.epochs, "seed": seed, "loss_curve": curve, "hyperparams": asdict(hp)}
    return ShoutModel(arch, params, meta)


def accuracy(model: ShoutModel, blocks, labels) -> float:
    pred = model.predict_proba(blocks) >= 0.5
    return float(np.mean(pred == (np.asarray(labels) >= 0.5)))


def split_by_group(groups, test_fraction: float = 0.2, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Boolean train/test masks that keep every group (audio) on one side."""
    groups = np.asarray(groups)
    uniq = np.unique(groups)
    rng = np.random.default_rng(seed)
    n_test = max(1, int(round(test_fraction * len(uniq))))
    test_groups = set(rng.permutation(uniq)[:n_test].tolist())
    test = np.array([g in test_groups for g in groups.tolist()])
    return ~test, test

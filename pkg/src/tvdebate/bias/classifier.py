"""Reference text classifier: mean-pooled embeddings, linear head, sigmoid.

Output is P(BJP). Token id 0 is padding and its embedding stays zero;
id 1 is a learned out-of-vocabulary embedding.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .. import container
from .corpus import LABELS, tokenize

log = logging.getLogger(__name__)

KIND = "bias-classifier"
PAD_ID = 0
OOV_ID = 1


class ClassifierError(ValueError):
    pass


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


@dataclass
class ClassifierConfig:
    dim: int = 64
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 1e-2
    weight_decay: float = 1e-4
    patience: int = 5
    min_count: int = 1


@dataclass
class TextClassifier:
    vocab: list[str]
    embedding: np.ndarray  # (V, d), row 0 is padding
    w: np.ndarray          # (d,)
    b: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self._index = {t: i for i, t in enumerate(self.vocab)}

    def ids(self, tokens: Sequence[str]) -> np.ndarray:
        return np.array([self._index.get(t, OOV_ID) for t in tokens], dtype=np.int64)

    def embed(self, text_or_tokens) -> np.ndarray:
        tokens = tokenize(text_or_tokens) if isinstance(text_or_tokens, str) else list(text_or_tokens)
        return self.embedding[self.ids(tokens)]

    # the two functions below define F over an (n, d) embedding sequence
    def logit_from_embeddings(self, emb: np.ndarray) -> float:
        return float(emb.mean(axis=0) @ self.w + self.b)

    def grad_from_embeddings(self, emb: np.ndarray, output: str = "probability") -> tuple[float, np.ndarray]:
        """Value of F and dF/d(emb) for the whole sequence."""
        n = emb.shape[0]
        z = self.logit_from_embeddings(emb)
        dz = np.broadcast_to(self.w / n, emb.shape)
        if output == "logit":
            return z, dz
        p = float(_sigmoid(z))
        return p, p * (1.0 - p) * dz

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        return np.array([_sigmoid(self.logit_from_embeddings(self.embed(t))) for t in texts])

    def to_bytes(self) -> bytes:
        return container.dumps(
            KIND,
            {"dim": int(self.embedding.shape[1]), "vocab": self.vocab, "pooling": "mean"},
            {"embedding": self.embedding, "w": self.w, "b": np.array([self.b])},
            self.metadata,
        )

    @classmethod
    def from_bytes(cls, blob: bytes) -> "TextClassifier":
        arch, t, meta = container.loads(blob, KIND)
        emb = t["embedding"].astype(np.float64)
        if emb.shape != (len(arch["vocab"]), arch["dim"]):
            raise ClassifierError("embedding shape does not match vocabulary")
        return cls(arch["vocab"], emb, t["w"].astype(np.float64), float(t["b"][0]), meta)

    def save(self, path: Path | str) -> None:
        container.atomic_write(path, self.to_bytes())

    @classmethod
    def load(cls, path: Path | str) -> "TextClassifier":
        return cls.from_bytes(Path(path).read_bytes())


def split_indices(n: int, seed: int, fractions=(0.8, 0.1, 0.1)) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(fractions[0] * n))
    n_val = int(round(fractions[1] * n))
    return order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:]


def _batch(ids_list: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    width = max(len(x) for x in ids_list)
    ids = np.zeros((len(ids_list), width), dtype=np.int64)
    for i, x in enumerate(ids_list):
        ids[i, :len(x)] = x
    counts = np.array([max(len(x), 1) for x in ids_list], dtype=float)
    return ids, counts


def _forward(E, w, b, ids, counts):
    pooled = E[ids].sum(axis=1) / counts[:, None]
    return pooled, pooled @ w + b


def _loss(E, w, b, ids, counts, y) -> float:
    _, z = _forward(E, w, b, ids, counts)
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def train_classifier(corpus: Sequence[tuple[str, str]], hyperparams: Optional[ClassifierConfig] = None,
                     seed: int = 0) -> tuple[TextClassifier, dict]:
    """Train on an 80/10/10 split with early stopping on validation loss."""
    hp = hyperparams or ClassifierConfig()
    labels = np.array([LABELS.index(lab) for _, lab in corpus], dtype=float)
    if len(np.unique(labels)) < 2:
        raise ClassifierError("single-class-corpus")
    tokens = [tokenize(t) for t, _ in corpus]
    tr, va, te = split_indices(len(corpus), seed)
    counts = Counter(tok for i in tr for tok in tokens[i])
    vocab = ["<pad>", "<oov>"] + sorted(t for t, c in counts.items() if c >= hp.min_count)
    index = {t: i for i, t in enumerate(vocab)}
    ids = [np.array([index.get(t, OOV_ID) for t in toks], dtype=np.int64) for toks in tokens]

    rng = np.random.default_rng(seed)
    E = rng.normal(0.0, 0.1, size=(len(vocab), hp.dim))
    E[PAD_ID] = 0.0
    w = rng.normal(0.0, 0.1, size=hp.dim)
    b = 0.0
    params = [E, w, np.array([b])]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8

    def subset(idx):
        bi, bc = _batch([ids[i] for i in idx]) if len(idx) else (np.zeros((0, 1), dtype=np.int64), np.zeros(0))
        return bi, bc, labels[idx]

    val_set = subset(va) if len(va) else subset(tr)
    best = (np.inf, [p.copy() for p in params], 0)
    step = 0
    history = []
    for epoch in range(hp.epochs):
        order = rng.permutation(tr)
        for start in range(0, len(order), hp.batch_size):
            idx = order[start:start + hp.batch_size]
            bi, bc, y = subset(idx)
            E, w, bb = params
            pooled, z = _forward(E, w, bb[0], bi, bc)
            dz = (_sigmoid(z) - y) / len(idx)
            gw = pooled.T @ dz + hp.weight_decay * w
            gb = np.array([dz.sum()])
            dpooled = np.outer(dz, w) / bc[:, None]
            gE = np.zeros_like(E)
            np.add.at(gE, bi.ravel(), np.repeat(dpooled, bi.shape[1], axis=0))
            gE += hp.weight_decay * E
            gE[PAD_ID] = 0.0
            step += 1
            for k, g in enumerate((gE, gw, gb)):
                m[k] = beta1 * m[k] + (1 - beta1) * g
                v[k] = beta2 * v[k] + (1 - beta2) * g * g
                params[k] = params[k] - hp.learning_rate * (m[k] / (1 - beta1 ** step)) / (
                    np.sqrt(v[k] / (1 - beta2 ** step)) + eps)
            params[0][PAD_ID] = 0.0
        val_loss = _loss(params[0], params[1], params[2][0], *val_set)
        history.append(val_loss)
        if val_loss < best[0] - 1e-6:
            best = (val_loss, [p.copy() for p in params], epoch)
        elif epoch - best[2] >= hp.patience:
            break
    E, w, bb = (p.astype(np.float32).astype(np.float64) for p in best[1])
    model = TextClassifier(vocab, E, w, float(bb[0]))

    def acc(idx):
        if not len(idx):
            return float("nan")
        pred = model.predict_proba([corpus[i][0] for i in idx]) >= 0.5
        return float(np.mean(pred == (labels[idx] == 1)))

    metrics = {
        "train_accuracy": acc(tr), "val_accuracy": acc(va), "test_accuracy": acc(te),
        "best_epoch": best[2], "epochs_run": len(history), "val_loss_curve": history,
        "n_train": int(len(tr)), "n_val": int(len(va)), "n_test": int(len(te)),
    }
    model.metadata = {"seed": seed, "hyperparams": vars(hp), "metrics": metrics,
                      "test_indices": [int(i) for i in te]}
    return model, metrics

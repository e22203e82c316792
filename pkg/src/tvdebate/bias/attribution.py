"""Integrated-gradients token attribution and per-label token ranking."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .classifier import TextClassifier
from .corpus import BJP, PARTY, PER, tokenize


def integrated_gradients(model: TextClassifier, sentence, steps: int = 256, output: str = "probability",
                         baseline: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-token attributions of F against an all-padding baseline.

    Uses the right Riemann sum over ``k = 1..steps`` of the gradient along
    the straight path, multiplied by the input-minus-baseline embedding and
    summed over the embedding dimensions.
    """
    if steps < 1:
        raise ValueError("nonpositive-steps")
    x = model.embed(sentence)
    if x.shape[0] == 0:
        return np.zeros(0)
    base = np.zeros_like(x) if baseline is None else baseline
    diff = x - base
    total = np.zeros_like(x)
    for k in range(1, steps + 1):
        _, g = model.grad_from_embeddings(base + (k / steps) * diff, output)
        total += g
    return (diff * (total / steps)).sum(axis=1)


def completeness_gap(model: TextClassifier, sentence, steps: int = 256, output: str = "probability") -> float:
    """|sum IG - (F(x) - F(baseline))|."""
    x = model.embed(sentence)
    ig = integrated_gradients(model, sentence, steps, output)
    f_x, _ = model.grad_from_embeddings(x, output)
    f_0, _ = model.grad_from_embeddings(np.zeros_like(x), output)
    return abs(float(ig.sum()) - (f_x - f_0))


def load_stopwords(path: Optional[Path | str] = None) -> frozenset[str]:
    if path is None:
        text = resources.files("tvdebate.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


@dataclass(frozen=True)
class TokenScore:
    token: str
    score: float
    frequency: int


def rank_tokens(attributions: Iterable[tuple[str, Sequence[str], Sequence[float]]],
                stopwords: frozenset[str] = frozenset(), min_freq: int = 50) -> dict[str, list[TokenScore]]:
    """Mean attribution per token and label, filtered and sorted descending.

    ``attributions`` yields ``(label, tokens, scores)`` where scores are IG
    values for P(BJP); for opposition sentences the sign is flipped so that
    every score points toward the sentence's own label.
    """
    sums: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for label, tokens, scores in attributions:
        sign = 1.0 if label == BJP else -1.0
        for tok, s in zip(tokens, scores):
            if tok in (PER, PARTY) or tok in stopwords:
                continue
            sums[label][tok].append(sign * float(s))
    table = {}
    for label, per_tok in sums.items():
        rows = [TokenScore(t, math.fsum(v) / len(v), len(v)) for t, v in per_tok.items() if len(v) >= min_freq]
        rows.sort(key=lambda r: (-r.score, r.token))
        table[label] = rows
    return table


def attribute_corpus(model: TextClassifier, corpus: Iterable[tuple[str, str]], steps: int = 256):
    """Yield ``(label, tokens, scores)`` for every sentence."""
    for text, label in corpus:
        tokens = tokenize(text)
        yield label, tokens, integrated_gradients(model, tokens, steps)

"""Shout training sets on disk: ``blocks.f32`` plus a ``blocks.json`` sidecar.

The sidecar holds ``shape`` (n, frames, coeffs), ``labels`` and, optionally,
``groups`` naming the source audio of every block.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..container import atomic_write
from .mfcc import MfccConfig, audio_blocks
from .synth import shout_corpus

BLOCKS_FILE = "blocks.f32"
SIDECAR_FILE = "blocks.json"


def write_training_set(directory: Path | str, blocks, labels, groups: Optional[Sequence[str]] = None) -> None:
    d = Path(directory)
    x = np.asarray(blocks, dtype="<f4")
    atomic_write(d / BLOCKS_FILE, x.tobytes())
    side = {"shape": list(x.shape), "labels": [int(v) for v in labels]}
    if groups is not None:
        side["groups"] = list(groups)
    atomic_write(d / SIDECAR_FILE, (json.dumps(side) + "\n").encode("utf-8"))


def read_training_set(directory: Path | str) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    d = Path(directory)
    side = json.loads((d / SIDECAR_FILE).read_text(encoding="utf-8"))
    shape = tuple(side["shape"])
    x = np.fromfile(d / BLOCKS_FILE, dtype="<f4")
    if x.size != int(np.prod(shape)):
        raise ValueError(f"{BLOCKS_FILE} holds {x.size} values, sidecar shape is {shape}")
    labels = np.asarray(side["labels"], dtype=int)
    if len(labels) != shape[0]:
        raise ValueError("one label per block required")
    groups = np.asarray(side["groups"]) if "groups" in side else None
    return x.reshape(shape).astype(np.float64), labels, groups


def synthetic_training_set(seed: int = 0, cfg: MfccConfig = MfccConfig()):
    """Scaled MFCC blocks, labels and audio ids of the synthetic shout corpus."""
    xs, ys, gs = [], [], []
    for audio_id, samples, labels in shout_corpus(seed):
        blocks = audio_blocks(samples, audio_id, cfg)
        xs.append(blocks)
        ys.extend(labels[:len(blocks)])
        gs.extend([audio_id] * len(blocks))
    return np.concatenate(xs), np.asarray(ys), np.asarray(gs)

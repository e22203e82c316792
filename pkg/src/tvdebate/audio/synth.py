"""Synthetic loud/soft audio for training and testing the shout detector.

Shout seconds are high-energy harmonic tones with a raised pitch and
syllable-rate amplitude modulation. Normal seconds are quiet noise
low-passed to a rough speech spectrum.
"""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

RATE = 16000
# Extra samples so the last second still yields a full 100-frame block.
TAIL_SAMPLES = 240
# Shouted seconds per 20-second audio; 200 shout / 200 normal overall.
SHOUT_SECONDS = (0, 20, 2, 18, 4, 16, 6, 14, 8, 12, 10, 10, 5, 15, 7, 13, 9, 11, 3, 17)
AUDIO_SECONDS = 20


def shout_second(rng: np.random.Generator, n: int = RATE) -> np.ndarray:
    t = np.arange(n) / RATE
    f0 = rng.uniform(260.0, 380.0)
    wave = sum(np.sin(2 * np.pi * f0 * h * t + rng.uniform(0, 2 * np.pi)) / h for h in range(1, 9))
    am = 1.0 + 0.5 * np.sin(2 * np.pi * rng.uniform(3.0, 6.0) * t + rng.uniform(0, 2 * np.pi))
    return 0.25 * rng.uniform(0.8, 1.2) * am * wave


def normal_second(rng: np.random.Generator, n: int = RATE) -> np.ndarray:
    noise = rng.normal(size=n)
    shaped = lfilter([1.0], [1.0, -0.9], noise)
    return 0.004 * rng.uniform(0.7, 1.3) * shaped


def synth_audio(labels, rng: np.random.Generator, tail: int = TAIL_SAMPLES) -> np.ndarray:
    """Concatenate one synthetic second per label (1 = shout)."""
    parts = [shout_second(rng) if lab else normal_second(rng) for lab in labels]
    parts.append(normal_second(rng, tail))
    return np.concatenate(parts)


def shout_layout(k: int, rng: np.random.Generator) -> np.ndarray:
    """Per-second labels for audio ``k`` with shouts in one or two runs."""
    n_shout = SHOUT_SECONDS[k % len(SHOUT_SECONDS)]
    labels = np.zeros(AUDIO_SECONDS, dtype=int)
    if n_shout == 0:
        return labels
    first = n_shout if n_shout == AUDIO_SECONDS else int(rng.integers(1, n_shout + 1))
    second = n_shout - first
    start = int(rng.integers(0, AUDIO_SECONDS - n_shout + 1))
    labels[start:start + first] = 1
    if second:
        free = [i for i in range(AUDIO_SECONDS) if labels[i] == 0]
        labels[free[-second:]] = 1
    return labels


def shout_corpus(seed: int = 0):
    """Yield ``(audio_id, samples, per_second_labels)`` for the 20-audio corpus."""
    rng = np.random.default_rng(seed)
    for k in range(len(SHOUT_SECONDS)):
        labels = shout_layout(k, rng)
        yield f"audio{k:02d}", synth_audio(labels, rng), labels

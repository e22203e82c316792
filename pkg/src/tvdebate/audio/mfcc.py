"""MFCC features, per-audio standard scaling and one-second blocking."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dct

LOG_FLOOR = 1e-10
SCALE_EPS = 1e-8
FRAMES_PER_BLOCK = 100


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class MfccConfig:
    sample_rate_hz: int = 16000
    frame_len_s: float = 0.025
    hop_s: float = 0.010
    n_mfcc: int = 26
    n_mels: int = 40
    fft_size: int = 512
    preemphasis: float = 0.97

    def __post_init__(self):
        if self.frame_samples > self.fft_size:
            raise FeatureError("frame longer than fft_size")
        if self.n_mfcc > self.n_mels:
            raise FeatureError("n_mfcc must not exceed n_mels")

    @property
    def frame_samples(self) -> int:
        return int(round(self.frame_len_s * self.sample_rate_hz))

    @property
    def hop_samples(self) -> int:
        return int(round(self.hop_s * self.sample_rate_hz))


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def _filterbank(n_mels: int, fft_size: int, sample_rate: int) -> tuple[np.ndarray, np.ndarray]:
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2), n_mels + 2))
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lo) / (mid - lo)
    falling = (hi - freqs) / (hi - mid)
    bank = np.clip(np.minimum(rising, falling), 0.0, None)
    bank.setflags(write=False)
    return bank, edges[1:-1]


def mel_filterbank(cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    """Triangular filters (n_mels x fft_size//2+1), unit peak at each center."""
    return _filterbank(cfg.n_mels, cfg.fft_size, cfg.sample_rate_hz)[0]


def mel_centers_hz(cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    return _filterbank(cfg.n_mels, cfg.fft_size, cfg.sample_rate_hz)[1]


def frame_signal(samples, cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise FeatureError("samples must be mono (1-D)")
    if not np.all(np.isfinite(x)):
        raise FeatureError("samples contain non-finite values")
    W, H = cfg.frame_samples, cfg.hop_samples
    if len(x) < W:
        raise FeatureError(f"too-short-input: {len(x)} samples < frame of {W}")
    return sliding_window_view(x, W)[::H]


def filterbank_energies(samples, cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    """Per-frame mel filterbank energies before the log."""
    frames = frame_signal(samples, cfg)
    emph = np.empty_like(frames)
    emph[:, 0] = frames[:, 0]
    emph[:, 1:] = frames[:, 1:] - cfg.preemphasis * frames[:, :-1]
    emph *= np.hamming(frames.shape[1])
    power = np.abs(np.fft.rfft(emph, n=cfg.fft_size)) ** 2 / cfg.fft_size
    return power @ mel_filterbank(cfg).T


def extract_mfcc(samples, cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    """MFCC matrix of shape (n_frames, n_mfcc).

    n_frames = floor((N - W) / H) + 1. Pre-emphasis is applied inside each
    frame, so shifting the input by one hop drops exactly the first row.
    """
    energies = filterbank_energies(samples, cfg)
    logs = np.log(np.maximum(energies, LOG_FLOOR))
    return dct(logs, type=2, norm="ortho", axis=1)[:, :cfg.n_mfcc]


def standard_scale(features) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise FeatureError("too-few-frames: need at least 2 frames")
    mean = x.mean(axis=0)
    centered = x - mean
    # the mean of a constant column can be off by an ulp; pin those to zero
    centered[:, np.ptp(x, axis=0) == 0] = 0.0
    return centered / (centered.std(axis=0) + SCALE_EPS)


@dataclass(frozen=True)
class FeatureBlock:
    matrix: np.ndarray
    video_id: str
    block_start_s: float


def make_blocks(features, video_id: str = "", frames_per_block: int = FRAMES_PER_BLOCK) -> list[FeatureBlock]:
    x = np.asarray(features)
    n = x.shape[0] // frames_per_block
    return [
        FeatureBlock(x[i * frames_per_block:(i + 1) * frames_per_block], video_id, float(i))
        for i in range(n)
    ]


def audio_blocks(samples, video_id: str = "", cfg: MfccConfig = MfccConfig()) -> np.ndarray:
    """Scaled MFCC blocks stacked as an array (n_blocks, 100, n_mfcc)."""
    feats = standard_scale(extract_mfcc(samples, cfg))
    n = feats.shape[0] // FRAMES_PER_BLOCK
    return feats[: n * FRAMES_PER_BLOCK].reshape(n, FRAMES_PER_BLOCK, feats.shape[1])

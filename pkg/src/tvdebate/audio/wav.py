"""WAV input: mono downmix and linear resampling to the analysis rate."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile

TARGET_RATE = 16000


class AudioDecodeError(ValueError):
    pass


def to_float(data: np.ndarray) -> np.ndarray:
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        return data.astype(np.float64) / 2147483648.0
    if np.issubdtype(data.dtype, np.floating):
        return data.astype(np.float64)
    raise AudioDecodeError(f"unsupported sample type {data.dtype}")


def resample_linear(x: np.ndarray, rate: int, target: int = TARGET_RATE) -> np.ndarray:
    if rate == target:
        return x
    n_out = int(np.floor(len(x) * target / rate))
    t_out = np.arange(n_out) / target
    return np.interp(t_out, np.arange(len(x)) / rate, x)


def read_wav(path: Path | str, target_rate: int = TARGET_RATE) -> np.ndarray:
    """Load a WAV file as mono float64 samples at ``target_rate``."""
    try:
        rate, data = wavfile.read(str(path))
    except (ValueError, OSError, EOFError) as exc:
        raise AudioDecodeError(f"{path}: {exc}") from None
    x = to_float(np.asarray(data))
    if x.ndim == 2:
        x = x.mean(axis=1)
    if x.size == 0:
        raise AudioDecodeError(f"{path}: no samples")
    return resample_linear(x, rate, target_rate)


def write_wav(path: Path | str, samples: np.ndarray, rate: int = TARGET_RATE) -> None:
    pcm = np.clip(np.round(np.asarray(samples) * 32767.0), -32768, 32767).astype("<i2")
    wavfile.write(str(path), rate, pcm)

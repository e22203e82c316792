"""
Shouting detection on synthetic audio
=====================================

MFCC blocks of one second, a small 1-D convnet, and majority-vote
smoothing of the per-second decisions.
"""

# %%
import time

import numpy as np

from tvdebate.audio import (
    TrainConfig,
    accuracy,
    audio_blocks,
    extract_mfcc,
    shouting_fraction,
    smooth_segments,
    split_by_group,
    train_shout_model,
)
from tvdebate.audio.dataset import synthetic_training_set
from tvdebate.audio.synth import synth_audio

# %% one second at 16 kHz gives 98 frames of 26 coefficients
rng = np.random.default_rng(0)
print(extract_mfcc(rng.normal(size=16000)).shape)

# %% 20 synthetic recordings, split by recording so no audio leaks into the test side
x, y, groups = synthetic_training_set(seed=0)
train, test = split_by_group(groups, 0.2, seed=0)
print(f"{len(x)} blocks, {int(y.sum())} shouted, {int(test.sum())} held out")

t0 = time.perf_counter()
model = train_shout_model(x[train], y[train], TrainConfig(epochs=30), seed=0)
print(f"trained in {time.perf_counter() - t0:.1f} s, held-out accuracy {accuracy(model, x[test], y[test]):.3f}")

# %% a 60 s clip with two shouting bursts and one isolated loud second
labels = np.zeros(60, dtype=int)
labels[10:18] = 1
labels[30] = 1
labels[40:49] = 1
clip = synth_audio(labels, np.random.default_rng(7))
raw = (model.predict_proba(audio_blocks(clip)) >= 0.5).astype(int).tolist()
segments = smooth_segments(raw, window=5, min_votes=3)
print("raw      ", "".join(map(str, raw)))
print("segments ", segments)
print("fraction ", shouting_fraction(segments, 60.0))

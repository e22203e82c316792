"""Audio incivility: shouting detection and overlap-speech fractions."""
from .mfcc import (
    FeatureBlock,
    FeatureError,
    MfccConfig,
    audio_blocks,
    extract_mfcc,
    filterbank_energies,
    make_blocks,
    mel_centers_hz,
    mel_filterbank,
    standard_scale,
)
from .shout_model import (
    Architecture,
    ShoutModel,
    ShoutModelError,
    TrainConfig,
    accuracy,
    predict_shout,
    split_by_group,
    train_shout_model,
)
from .smoothing import ZeroDurationError, overlap_fraction, shouting_fraction, smooth_segments, vote_labels
from .wav import AudioDecodeError, read_wav, write_wav

__all__ = [
    "Architecture", "AudioDecodeError", "FeatureBlock", "FeatureError", "MfccConfig", "ShoutModel",
    "ShoutModelError", "TrainConfig", "ZeroDurationError", "accuracy", "audio_blocks", "extract_mfcc",
    "filterbank_energies", "make_blocks", "mel_centers_hz", "mel_filterbank", "overlap_fraction",
    "predict_shout", "read_wav", "shouting_fraction", "smooth_segments", "split_by_group",
    "standard_scale", "train_shout_model", "vote_labels", "write_wav",
]

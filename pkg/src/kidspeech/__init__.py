"""Children's speech assessment toolkit.

Audio I/O, MFCC features, energy VAD, a small from-scratch neural
network stack with a word classifier, toy contrastive speech
pretraining, Persian G2P with bundled task lexicons, PER/WER metrics,
RAN and pseudo-word scoring, and a scoring service with a CLI.
"""

__version__ = "0.1.0"

from .audio import AudioClip, AudioFormatError, decode_wav, encode_wav, resample
from .features import FeatureConfigError, FeatureMatrix, MfccConfig, mfcc
from .metrics import EditOps, corpus_rate, edit_align, per, wer
from .phonology import G2pError, Lexicon, bundled_lexicon, g2p, g2p_phrase, load_lexicon
from .vad import Segment, VadConfig, detect_segments

__all__ = [
    "AudioClip",
    "AudioFormatError",
    "EditOps",
    "FeatureConfigError",
    "FeatureMatrix",
    "G2pError",
    "Lexicon",
    "MfccConfig",
    "Segment",
    "VadConfig",
    "__version__",
    "bundled_lexicon",
    "corpus_rate",
    "decode_wav",
    "detect_segments",
    "edit_align",
    "encode_wav",
    "g2p",
    "g2p_phrase",
    "load_lexicon",
    "mfcc",
    "per",
    "resample",
    "wer",
]

from .features import (
    CATALOG,
    extract_token_features,
    sentence_features,
    window_features,
    word_shape,
)
from .io import dumps_crf, dumps_nested, load_nested, loads_crf, loads_nested, save_nested
from .model import (
    CrfDataset,
    CrfModel,
    EncodedSequence,
    compile_dataset,
    forward_backward,
    logsumexp,
    nll_and_gradient,
    sequence_score,
    viterbi_decode,
)
from .optimize import LbfgsResult, OptimizationError, lbfgs
from .train import (
    CrfParams,
    CrfTrainingError,
    NestedModel,
    sentences_dataset,
    tag_nested,
    tag_sentences,
    train_crf,
    train_nested,
)

__all__ = [
    "CATALOG", "extract_token_features", "sentence_features", "window_features", "word_shape",
    "dumps_crf", "dumps_nested", "load_nested", "loads_crf", "loads_nested", "save_nested",
    "CrfDataset", "CrfModel", "EncodedSequence", "compile_dataset", "forward_backward",
    "logsumexp", "nll_and_gradient", "sequence_score", "viterbi_decode",
    "LbfgsResult", "OptimizationError", "lbfgs",
    "CrfParams", "CrfTrainingError", "NestedModel", "sentences_dataset", "tag_nested",
    "tag_sentences", "train_crf", "train_nested",
]

"""Transfer learning for RNTN sentiment models by POS-keyed word-vector substitution."""

__version__ = "0.1.0"

from .adapt import DonorTable, detect_deviations, donor_word, substitute_vectors
from .annotate import TwoClass, majority_vote, map_five_to_two
from .classify import ClassifyOptions, classify_phrase, decide_two_class
from .evaluate import ConfusionMatrix2, compare_models, confusion, metrics
from .model import FiveClass, SentimentModel, compose, forward, load_model, save_model
from .trainer import TrainConfig, grad_check, train
from .trees import SentimentTree, binarize, read_tree
from .vocab import select_vocabulary, tokenize

__all__ = [
    "ClassifyOptions",
    "ConfusionMatrix2",
    "DonorTable",
    "FiveClass",
    "SentimentModel",
    "SentimentTree",
    "TrainConfig",
    "TwoClass",
    "binarize",
    "classify_phrase",
    "compare_models",
    "compose",
    "confusion",
    "decide_two_class",
    "detect_deviations",
    "donor_word",
    "forward",
    "grad_check",
    "load_model",
    "majority_vote",
    "map_five_to_two",
    "metrics",
    "read_tree",
    "save_model",
    "select_vocabulary",
    "substitute_vectors",
    "tokenize",
    "train",
]

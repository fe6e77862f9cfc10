"""RNTN model: embeddings, tensor composition layer and five-class softmax head."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    CorruptModel,
    DimensionMismatch,
    EmptyTree,
    ModelNotLoaded,
    NeutralDonorMissing,
    UnsupportedVersion,
)
from .trees import SentimentTree

FORMAT_VERSION = "lexsent-rntn/1"
N_CLASSES = 5
DEFAULT_DIM = 25
DEFAULT_NEUTRAL_DONOR = "thing"
OOV_NOISE = 1e-4


class FiveClass(enum.IntEnum):
    VERY_NEGATIVE = 0
    NEGATIVE = 1
    NEUTRAL = 2
    POSITIVE = 3
    VERY_POSITIVE = 4


class OOVPolicy(str, enum.Enum):
    NEUTRAL_DONOR = "neutral-donor"
    SEEDED_RANDOM = "seeded-random"


@dataclass
class TensorLayer:
    V: np.ndarray  # (d, 2d, 2d)
    W: np.ndarray  # (d, 2d)
    b: np.ndarray  # (d,)

    def __post_init__(self):
        d = self.b.shape[0]
        if self.V.shape != (d, 2 * d, 2 * d) or self.W.shape != (d, 2 * d):
            raise DimensionMismatch(
                f"tensor layer shapes V{self.V.shape} W{self.W.shape} b{self.b.shape}"
            )

    @property
    def dim(self) -> int:
        return self.b.shape[0]


@dataclass
class SentimentHead:
    Ws: np.ndarray  # (5, d)
    bs: np.ndarray  # (5,)

    def __post_init__(self):
        if self.Ws.shape[0] != N_CLASSES or self.bs.shape != (N_CLASSES,):
            raise DimensionMismatch(f"head shapes Ws{self.Ws.shape} bs{self.bs.shape}")


@dataclass
class SentimentModel:
    """A complete RNTN.

    ``vocab`` maps each word to its row in ``E``.  Adaptation only ever
    rewrites rows of ``E``; the layer and head are shared verbatim.
    """

    vocab: dict[str, int]
    E: np.ndarray
    layer: TensorLayer
    head: SentimentHead
    oov_policy: OOVPolicy = OOVPolicy.NEUTRAL_DONOR
    neutral_donor: str = DEFAULT_NEUTRAL_DONOR
    case_fold: bool = True
    version: str = FORMAT_VERSION
    _oov_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.oov_policy = OOVPolicy(self.oov_policy)
        d = self.layer.dim
        if d < 1:
            raise DimensionMismatch("model dimension must be >= 1")
        if self.E.ndim != 2 or self.E.shape[1] != d:
            raise DimensionMismatch(f"embedding table {self.E.shape} vs dim {d}")
        if self.head.Ws.shape[1] != d:
            raise DimensionMismatch(f"head Ws {self.head.Ws.shape} vs dim {d}")
        rows = list(self.vocab.values())
        if len(set(rows)) != len(rows) or any(r < 0 or r >= self.E.shape[0] for r in rows):
            raise CorruptModel("vocabulary indices are duplicated or out of range")

    @property
    def dim(self) -> int:
        return self.layer.dim

    @property
    def words(self) -> list[str]:
        """Vocabulary in row order."""
        return sorted(self.vocab, key=self.vocab.__getitem__)

    def normalize(self, word: str) -> str:
        return word.lower() if self.case_fold else word

    def __contains__(self, word):
        return self.normalize(word) in self.vocab

    def params(self) -> dict[str, np.ndarray]:
        return {
            "E": self.E,
            "V": self.layer.V,
            "W": self.layer.W,
            "b": self.layer.b,
            "Ws": self.head.Ws,
            "bs": self.head.bs,
        }

    def with_params(self, params: dict[str, np.ndarray], vocab=None) -> "SentimentModel":
        return SentimentModel(
            vocab=dict(self.vocab if vocab is None else vocab),
            E=params["E"],
            layer=TensorLayer(params["V"], params["W"], params["b"]),
            head=SentimentHead(params["Ws"], params["bs"]),
            oov_policy=self.oov_policy,
            neutral_donor=self.neutral_donor,
            case_fold=self.case_fold,
            version=self.version,
        )

    def copy(self) -> "SentimentModel":
        return self.with_params({k: v.copy() for k, v in self.params().items()})

    def equals(self, other: "SentimentModel") -> bool:
        """Bit-exact equality including vocabulary order and settings."""
        if (
            self.words != other.words
            or self.oov_policy != other.oov_policy
            or self.neutral_donor != other.neutral_donor
            or self.case_fold != other.case_fold
            or self.version != other.version
        ):
            return False
        mine, theirs = self.params(), other.params()
        return all(
            mine[k].shape == theirs[k].shape and mine[k].tobytes() == theirs[k].tobytes()
            for k in mine
        )

    @classmethod
    def random(
        cls,
        words,
        dim: int = DEFAULT_DIM,
        seed: int = 0,
        init_scale: float = 0.01,
        tensor_scale: Optional[float] = None,
        **kwargs,
    ) -> "SentimentModel":
        """Uniform(-init_scale, init_scale) parameters; V at 0.1x that scale by default."""
        rng = np.random.default_rng(seed)
        if tensor_scale is None:
            tensor_scale = 0.1 * init_scale
        d = dim
        vocab = {w: i for i, w in enumerate(dict.fromkeys(words))}

        def u(scale, *shape):
            return rng.uniform(-scale, scale, size=shape)

        return cls(
            vocab=vocab,
            E=u(init_scale, len(vocab), d),
            layer=TensorLayer(u(tensor_scale, d, 2 * d, 2 * d), u(init_scale, d, 2 * d), u(init_scale, d)),
            head=SentimentHead(u(init_scale, N_CLASSES, d), u(init_scale, N_CLASSES)),
            **kwargs,
        )


def _stable_seed(word: str) -> int:
    return int.from_bytes(hashlib.sha256(word.encode("utf-8")).digest()[:8], "little")


def lookup_vector(model: Optional[SentimentModel], word: str) -> np.ndarray:
    """Embedding row for ``word``, falling back to the model's OOV policy."""
    if model is None:
        raise ModelNotLoaded("no model loaded")
    key = model.normalize(word)
    row = model.vocab.get(key)
    if row is not None:
        return model.E[row]
    if model.oov_policy is OOVPolicy.NEUTRAL_DONOR:
        donor = model.vocab.get(model.normalize(model.neutral_donor))
        if donor is None:
            raise NeutralDonorMissing(f"neutral donor {model.neutral_donor!r} not in vocabulary")
        return model.E[donor]
    vec = model._oov_cache.get(key)
    if vec is None:
        rng = np.random.default_rng(_stable_seed(key))
        vec = rng.uniform(-OOV_NOISE, OOV_NOISE, size=model.dim)
        vec.flags.writeable = False
        model._oov_cache[key] = vec
    return vec


def compose(a: np.ndarray, b: np.ndarray, layer: TensorLayer) -> np.ndarray:
    """Parent vector ``tanh(c^T V[k] c + (W c)_k + b_k)`` with ``c = [a; b]``."""
    d = layer.dim
    if a.shape != (d,) or b.shape != (d,):
        raise DimensionMismatch(f"children {a.shape}, {b.shape} vs layer dim {d}")
    c = np.concatenate([a, b])
    return np.tanh(np.einsum("i,kij,j->k", c, layer.V, c) + layer.W @ c + layer.b)


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def node_distribution(p: np.ndarray, head: SentimentHead) -> np.ndarray:
    if p.shape != (head.Ws.shape[1],):
        raise DimensionMismatch(f"node vector {p.shape} vs head {head.Ws.shape}")
    return softmax(head.Ws @ p + head.bs)


def forward(model: SentimentModel, tree: Optional[SentimentTree]) -> SentimentTree:
    """Annotate every node of ``tree`` (in place) with its vector and distribution."""
    if model is None:
        raise ModelNotLoaded("no model loaded")
    if tree is None:
        raise EmptyTree("no tree given")
    for node in tree.nodes():
        if node.is_leaf:
            node.vector = lookup_vector(model, node.token)
        else:
            node.vector = compose(node.left.vector, node.right.vector, model.layer)
        node.dist = node_distribution(node.vector, model.head)
    return tree


# -- serialization -----------------------------------------------------------

_MATRICES = ("E", "V", "W", "b", "Ws", "bs")


def _canonical(doc: dict) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False).encode("utf-8")


def model_to_dict(model: SentimentModel) -> dict:
    doc = {
        "version": model.version,
        "dim": model.dim,
        "case_fold": model.case_fold,
        "oov_policy": model.oov_policy.value,
        "neutral_donor": model.neutral_donor,
        "vocab": model.words,
    }
    params = model.params()
    # rows of E are written in vocab order so the index map is implicit
    order = [model.vocab[w] for w in doc["vocab"]]
    params = dict(params, E=params["E"][order] if order else params["E"][:0])
    for k in _MATRICES:
        doc[k] = params[k].tolist()
    doc["checksum"] = hashlib.sha256(_canonical(doc)).hexdigest()
    return doc


def model_from_dict(doc: dict) -> SentimentModel:
    if not isinstance(doc, dict):
        raise CorruptModel("model document is not a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise UnsupportedVersion(f"unsupported model version {doc.get('version')!r}")
    body = {k: v for k, v in doc.items() if k != "checksum"}
    if doc.get("checksum") != hashlib.sha256(_canonical(body)).hexdigest():
        raise CorruptModel("checksum mismatch")
    try:
        d = int(doc["dim"])
        arrays = {k: np.array(doc[k], dtype=np.float64) for k in _MATRICES}
        arrays["E"] = arrays["E"].reshape(len(doc["vocab"]), d)
        vocab = {w: i for i, w in enumerate(doc["vocab"])}
        if len(vocab) != len(doc["vocab"]):
            raise CorruptModel("duplicate vocabulary entries")
        return SentimentModel(
            vocab=vocab,
            E=arrays["E"],
            layer=TensorLayer(arrays["V"], arrays["W"], arrays["b"]),
            head=SentimentHead(arrays["Ws"], arrays["bs"]),
            oov_policy=OOVPolicy(doc["oov_policy"]),
            neutral_donor=doc["neutral_donor"],
            case_fold=bool(doc["case_fold"]),
            version=doc["version"],
        )
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, (CorruptModel, DimensionMismatch)):
            raise CorruptModel(str(exc)) from exc
        raise CorruptModel(f"malformed model document: {exc}") from exc


def save_model(model: SentimentModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)) + "\n", encoding="utf-8")


def load_model(path) -> SentimentModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModel(f"{path}: not a valid model file ({exc})") from exc
    return model_from_dict(doc)

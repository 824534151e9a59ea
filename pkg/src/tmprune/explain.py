"""Token attention maps from comprehensiveness and sufficiency perturbations.

Model confidence for class ``c`` is the absolute gap between the clipped score
of ``c`` and the summed clipped scores of the other classes, divided by its
largest possible value ``num_classes * T``.

Perturbations act on token positions but the model only sees the Boolean bag
of words: deleting one occurrence of a repeated word changes nothing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .machine import TsetlinMachine
from .text import Document, Vocabulary, vectorize_tokens

MODES = ("comprehensiveness", "sufficiency")


@dataclass
class AttentionMap:
    scores: np.ndarray
    mode: str
    tokens: list[str] | None = None

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.mode not in MODES + ("human",):
            raise ValueError(f"unknown attention map mode {self.mode!r}")
        if self.scores.size and (self.scores.min() < 0 or self.scores.max() > 1):
            raise ValueError("attention scores must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.scores)

    def to_records(self) -> list[dict]:
        tokens = self.tokens or [None] * len(self.scores)
        return [{"token": t, "score": float(s)} for t, s in zip(tokens, self.scores)]


def model_confidence(model: TsetlinMachine, x, class_index: int) -> np.ndarray | float:
    """Normalized confidence in ``class_index`` for one input or a batch."""
    if not 0 <= class_index < model.config.num_classes:
        raise IndexError(f"class {class_index} out of range")
    scores = model.class_scores(x)
    own = scores[..., class_index]
    rest = scores.sum(axis=-1) - own
    conf = np.abs(own - rest) / (model.config.num_classes * model.config.T)
    return float(conf) if np.ndim(conf) == 0 else conf


def _tokens(doc) -> list[str]:
    return doc.tokens if isinstance(doc, Document) else list(doc)


def _check_indices(indices: Iterable[int], n: int) -> set[int]:
    idx = set(int(i) for i in indices)
    bad = [i for i in idx if not 0 <= i < n]
    if bad:
        raise IndexError(f"token positions {sorted(bad)} out of range for {n} tokens")
    return idx


def _resolve_class(model, x, class_index):
    return model.predict(x) if class_index is None else class_index


def comprehensiveness(
    model: TsetlinMachine,
    vocab: Vocabulary,
    doc,
    removed: Iterable[int],
    class_index: int | None = None,
) -> float:
    """Confidence drop after deleting the tokens at ``removed`` positions.

    ``class_index`` defaults to the class predicted for the full document.
    """
    tokens = _tokens(doc)
    removed = _check_indices(removed, len(tokens))
    x = vectorize_tokens(tokens, vocab)
    cls = _resolve_class(model, x, class_index)
    x_removed = vectorize_tokens([t for i, t in enumerate(tokens) if i not in removed], vocab)
    return model_confidence(model, x, cls) - model_confidence(model, x_removed, cls)


def sufficiency(
    model: TsetlinMachine,
    vocab: Vocabulary,
    doc,
    kept: Iterable[int],
    class_index: int | None = None,
) -> float:
    """Confidence drop when only the tokens at ``kept`` positions remain."""
    tokens = _tokens(doc)
    kept = _check_indices(kept, len(tokens))
    x = vectorize_tokens(tokens, vocab)
    cls = _resolve_class(model, x, class_index)
    x_kept = vectorize_tokens([tokens[i] for i in sorted(kept)], vocab)
    return model_confidence(model, x, cls) - model_confidence(model, x_kept, cls)


def _minmax(v: np.ndarray) -> np.ndarray:
    lo, hi = v.min(), v.max()
    if hi - lo <= 0:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def leave_one_out_scores(model: TsetlinMachine, vocab: Vocabulary, doc, mode: str) -> np.ndarray:
    """Raw per-token comprehensiveness (token removed) or sufficiency (token kept)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    tokens = _tokens(doc)
    if not tokens:
        return np.zeros(0)
    x = vectorize_tokens(tokens, vocab)
    cls = model.predict(x)
    ids = np.array([vocab.lookup(t) for t in tokens])
    perturbed = np.zeros((len(tokens), len(vocab)), dtype=np.uint8)
    if mode == "comprehensiveness":
        perturbed[:] = x
        occurrences = {}
        for k in ids:
            occurrences[k] = occurrences.get(k, 0) + 1
        for pos, k in enumerate(ids):
            # Only a word's last remaining occurrence clears its bit.
            if k >= 0 and occurrences[k] == 1:
                perturbed[pos, k] = 0
    else:
        for pos, k in enumerate(ids):
            if k >= 0:
                perturbed[pos, k] = 1
    base = model_confidence(model, x, cls)
    return base - model_confidence(model, perturbed, cls)


def tam(model: TsetlinMachine, vocab: Vocabulary, doc, mode: str = "comprehensiveness") -> AttentionMap:
    """Per-token attention map, min-max normalized within the document.

    A constant score vector (including a single token) maps to all zeros.
    Sufficiency maps are not inverted.
    """
    raw = leave_one_out_scores(model, vocab, doc, mode)
    scores = _minmax(raw) if raw.size else raw
    return AttentionMap(scores, mode=mode, tokens=list(_tokens(doc)))


def tams(
    model: TsetlinMachine,
    vocab: Vocabulary,
    docs: Sequence,
    mode: str = "comprehensiveness",
    workers: int = 1,
) -> list[AttentionMap]:
    """Attention maps for many documents, in input order.

    ``workers > 1`` spreads documents over a thread pool; the model is only
    read, and the output order does not depend on scheduling.
    """
    if workers <= 1:
        return [tam(model, vocab, d, mode) for d in docs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda d: tam(model, vocab, d, mode), docs))

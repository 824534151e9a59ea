"""Planted-keyword text classification task with known token importance.

Two classes share a 200-word vocabulary: 5 keywords per class, 50 noise words
sprinkled uniformly into every document, and 140 filler words drawn from a
Zipf-like distribution. Each document has 10-30 tokens and at least one
keyword of its own class. The ground-truth attention mask marks the keyword
positions, which makes it a stand-in for human attention maps.
"""

from __future__ import annotations

import numpy as np

from .text import Dataset, Document

NEGATIVE_KEYWORDS = ("terrible", "awful", "horrible", "disgusting", "mediocre")
POSITIVE_KEYWORDS = ("delicious", "fantastic", "awesome", "amazing", "enjoyed")
LABELS = ["negative", "positive"]

NUM_NOISE = 50
NUM_FILLER = 140

NOISE_WORDS = tuple(f"noise{i:02d}" for i in range(NUM_NOISE))
FILLER_WORDS = tuple(f"word{i:03d}" for i in range(NUM_FILLER))
KEYWORDS = (NEGATIVE_KEYWORDS, POSITIVE_KEYWORDS)


def generate(
    num_docs: int = 2000,
    seed: int = 0,
    min_len: int = 10,
    max_len: int = 30,
    max_keywords: int = 3,
    noise_rate: float = 0.5,
    num_annotators: int = 1,
) -> Dataset:
    """Generate a balanced two-class dataset.

    Every document carries ``num_annotators`` copies of its keyword mask as
    its human attention maps.
    """
    rng = np.random.default_rng(seed)
    ranks = np.arange(1, NUM_FILLER + 1)
    filler_p = 1.0 / ranks
    filler_p /= filler_p.sum()

    docs = []
    for i in range(num_docs):
        label = i % 2
        length = int(rng.integers(min_len, max_len + 1))
        n_kw = int(rng.integers(1, max_keywords + 1))
        tokens = []
        for _ in range(length - n_kw):
            if rng.random() < noise_rate:
                tokens.append(NOISE_WORDS[rng.integers(NUM_NOISE)])
            else:
                tokens.append(FILLER_WORDS[rng.choice(NUM_FILLER, p=filler_p)])
        positions = np.sort(rng.choice(length, size=n_kw, replace=False))
        mask = [0] * length
        for pos in positions:
            tokens.insert(int(pos), KEYWORDS[label][rng.integers(len(KEYWORDS[label]))])
            mask[int(pos)] = 1
        docs.append(Document(text=" ".join(tokens), label=label, hams=[mask] * num_annotators))
    order = rng.permutation(num_docs)
    return Dataset([docs[j] for j in order], labels=list(LABELS), split="custom")


def train_test_split(dataset: Dataset, test_fraction: float = 0.2) -> tuple[Dataset, Dataset]:
    cut = int(round(len(dataset) * (1 - test_fraction)))
    train = Dataset(dataset.documents[:cut], labels=list(dataset.labels), split="train")
    test = Dataset(dataset.documents[cut:], labels=list(dataset.labels), split="custom")
    return train, test


def keyword_mask(doc: Document) -> np.ndarray:
    """Positions holding any planted keyword (either class)."""
    planted = set(NEGATIVE_KEYWORDS) | set(POSITIVE_KEYWORDS)
    return np.array([tok in planted for tok in doc.tokens], dtype=np.uint8)

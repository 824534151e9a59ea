"""Tokenization, vocabulary and Boolean bag-of-words input, plus dataset I/O.

Datasets are stored as JSONL (one object per line) or CSV. A canonical row is::

    {"text": "...", "label": "pos", "hams": [[0, 1, ...], ...]}

``hams`` is optional and holds one binary vector per human annotator, aligned
one-to-one with the tokens produced by :func:`tokenize`.
"""

from __future__ import annotations

import csv
import hashlib
import json
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ABSENT",
    "AlignmentError",
    "DatasetError",
    "Dataset",
    "Document",
    "Vocabulary",
    "build_vocabulary",
    "load_dataset",
    "load_vocabulary",
    "save_dataset",
    "save_vocabulary",
    "tokenize",
    "vectorize",
    "vectorize_tokens",
]

DEFAULT_MAX_VOCAB = 5000
ABSENT = -1

SPLITS = ("train", "test-50", "test-100", "test-200", "custom")

# Apostrophes are stripped at token edges but survive inside ("i've").
_STRIP = string.punctuation + "‘’“”"


class DatasetError(ValueError):
    """Malformed dataset row. ``row`` is the 0-based row index, if known."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class AlignmentError(DatasetError):
    """A human attention map does not line up with the document tokens."""


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation at token edges.

    >>> tokenize("This place is terrible.")
    ['this', 'place', 'is', 'terrible']
    >>> tokenize("I've always")
    ["i've", 'always']
    """
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(_STRIP)
        if tok:
            tokens.append(tok)
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    """Ordered word list with a dense word -> index map."""

    words: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        index = {w: i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ValueError("vocabulary words must be unique")
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def lookup(self, word: str) -> int:
        """Index of ``word`` or :data:`ABSENT`."""
        return self.index.get(word, ABSENT)

    @property
    def fingerprint(self) -> str:
        return hashlib.sha256("\n".join(self.words).encode("utf-8")).hexdigest()

    def literal_name(self, literal: int) -> str:
        """Readable name of literal id ``literal`` (2k -> word, 2k+1 -> ¬word)."""
        word = self.words[literal // 2]
        return word if literal % 2 == 0 else "¬" + word


def build_vocabulary(
    corpus: Iterable[Sequence[str]], max_size: int = DEFAULT_MAX_VOCAB
) -> Vocabulary:
    """Most frequent ``max_size`` tokens; ties broken lexicographically.

    ``corpus`` is an iterable of token lists.
    """
    counts: Counter[str] = Counter()
    for tokens in corpus:
        counts.update(tokens)
    if not counts:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    if max_size < 1:
        raise ValueError("max_size must be positive")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return Vocabulary(tuple(w for w, _ in ranked[:max_size]))


def vectorize_tokens(tokens: Iterable[str], vocab: Vocabulary) -> np.ndarray:
    """Boolean bag of words (uint8, length ``len(vocab)``) for a token list."""
    x = np.zeros(len(vocab), dtype=np.uint8)
    for tok in tokens:
        k = vocab.index.get(tok)
        if k is not None:
            x[k] = 1
    return x


def vectorize(doc: "Document | Sequence[str]", vocab: Vocabulary) -> np.ndarray:
    tokens = doc.tokens if isinstance(doc, Document) else doc
    return vectorize_tokens(tokens, vocab)


def save_vocabulary(vocab: Vocabulary, path) -> None:
    """One word per line, preceded by a ``# fingerprint:`` header line."""
    lines = [f"# fingerprint: {vocab.fingerprint}", *vocab.words]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vocabulary(path) -> Vocabulary:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# fingerprint:"):
        raise ValueError(f"{path}: missing fingerprint header")
    expected = lines[0].split(":", 1)[1].strip()
    vocab = Vocabulary(tuple(lines[1:]))
    if vocab.fingerprint != expected:
        raise ValueError(f"{path}: fingerprint does not match word list")
    return vocab


@dataclass
class Document:
    text: str
    label: int
    tokens: list[str] = None
    hams: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        if self.tokens is None:
            self.tokens = tokenize(self.text)
        self.hams = [tuple(int(v) for v in h) for h in self.hams]
        for h in self.hams:
            if len(h) != len(self.tokens):
                raise AlignmentError(
                    f"attention map has length {len(h)} but the text has "
                    f"{len(self.tokens)} tokens"
                )
            if any(v not in (0, 1) for v in h):
                raise AlignmentError("attention map entries must be 0 or 1")


@dataclass
class Dataset:
    documents: list[Document]
    labels: list[str]
    split: str = "custom"

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}; expected one of {SPLITS}")
        for i, doc in enumerate(self.documents):
            if not 0 <= doc.label < len(self.labels):
                raise DatasetError(f"label index {doc.label} out of range", row=i)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def num_annotators(self) -> int:
        """Annotator count common to every document (0 if any lacks HAMs)."""
        if not self.documents:
            return 0
        return min(len(d.hams) for d in self.documents)

    def vectorize(self, vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
        """Stacked BOW matrix ``X`` and label vector ``y``."""
        X = np.zeros((len(self.documents), len(vocab)), dtype=np.uint8)
        for i, doc in enumerate(self.documents):
            X[i] = vectorize_tokens(doc.tokens, vocab)
        y = np.array([d.label for d in self.documents], dtype=np.int64)
        return X, y


def _row_to_document(row: dict, i: int, label_index: dict[str, int], grow: bool) -> Document:
    if not isinstance(row, dict):
        raise DatasetError("expected an object", row=i)
    try:
        text = row["text"]
        label = row["label"]
    except KeyError as err:
        raise DatasetError(f"missing field {err.args[0]!r}", row=i) from None
    if not isinstance(text, str):
        raise DatasetError("'text' must be a string", row=i)
    label = str(label)
    if label not in label_index:
        if not grow:
            raise DatasetError(f"unknown label {label!r}", row=i)
        label_index[label] = len(label_index)
    hams = row.get("hams") or []
    if not isinstance(hams, list) or not all(isinstance(h, list) for h in hams):
        raise DatasetError("'hams' must be a list of lists", row=i)
    try:
        return Document(text=text, label=label_index[label], hams=hams)
    except AlignmentError as err:
        raise AlignmentError(str(err), row=i) from None
    except (TypeError, ValueError) as err:
        raise DatasetError(str(err), row=i) from None


def _read_rows(path: Path, fmt: str) -> list[dict]:
    if fmt == "jsonl":
        rows = []
        with path.open(encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError as err:
                    raise DatasetError(f"invalid JSON ({err.msg})", row=len(rows)) from None
        return rows
    if fmt == "csv":
        rows = []
        with path.open(encoding="utf-8", newline="") as fh:
            for i, rec in enumerate(csv.DictReader(fh)):
                row = dict(rec)
                if row.get("hams"):
                    try:
                        row["hams"] = json.loads(row["hams"])
                    except json.JSONDecodeError:
                        raise DatasetError("'hams' column is not valid JSON", row=i) from None
                rows.append(row)
        return rows
    raise ValueError(f"unknown dataset format {fmt!r}")


def load_dataset(
    path,
    format: str | None = None,
    labels: Sequence[str] | None = None,
    split: str = "custom",
) -> Dataset:
    """Read a JSONL or CSV dataset.

    Label strings map to indices by first appearance unless ``labels`` (the
    training label order) is given, in which case unseen labels are errors.
    The format defaults to the file suffix.
    """
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    rows = _read_rows(path, fmt)
    label_index = {name: i for i, name in enumerate(labels or [])}
    docs = [_row_to_document(r, i, label_index, grow=labels is None) for i, r in enumerate(rows)]
    return Dataset(docs, labels=list(label_index), split=split)


def _canonical_row(doc: Document, labels: Sequence[str]) -> dict:
    row = {"text": doc.text, "label": labels[doc.label]}
    if doc.hams:
        row["hams"] = [list(h) for h in doc.hams]
    return row


def save_dataset(dataset: Dataset, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    rows = [_canonical_row(d, dataset.labels) for d in dataset.documents]
    if fmt == "jsonl":
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")
    elif fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["text", "label", "hams"])
            writer.writeheader()
            for row in rows:
                hams = row.get("hams")
                writer.writerow({**row, "hams": json.dumps(hams, separators=(",", ":")) if hams else ""})
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")

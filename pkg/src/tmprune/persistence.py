"""Model file format.

A model file is::

    TSETLIN-MODEL\\n
    <header: one line of canonical JSON>\\n
    <state matrix, row-major, little-endian unsigned integers>

The header holds the format version, the configuration (num_classes,
clauses_per_class, num_features, num_states, T, s, seed), the vocabulary
fingerprint, the config fingerprint and the payload dtype. It may also carry
the vocabulary words, the label names and free-form metadata. Nothing
time-dependent is written, so equal models give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .machine import ModelConfig, TsetlinMachine
from .text import Vocabulary

MAGIC = b"TSETLIN-MODEL\n"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """The file is not a model file this version can read."""


@dataclass
class ModelFile:
    model: TsetlinMachine
    vocab: Vocabulary | None = None
    labels: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _dtype(num_states: int) -> str:
    return "<u1" if num_states <= 256 else "<u2" if num_states <= 65536 else "<u4"


def _header(model: TsetlinMachine, vocab, labels, meta) -> dict:
    cfg = model.config
    header = {
        "format_version": FORMAT_VERSION,
        "num_classes": cfg.num_classes,
        "clauses_per_class": cfg.clauses_per_class,
        "num_features": model.num_features,
        "num_states": cfg.num_states,
        "T": cfg.T,
        "s": cfg.s,
        "seed": cfg.seed,
        "vocab_fingerprint": model.vocab_fingerprint,
        "config_fingerprint": model.fingerprint,
        "dtype": _dtype(cfg.num_states),
        "labels": list(labels or []),
        "meta": dict(meta or {}),
    }
    if vocab is not None:
        if vocab.fingerprint != model.vocab_fingerprint:
            raise ValueError("vocabulary does not match the model's fingerprint")
        header["vocab"] = list(vocab.words)
    return header


def dumps_model(model: TsetlinMachine, vocab=None, labels=None, meta=None) -> bytes:
    header = _header(model, vocab, labels, meta)
    line = json.dumps(header, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    payload = np.ascontiguousarray(model.states, dtype=header["dtype"]).tobytes()
    return MAGIC + line.encode("utf-8") + b"\n" + payload


def save_model(path, model: TsetlinMachine, vocab=None, labels=None, meta=None) -> None:
    Path(path).write_bytes(dumps_model(model, vocab, labels, meta))


def loads_model(data: bytes) -> ModelFile:
    if not data.startswith(MAGIC):
        raise ModelFormatError("not a model file (bad magic)")
    rest = data[len(MAGIC):]
    end = rest.find(b"\n")
    if end < 0:
        raise ModelFormatError("truncated header")
    try:
        header = json.loads(rest[:end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ModelFormatError(f"unreadable header: {err}") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {header.get('format_version')!r}")
    try:
        config = ModelConfig(
            num_classes=header["num_classes"],
            clauses_per_class=header["clauses_per_class"],
            num_states=header["num_states"],
            T=header["T"],
            s=header["s"],
            seed=header["seed"],
        )
        n = int(header["num_features"])
        dtype = np.dtype(header["dtype"])
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"bad header field: {err}") from None
    payload = rest[end + 1:]
    shape = (config.num_clauses, 2 * n)
    if len(payload) != shape[0] * shape[1] * dtype.itemsize:
        raise ModelFormatError(
            f"payload has {len(payload)} bytes, expected {shape[0] * shape[1] * dtype.itemsize}"
        )
    states = np.frombuffer(payload, dtype=dtype).reshape(shape)
    try:
        model = TsetlinMachine(config, n, header["vocab_fingerprint"], states)
    except ValueError as err:
        raise ModelFormatError(str(err)) from None
    if header.get("config_fingerprint") != model.fingerprint:
        raise ModelFormatError("config fingerprint does not match header fields")
    vocab = None
    if "vocab" in header:
        vocab = Vocabulary(tuple(header["vocab"]))
        if vocab.fingerprint != model.vocab_fingerprint:
            raise ModelFormatError("embedded vocabulary does not match its fingerprint")
    return ModelFile(model, vocab, list(header.get("labels", [])), dict(header.get("meta", {})))


def load_model(path) -> ModelFile:
    return loads_model(Path(path).read_bytes())


def model_payload(path) -> bytes:
    """State-matrix bytes of a model file, without the header."""
    data = Path(path).read_bytes()
    rest = data[len(MAGIC):]
    return rest[rest.find(b"\n") + 1:]


def export_json(model: TsetlinMachine, vocab=None, labels=None, meta=None) -> str:
    """Canonical JSON debug export (sorted keys, one clause row per list)."""
    doc = _header(model, vocab, labels, meta)
    doc["states"] = model.states.tolist()
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def import_json(text: str) -> ModelFile:
    doc = json.loads(text)
    states = np.array(doc.pop("states"), dtype=doc["dtype"])
    header = json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return loads_model(MAGIC + header.encode("utf-8") + b"\n" + states.astype(doc["dtype"]).tobytes())

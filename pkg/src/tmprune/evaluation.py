"""Agreement between human and machine attention maps, and accuracy.

``pair_sim`` is one minus the per-token mean absolute difference between a
binary human map and a continuous machine map. ``pair_sim_sufficiency`` is
the mean absolute difference itself, the form used for sufficiency maps where
a low score means an important token. The two always sum to one.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .machine import TsetlinMachine
from .text import Dataset, Vocabulary

METRICS = ("comprehensiveness", "sufficiency")
REPORT_COLUMNS = ("model_variant", "prune_fraction", "annotator", "metric", "sim_measure", "dataset")


def _pair(ham, mam) -> tuple[np.ndarray, np.ndarray]:
    ham = np.asarray(getattr(ham, "scores", ham), dtype=np.float64)
    mam = np.asarray(getattr(mam, "scores", mam), dtype=np.float64)
    if ham.shape != mam.shape:
        raise ValueError(f"attention maps differ in length: {ham.shape} vs {mam.shape}")
    if ham.size == 0:
        raise ValueError("attention maps are empty")
    return ham, mam


def pair_sim(ham, mam) -> float:
    ham, mam = _pair(ham, mam)
    return 1.0 - float(np.mean(np.abs(ham - mam)))


def pair_sim_sufficiency(ham, mam) -> float:
    ham, mam = _pair(ham, mam)
    return float(np.mean(np.abs(ham - mam)))


PAIR_FUNCTIONS = {
    "comprehensiveness": pair_sim,
    "sufficiency": pair_sim_sufficiency,
    "sufficiency_complement": pair_sim,
}


def sim_measure(hams: Sequence, mams: Sequence, metric: str = "comprehensiveness") -> float:
    """Average pairwise similarity over documents.

    ``hams[i]`` and ``mams[i]`` are the two maps of document ``i``.
    """
    pair = PAIR_FUNCTIONS[metric]
    if len(hams) != len(mams):
        raise ValueError(f"{len(hams)} human maps but {len(mams)} machine maps")
    if not hams:
        raise ValueError("no documents to compare")
    if any(m is None for m in mams):
        raise ValueError("missing machine map for a document")
    # fsum keeps the mean independent of document order.
    return math.fsum(pair(h, m) for h, m in zip(hams, mams)) / len(hams)


def annotator_maps(dataset: Dataset, annotator: int) -> list[tuple[int, ...]]:
    """HAMs of one annotator (0-based) for every document."""
    out = []
    for i, doc in enumerate(dataset.documents):
        if annotator >= len(doc.hams):
            raise ValueError(f"document {i} has no attention map for annotator {annotator + 1}")
        out.append(doc.hams[annotator])
    return out


def accuracy(model: TsetlinMachine, dataset: Dataset, vocab: Vocabulary) -> float:
    if len(dataset) == 0:
        raise ValueError("cannot score an empty dataset")
    X, y = dataset.vectorize(vocab)
    return model.accuracy(X, y)


@dataclass
class SimilarityReport:
    """Rows are HAM annotators followed by machine variants; columns are annotators."""

    metric: str
    dataset: str
    annotators: list[str]
    rows: list[str]
    values: np.ndarray
    kinds: list[str] = field(default_factory=list)
    fractions: list[float | None] = field(default_factory=list)

    def records(self) -> list[dict]:
        recs = []
        for r, name in enumerate(self.rows):
            for c, ann in enumerate(self.annotators):
                recs.append({
                    "model_variant": name,
                    "prune_fraction": self.fractions[r] if self.fractions else None,
                    "annotator": ann,
                    "metric": self.metric,
                    "sim_measure": float(self.values[r, c]),
                    "dataset": self.dataset,
                })
        return recs

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for rec in self.records():
            writer.writerow({**rec, "prune_fraction": "" if rec["prune_fraction"] is None else rec["prune_fraction"],
                             "sim_measure": repr(rec["sim_measure"])})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.records(), indent=2)

    def format_table(self, digits: int = 3) -> str:
        width = max(len(r) for r in self.rows + ["Models"]) + 2
        head = "Models".ljust(width) + "".join(a.rjust(10) for a in self.annotators)
        lines = [f"{self.metric} / {self.dataset}", head]
        for r, name in enumerate(self.rows):
            if r > 0 and self.kinds and self.kinds[r] != self.kinds[r - 1]:
                lines.append("-" * len(head))
            lines.append(name.ljust(width) + "".join(f"{v:10.{digits}f}" for v in self.values[r]))
        return "\n".join(lines)


def pairwise_table(
    hams: Mapping[str, Sequence],
    machine_maps: Mapping[str, Sequence],
    metric: str = "comprehensiveness",
    dataset: str = "",
    fractions: Mapping[str, float] | None = None,
) -> SimilarityReport:
    """SimMeasure of every human and machine map set against every annotator.

    ``hams`` maps annotator name -> per-document maps; ``machine_maps`` maps
    variant name -> per-document maps. Human rows come first.
    """
    if not hams:
        raise ValueError("at least one annotator is required")
    annotators = list(hams)
    rows = annotators + list(machine_maps)
    sources = {**{a: hams[a] for a in annotators}, **machine_maps}
    values = np.array([[sim_measure(hams[a], sources[r], metric) for a in annotators] for r in rows])
    fractions = fractions or {}
    return SimilarityReport(
        metric=metric,
        dataset=dataset,
        annotators=annotators,
        rows=rows,
        values=values,
        kinds=["human"] * len(annotators) + ["machine"] * len(machine_maps),
        fractions=[None] * len(annotators) + [fractions.get(v) for v in machine_maps],
    )

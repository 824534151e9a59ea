"""Frequency-based literal pruning.

Every literal is counted by the number of clauses (over all classes) that
include it. Literals that appear in at least one clause are ranked from least
to most frequent, ties by literal id, and the first ``floor(fraction * R)``
of the ``R`` ranked literals are pruned by setting their automaton state to 0
in every clause.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .machine import TsetlinMachine

MAX_FRACTION = 0.5
DEFAULT_SWEEP = tuple(round(0.05 * i, 2) for i in range(1, 9))


def literal_frequencies(model: TsetlinMachine) -> np.ndarray:
    """Include count of each of the ``2n`` literals across all clauses."""
    return model.include_mask().sum(axis=0).astype(np.int64)


def rank_literals(counts) -> np.ndarray:
    """Literal ids with a non-zero count, least frequent first (ties by id)."""
    counts = np.asarray(counts)
    ids = np.flatnonzero(counts > 0)
    # lexsort sorts by the last key first.
    return ids[np.lexsort((ids, counts[ids]))]


def _check_fraction(fraction: float) -> float:
    fraction = float(fraction)
    if not 0.0 <= fraction <= MAX_FRACTION:
        raise ValueError(f"prune fraction {fraction} outside [0, {MAX_FRACTION}]")
    return fraction


@dataclass
class PruneReport:
    fraction: float
    pruned: list[int]
    literals_before: list[int]
    literals_after: list[int]
    ranked: int = 0
    names: list[str] = field(default_factory=list)

    @property
    def reduction(self) -> list[float]:
        """Percent of each clause's literals removed (0 for empty clauses)."""
        return [
            100.0 * (b - a) / b if b else 0.0
            for b, a in zip(self.literals_before, self.literals_after)
        ]

    def to_dict(self) -> dict:
        return {
            "fraction": self.fraction,
            "ranked_literals": self.ranked,
            "pruned_literals": list(self.pruned),
            "pruned_names": list(self.names),
            "literals_before": list(self.literals_before),
            "literals_after": list(self.literals_after),
            "percent_reduction": [round(r, 6) for r in self.reduction],
        }


def prune(model: TsetlinMachine, fraction: float, vocab=None) -> tuple[TsetlinMachine, PruneReport]:
    """Return a pruned copy of ``model`` and a report; ``model`` is untouched."""
    fraction = _check_fraction(fraction)
    ranking = rank_literals(literal_frequencies(model))
    # Guard against products like 0.29 * 100 = 28.999999999999996.
    m = math.floor(fraction * len(ranking) + 1e-9)
    chosen = ranking[:m]
    pruned = model.copy()
    pruned.states[:, chosen] = 0
    report = PruneReport(
        fraction=fraction,
        pruned=chosen.tolist(),
        literals_before=model.literal_counts().tolist(),
        literals_after=pruned.literal_counts().tolist(),
        ranked=len(ranking),
        names=[vocab.literal_name(j) for j in chosen] if vocab is not None else [],
    )
    return pruned, report


def prune_sweep(model: TsetlinMachine, fractions, vocab=None) -> list[tuple[float, TsetlinMachine, PruneReport]]:
    """Independent prunes of the same base model, one per fraction."""
    fractions = [_check_fraction(f) for f in fractions]
    return [(f, *prune(model, f, vocab)) for f in fractions]

"""Readable clause listings and before/after pruning diffs."""

from __future__ import annotations

import numpy as np

from .machine import TsetlinMachine
from .pruning import literal_frequencies
from .text import Vocabulary

EMPTY = "(empty)"
AND = " ∧ "


def clause_literal_ids(model: TsetlinMachine, clause_id: int) -> list[int]:
    return np.flatnonzero(model.include_mask()[clause_id]).tolist()


def removed_literals(base: TsetlinMachine, pruned: TsetlinMachine) -> dict[int, list[int]]:
    """Per clause, literal ids included in ``base`` but not in ``pruned``."""
    if not base.same_binding(pruned):
        raise ValueError("models are bound to different configurations or vocabularies")
    gone = base.include_mask() & ~pruned.include_mask()
    return {int(j): np.flatnonzero(gone[j]).tolist() for j in np.flatnonzero(gone.any(axis=1))}


def format_clause(
    model: TsetlinMachine,
    clause_id: int,
    vocab: Vocabulary,
    frequencies=None,
    removed=(),
) -> str:
    """Conjunction of the clause's literals, most frequent in the model first.

    Literals listed in ``removed`` are shown in square brackets.
    """
    ids = clause_literal_ids(model, clause_id)
    if not ids:
        return EMPTY
    freq = literal_frequencies(model) if frequencies is None else frequencies
    ids.sort(key=lambda j: (-freq[j], j))
    removed = set(removed)
    parts = [f"[{vocab.literal_name(j)}]" if j in removed else vocab.literal_name(j) for j in ids]
    return AND.join(parts)


def select_clauses(model: TsetlinMachine, x=None, count: int | None = None) -> list[int]:
    """Clauses firing on ``x``, or the clauses with the most literals.

    Ordered by literal count (descending), then clause id.
    """
    sizes = model.literal_counts()
    if x is not None:
        candidates = np.flatnonzero(model.clause_outputs(x))
    else:
        candidates = np.arange(model.config.num_clauses)
    ordered = sorted(candidates.tolist(), key=lambda j: (-sizes[j], j))
    return ordered if count is None else ordered[:count]


def describe_clauses(
    model: TsetlinMachine,
    vocab: Vocabulary,
    clause_ids,
    labels=None,
    pruned: TsetlinMachine | None = None,
) -> list[str]:
    """One line per clause: id, class, polarity, literal count and formula."""
    freq = literal_frequencies(model)
    gone = removed_literals(model, pruned) if pruned is not None else {}
    lines = []
    for j in clause_ids:
        c = model.clause(j)
        cls = labels[c.class_index] if labels else str(c.class_index)
        sign = "+" if c.polarity > 0 else "-"
        n = len(c.include_original) + len(c.include_negated)
        head = f"clause {j} [{cls} {sign}] {n} literals"
        if pruned is not None:
            head += f", {len(gone.get(j, []))} removed"
        lines.append(f"{head}: {format_clause(model, j, vocab, freq, gone.get(j, ()))}")
    return lines

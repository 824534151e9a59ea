"""Vanilla multiclass Tsetlin Machine over Boolean bag-of-words input.

The clause bank is one integer matrix ``states`` of shape
``(num_classes * clauses_per_class, 2 * n)``. Row ``j`` is clause
``j % clauses_per_class`` of class ``j // clauses_per_class``. Column ``2k``
is the automaton for literal ``x_k`` and column ``2k + 1`` the one for ``¬x_k``.
A literal is included when its state is at least ``num_states // 2``.

Within a class, clauses alternate polarity starting with a positive one, so
local index 0, 2, 4, ... vote for the class and 1, 3, 5, ... against it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Clause",
    "ModelConfig",
    "TsetlinMachine",
    "class_score",
    "clause_literals",
    "evaluate_clause",
    "fit",
    "literals_of",
    "predict",
    "type_i_feedback",
    "type_ii_feedback",
]


@dataclass(frozen=True)
class ModelConfig:
    num_classes: int
    clauses_per_class: int
    num_states: int = 256
    T: int = 20
    s: float = 5.0
    seed: int = 42

    def __post_init__(self):
        if self.num_classes < 2:
            raise ValueError("num_classes must be at least 2")
        if self.clauses_per_class < 2 or self.clauses_per_class % 2:
            raise ValueError("clauses_per_class must be an even number >= 2")
        if self.num_states < 2 or self.num_states % 2:
            raise ValueError("num_states must be an even number >= 2")
        if self.T < 1:
            raise ValueError("T must be a positive integer")
        if not self.s > 1:
            raise ValueError("s must be greater than 1")

    @property
    def include_threshold(self) -> int:
        return self.num_states // 2

    @property
    def num_clauses(self) -> int:
        return self.num_classes * self.clauses_per_class

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Clause:
    """Read-only view of one clause: included feature indices by polarity."""

    include_original: tuple[int, ...]
    include_negated: tuple[int, ...]
    class_index: int
    polarity: int
    num_features: int

    @property
    def is_empty(self) -> bool:
        return not self.include_original and not self.include_negated


def literals_of(x: np.ndarray) -> np.ndarray:
    """Interleave ``x`` with its negation: ``[x_0, ¬x_0, x_1, ¬x_1, ...]``.

    Works on a single vector or on a batch (rows are documents).
    """
    x = np.asarray(x, dtype=np.uint8)
    lit = np.empty(x.shape[:-1] + (2 * x.shape[-1],), dtype=np.uint8)
    lit[..., 0::2] = x
    lit[..., 1::2] = 1 - x
    return lit


def evaluate_clause(clause: Clause, x, training: bool = False) -> int:
    """Conjunction of the clause's literals on input ``x``.

    An empty clause outputs 1 while training (so it can pick up literals) and
    0 otherwise.
    """
    x = np.asarray(x)
    if x.shape != (clause.num_features,):
        raise ValueError(
            f"input has shape {x.shape}, clause expects ({clause.num_features},)"
        )
    if clause.is_empty:
        return int(training)
    if any(x[k] != 1 for k in clause.include_original):
        return 0
    if any(x[k] != 0 for k in clause.include_negated):
        return 0
    return 1


def _clause_outputs(include: np.ndarray, literals: np.ndarray, training: bool) -> np.ndarray:
    """Outputs of every clause row in ``include`` for one literal vector."""
    violated = include[:, literals == 0].any(axis=1)
    out = ~violated
    if not training:
        out &= include.any(axis=1)
    return out


def type_i_feedback(
    states: np.ndarray,
    literals: np.ndarray,
    s: float,
    num_states: int,
    rng: np.random.Generator,
    outputs: np.ndarray | None = None,
) -> None:
    """Type I feedback, in place, on every row of ``states``.

    When a clause outputs 1, automata of true literals move one step towards
    include with probability (s-1)/s and those of false literals one step
    towards exclude with probability 1/s. When it outputs 0, every automaton
    moves towards exclude with probability 1/s. Moves saturate at the ends.
    """
    states = np.atleast_2d(states)
    if outputs is None:
        include = states >= num_states // 2
        outputs = _clause_outputs(include, literals, training=True)
    u = rng.random(states.shape)
    reward = outputs[:, None] & (literals[None, :] == 1)
    up = reward & (u < (s - 1.0) / s)
    down = ~reward & (u < 1.0 / s)
    states += up
    states -= down & (states > 0)
    np.minimum(states, num_states - 1, out=states)


def type_ii_feedback(
    states: np.ndarray,
    literals: np.ndarray,
    num_states: int,
    outputs: np.ndarray | None = None,
) -> None:
    """Type II feedback, in place: for clauses that output 1, push every
    excluded automaton of a false literal one step towards include."""
    states = np.atleast_2d(states)
    include = states >= num_states // 2
    if outputs is None:
        outputs = _clause_outputs(include, literals, training=True)
    states += outputs[:, None] & (literals[None, :] == 0) & ~include


class TsetlinMachine:
    """Clause bank plus hyperparameters, bound to a vocabulary fingerprint."""

    def __init__(
        self,
        config: ModelConfig,
        num_features: int,
        vocab_fingerprint: str = "",
        states: np.ndarray | None = None,
    ):
        self.config = config
        self.num_features = int(num_features)
        self.vocab_fingerprint = vocab_fingerprint
        shape = (config.num_clauses, 2 * self.num_features)
        if states is None:
            # Everything starts just below the include threshold: all clauses empty.
            states = np.full(shape, config.include_threshold - 1, dtype=np.int32)
        else:
            states = np.array(states, dtype=np.int32)
            if states.shape != shape:
                raise ValueError(f"state matrix has shape {states.shape}, expected {shape}")
            if states.min(initial=0) < 0 or states.max(initial=0) >= config.num_states:
                raise ValueError(f"states must lie in [0, {config.num_states - 1}]")
        self.states = states
        half = config.clauses_per_class // 2
        self._polarity = np.tile(np.array([1, -1], dtype=np.int64), half)

    # -- structure ---------------------------------------------------------

    def copy(self) -> "TsetlinMachine":
        return TsetlinMachine(self.config, self.num_features, self.vocab_fingerprint, self.states.copy())

    @property
    def polarity(self) -> np.ndarray:
        """Vote sign of each clause within its class (+1, -1, +1, ...)."""
        return self._polarity

    def include_mask(self) -> np.ndarray:
        return self.states >= self.config.include_threshold

    def clause(self, clause_id: int) -> Clause:
        if not 0 <= clause_id < self.config.num_clauses:
            raise IndexError(f"clause id {clause_id} out of range")
        inc = self.states[clause_id] >= self.config.include_threshold
        alpha = self.config.clauses_per_class
        return Clause(
            include_original=tuple(np.flatnonzero(inc[0::2]).tolist()),
            include_negated=tuple(np.flatnonzero(inc[1::2]).tolist()),
            class_index=clause_id // alpha,
            polarity=int(self._polarity[clause_id % alpha]),
            num_features=self.num_features,
        )

    def literal_counts(self) -> np.ndarray:
        """Number of included literals in each clause."""
        return self.include_mask().sum(axis=1)

    def same_binding(self, other: "TsetlinMachine") -> bool:
        return (
            self.config == other.config
            and self.num_features == other.num_features
            and self.vocab_fingerprint == other.vocab_fingerprint
        )

    @property
    def fingerprint(self) -> str:
        """Hash of the configuration and vocabulary binding (not the states)."""
        payload = json.dumps(
            {"config": self.config.to_dict(), "n": self.num_features, "vocab": self.vocab_fingerprint},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    # -- inference ---------------------------------------------------------

    def _check_input(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        if X.shape[-1] != self.num_features:
            raise ValueError(
                f"input width {X.shape[-1]} does not match the model's {self.num_features} features"
            )
        if X.size and (X.min() < 0 or X.max() > 1):
            raise ValueError("inputs must be binary")
        return X.astype(np.uint8, copy=False)

    def clause_outputs(self, X, training: bool = False) -> np.ndarray:
        """Clause outputs for a single input (shape ``(C,)``) or a batch (``(N, C)``)."""
        X = self._check_input(X)
        if X.ndim == 1:
            return _clause_outputs(self.include_mask(), literals_of(X), training)
        # float32 matmul goes through BLAS and is exact for these small counts.
        lit = literals_of(np.atleast_2d(X)).astype(np.float32)
        include = self.include_mask().astype(np.float32)
        # A clause is violated when an included literal is 0.
        violations = (1.0 - lit) @ include.T
        out = violations == 0
        if not training:
            out &= include.any(axis=1)[None, :]
        return out

    def class_scores(self, X, clip: bool = True) -> np.ndarray:
        """Net votes per class: positive clauses minus negative clauses.

        Clipped to ``[-T, T]`` unless ``clip`` is false.
        """
        out = self.clause_outputs(X).astype(np.int64)
        alpha = self.config.clauses_per_class
        votes = out.reshape(out.shape[:-1] + (self.config.num_classes, alpha)) @ self._polarity
        if clip:
            votes = np.clip(votes, -self.config.T, self.config.T)
        return votes

    def predict(self, X) -> np.ndarray | int:
        """Argmax of clipped class scores; ties go to the lowest class index."""
        scores = self.class_scores(X)
        pred = np.argmax(scores, axis=-1)
        return int(pred) if np.ndim(pred) == 0 else pred

    # -- training ----------------------------------------------------------

    def _update(self, lit: np.ndarray, target: int, rng: np.random.Generator) -> None:
        cfg = self.config
        alpha = cfg.clauses_per_class
        T = cfg.T
        other = int(rng.integers(cfg.num_classes - 1))
        if other >= target:
            other += 1
        positive = self._polarity > 0
        for cls, is_target in ((target, True), (other, False)):
            block = self.states[cls * alpha:(cls + 1) * alpha]
            include = block >= cfg.include_threshold
            out = _clause_outputs(include, lit, training=True)
            score = int(np.clip(out.astype(np.int64) @ self._polarity, -T, T))
            if is_target:
                p = (T - score) / (2.0 * T)
                type_i, type_ii = positive, ~positive
            else:
                p = (T + score) / (2.0 * T)
                type_i, type_ii = ~positive, positive
            chosen = rng.random(alpha) < p
            rows_i = np.flatnonzero(chosen & type_i)
            rows_ii = np.flatnonzero(chosen & type_ii)
            if rows_i.size:
                sub = block[rows_i]
                type_i_feedback(sub, lit, cfg.s, cfg.num_states, rng, outputs=out[rows_i])
                block[rows_i] = sub
            if rows_ii.size:
                sub = block[rows_ii]
                type_ii_feedback(sub, lit, cfg.num_states, outputs=out[rows_ii])
                block[rows_ii] = sub

    def fit(
        self,
        X,
        y,
        epochs: int = 1,
        seed: int | None = None,
        shuffle: bool = True,
        callback=None,
    ) -> "TsetlinMachine":
        """Train in place for ``epochs`` passes and return ``self``.

        Samples are processed one at a time in a seeded order, so the result is
        bit-identical for a given seed. ``callback(epoch, model)`` runs after
        each epoch.
        """
        X = self._check_input(X)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError("training data is empty")
        if len(y) != len(X):
            raise ValueError("X and y have different lengths")
        if y.min() < 0 or y.max() >= self.config.num_classes:
            raise ValueError("labels out of range")
        if epochs < 0:
            raise ValueError("epochs must be non-negative")
        rng = np.random.default_rng(self.config.seed if seed is None else seed)
        lits = literals_of(X)
        for epoch in range(epochs):
            order = rng.permutation(len(X)) if shuffle else np.arange(len(X))
            for i in order:
                self._update(lits[i], int(y[i]), rng)
            if callback is not None:
                callback(epoch, self)
        return self

    def accuracy(self, X, y) -> float:
        y = np.asarray(y)
        if len(y) == 0:
            raise ValueError("cannot score an empty dataset")
        return float(np.mean(self.predict(X) == y))


def class_score(model: TsetlinMachine, x, class_index: int, clip: bool = True) -> int:
    if not 0 <= class_index < model.config.num_classes:
        raise IndexError(f"class {class_index} out of range")
    return int(model.class_scores(x, clip=clip)[class_index])


def predict(model: TsetlinMachine, x) -> int:
    return model.predict(x)


def clause_literals(model: TsetlinMachine, clause_id: int, vocab=None):
    """Included original and negated literals of a clause, in index order.

    Returns feature indices, or words when ``vocab`` is given.
    """
    c = model.clause(clause_id)
    if vocab is None:
        return list(c.include_original), list(c.include_negated)
    return [vocab.words[k] for k in c.include_original], [vocab.words[k] for k in c.include_negated]


def fit(model: TsetlinMachine, data: Iterable[tuple[Sequence[int], int]], epochs: int, seed=None):
    """Functional wrapper: train a copy of ``model`` on ``(x, label)`` pairs."""
    pairs = list(data)
    if not pairs:
        raise ValueError("training data is empty")
    X = np.array([p[0] for p in pairs], dtype=np.uint8)
    y = np.array([p[1] for p in pairs], dtype=np.int64)
    return model.copy().fit(X, y, epochs=epochs, seed=seed)

"""Model and data builders shared by the test modules."""

import time

import numpy as np

from tmprune import synthetic
from tmprune.machine import ModelConfig, TsetlinMachine
from tmprune.text import Vocabulary, build_vocabulary

# Hyperparameters of the synthetic benchmark.
SYNTH_CLAUSES = 200
SYNTH_T = 20
SYNTH_S = 5.0
SYNTH_EPOCHS = 20
SYNTH_SEEDS = (42, 43, 44, 45, 46)


def random_model(rng, num_classes=2, alpha=4, n=8, p_include=0.2, num_states=256):
    """Model with random states; each automaton includes with ``p_include``."""
    cfg = ModelConfig(num_classes, alpha, num_states=num_states, T=max(1, alpha // 2), seed=0)
    half = num_states // 2
    shape = (num_classes * alpha, 2 * n)
    include = rng.random(shape) < p_include
    states = np.where(include, rng.integers(half, num_states, shape), rng.integers(0, half, shape))
    return TsetlinMachine(cfg, n, states=states)


def word_vocab(n):
    return Vocabulary(tuple(f"w{k}" for k in range(n)))


class SyntheticRun:
    """A synthetic dataset split plus a model trained on it."""

    def __init__(self, seed, epochs=SYNTH_EPOCHS):
        data = synthetic.generate(seed=seed)
        self.train, self.test = synthetic.train_test_split(data)
        self.vocab = build_vocabulary([d.tokens for d in self.train])
        self.X_train, self.y_train = self.train.vectorize(self.vocab)
        self.X_test, self.y_test = self.test.vectorize(self.vocab)
        cfg = ModelConfig(2, SYNTH_CLAUSES, T=SYNTH_T, s=SYNTH_S, seed=seed)
        self.model = TsetlinMachine(cfg, len(self.vocab), self.vocab.fingerprint)
        start = time.perf_counter()
        self.model.fit(self.X_train, self.y_train, epochs=epochs)
        self.train_seconds = time.perf_counter() - start


_RUNS = {}


def synthetic_run(seed) -> SyntheticRun:
    if seed not in _RUNS:
        _RUNS[seed] = SyntheticRun(seed)
    return _RUNS[seed]

"""Tsetlin Machine text classification with frequency-based literal pruning
and perturbation-based token attention maps."""

from .evaluation import accuracy, pair_sim, pair_sim_sufficiency, pairwise_table, sim_measure
from .explain import AttentionMap, comprehensiveness, model_confidence, sufficiency, tam, tams
from .machine import ModelConfig, TsetlinMachine, class_score, clause_literals, evaluate_clause, predict
from .persistence import load_model, save_model
from .pruning import PruneReport, literal_frequencies, prune, prune_sweep, rank_literals
from .text import Dataset, Document, Vocabulary, build_vocabulary, load_dataset, save_dataset, tokenize, vectorize

__version__ = "0.1.0"

__all__ = [
    "AttentionMap",
    "Dataset",
    "Document",
    "ModelConfig",
    "PruneReport",
    "TsetlinMachine",
    "Vocabulary",
    "accuracy",
    "build_vocabulary",
    "class_score",
    "clause_literals",
    "comprehensiveness",
    "evaluate_clause",
    "literal_frequencies",
    "load_dataset",
    "load_model",
    "model_confidence",
    "pair_sim",
    "pair_sim_sufficiency",
    "pairwise_table",
    "predict",
    "prune",
    "prune_sweep",
    "rank_literals",
    "save_dataset",
    "save_model",
    "sim_measure",
    "sufficiency",
    "tam",
    "tams",
    "tokenize",
    "vectorize",
]

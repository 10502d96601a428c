"""k-NN node classification with cross-validated macro/micro F1 scores.

Queries are classified by their nearest training nodes in Euclidean distance
on the input vectors. For multi-label truth the number of labels per test
node is given and the top-scoring labels are returned, the standard protocol
for embedding evaluation. Macro-F1 averages per-label F1 over the whole
label universe (labels absent from both truth and predictions contribute 0);
micro-F1 pools true/false positive/negative counts across labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError
from .graph import LabelAssignment
from .sgns import EmbeddingMatrix

__all__ = ["F1Report", "knn_predict", "macro_micro_f1", "cross_validate"]


@dataclass
class F1Report:
    macro_f1: float
    micro_f1: float
    per_fold: list[tuple[float, float]]
    k_nn: int
    folds: int

    def to_json(self, settings: Mapping | None = None) -> str:
        doc = {
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "per_fold": [{"macro_f1": m, "micro_f1": mi} for m, mi in self.per_fold],
            "k_nn": self.k_nn,
            "folds": self.folds,
        }
        if settings is not None:
            doc["settings"] = dict(settings)
        return json.dumps(doc, indent=2, sort_keys=True)


def knn_predict(
    emb: EmbeddingMatrix,
    train_ids: Iterable[int],
    truth: LabelAssignment,
    query: int,
    k_nn: int,
    label_count: int,
) -> frozenset[int]:
    """Labels of ``query`` voted by its k nearest training nodes.

    Neighbor ties at equal distance go to the lower node id; label-score
    ties go to the lower label id. Returns the ``label_count`` top labels.
    """
    train = np.fromiter(sorted(train_ids), dtype=np.int64)
    if query in train:
        raise ValidationError(f"query node {query} is in the training set")
    if k_nn > train.size:
        raise ValidationError(f"k_nn={k_nn} exceeds training set size {train.size}")
    vectors = emb.input_vectors
    dist = np.linalg.norm(vectors[train] - vectors[query], axis=1)
    order = np.lexsort((train, dist))[:k_nn]
    scores = np.zeros(truth.label_count, dtype=np.int64)
    for t in train[order]:
        for lab in truth.actual_labels[int(t)]:
            scores[lab] += 1
    ranked = np.lexsort((np.arange(truth.label_count), -scores))
    return frozenset(int(lab) for lab in ranked[:label_count])


def macro_micro_f1(
    predictions: Mapping[int, frozenset[int]],
    truth: Mapping[int, frozenset[int]],
    label_universe: Iterable[int],
) -> tuple[float, float]:
    """Per-label-averaged and globally-pooled F1 of predicted label sets."""
    if set(predictions) != set(truth):
        raise ValidationError("predictions and truth must cover the same nodes")
    labels = list(label_universe)
    tp = np.zeros(len(labels), dtype=np.int64)
    fp = np.zeros(len(labels), dtype=np.int64)
    fn = np.zeros(len(labels), dtype=np.int64)
    for node, pred in predictions.items():
        actual = truth[node]
        for i, lab in enumerate(labels):
            p, a = lab in pred, lab in actual
            if p and a:
                tp[i] += 1
            elif p:
                fp[i] += 1
            elif a:
                fn[i] += 1
    denom = 2 * tp + fp + fn
    per_label = np.divide(2 * tp, denom, out=np.zeros(len(labels)), where=denom > 0)
    macro = float(per_label.mean()) if labels else 0.0
    pooled = 2 * tp.sum() + fp.sum() + fn.sum()
    micro = float(2 * tp.sum() / pooled) if pooled > 0 else 0.0
    return macro, micro


def cross_validate(
    emb: EmbeddingMatrix,
    truth: LabelAssignment,
    eligible: Iterable[int],
    folds: int,
    k_nn: int,
    seed: int,
) -> F1Report:
    """k-fold cross-validation of k-NN classification over ``eligible``.

    Nodes are shuffled deterministically by seed and split into near-equal
    folds; each fold is scored with the remaining folds as the training set.
    Each query is asked for exactly as many labels as its ground truth holds.
    """
    nodes = sorted(eligible)
    if len(nodes) < folds:
        raise ValidationError(f"{len(nodes)} eligible nodes cannot fill {folds} folds")
    for u in nodes:
        if u not in truth.actual_labels:
            raise ValidationError(f"eligible node {u} has no ground-truth labels")
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    order = rng.permutation(len(nodes))
    fold_members = np.array_split(np.array(nodes, dtype=np.int64)[order], folds)

    label_ids = range(truth.label_count)
    per_fold = []
    for f, members in enumerate(fold_members):
        train = set(nodes) - set(int(u) for u in members)
        if not train:
            raise ValidationError(f"fold {f} leaves an empty training set")
        predictions = {
            int(u): knn_predict(emb, train, truth, int(u), k_nn, len(truth.actual_labels[int(u)]))
            for u in members
        }
        fold_truth = {int(u): truth.actual_labels[int(u)] for u in members}
        per_fold.append(macro_micro_f1(predictions, fold_truth, label_ids))
    macro = float(np.mean([m for m, _ in per_fold]))
    micro = float(np.mean([mi for _, mi in per_fold]))
    return F1Report(macro, micro, per_fold, k_nn, folds)

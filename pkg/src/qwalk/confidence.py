"""Label-confidence propagation over k-hop neighborhoods.

Confidence values estimate, per (node, label), how strongly an unlabelled
node carries a label. Visible labelled nodes are pinned to their indicator
rows; every other node repeatedly takes the arithmetic mean of its
neighborhood's rows from the previous iteration. Updates are synchronous:
iteration t reads only iteration t-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import ValidationError
from .graph import Graph, LabelAssignment, LabelledSplit, all_k_hop_neighborhoods

__all__ = [
    "ConfidenceMatrix",
    "init_confidence",
    "step_confidence",
    "learn_confidence",
    "write_confidence_csv",
]


@dataclass
class ConfidenceMatrix:
    """Dense (node x label) confidence values in [0, 1].

    ``iteration`` counts applied propagation steps; rows of visible labelled
    nodes stay exactly their indicator vectors across iterations.
    """

    values: np.ndarray
    iteration: int

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    @property
    def label_count(self) -> int:
        return self.values.shape[1]


def init_confidence(g: Graph, labels: LabelAssignment, split: LabelledSplit) -> ConfidenceMatrix:
    """Indicator rows for visible labelled nodes, zero rows elsewhere."""
    for u in split.visible:
        if u not in labels.actual_labels:
            raise ValidationError(f"visible node {u} has no ground-truth labels")
    values = np.zeros((g.node_count, labels.label_count), dtype=np.float64)
    for u in split.visible:
        for lab in labels.actual_labels[u]:
            values[u, lab] = 1.0
    return ConfidenceMatrix(values, iteration=0)


def step_confidence(
    c: ConfidenceMatrix,
    g: Graph,
    split: LabelledSplit,
    hops: int,
    neighborhoods: list[np.ndarray] | None = None,
) -> ConfidenceMatrix:
    """One synchronous propagation step.

    Non-visible rows become the mean of their within-``hops`` neighborhood's
    previous rows; a node with an empty neighborhood keeps its previous row
    (the mean is undefined there, and keeping the row preserves boundedness).
    Visible rows are copied unchanged. ``neighborhoods`` may be supplied to
    reuse precomputed within-``hops`` neighborhoods.
    """
    if neighborhoods is None:
        neighborhoods = all_k_hop_neighborhoods(g, hops)
    old = c.values
    new = old.copy()
    for u in range(g.node_count):
        if u in split.visible:
            continue
        nbrs = neighborhoods[u]
        if nbrs.size:
            new[u] = old[nbrs].mean(axis=0)
    return ConfidenceMatrix(new, iteration=c.iteration + 1)


def learn_confidence(
    g: Graph,
    labels: LabelAssignment,
    split: LabelledSplit,
    hops: int,
    iterations: int,
) -> ConfidenceMatrix:
    """Initialize and run ``iterations`` synchronous propagation steps."""
    if iterations < 0:
        raise ValidationError(f"iterations must be >= 0, got {iterations}")
    c = init_confidence(g, labels, split)
    if iterations == 0:
        return c
    neighborhoods = all_k_hop_neighborhoods(g, hops)
    for _ in range(iterations):
        c = step_confidence(c, g, split, hops, neighborhoods)
    return c


def write_confidence_csv(c: ConfidenceMatrix, labels: LabelAssignment, g: Graph, out: IO[str]):
    """Dump the matrix as CSV: node id token, then one column per label."""
    out.write("node," + ",".join(labels.label_universe) + "\n")
    for u in range(c.node_count):
        row = ",".join(repr(x) for x in c.values[u])
        out.write(f"{g.node_ids[u]},{row}\n")

"""Walk corpus container, per-walk random streams, and text serialization.

Every corpus generator in this package walks the same contract: a fixed
number of walks per start node, each walk driven by its own random stream
derived from ``(seed, start node, walk index)``. That makes corpora
reproducible for a fixed seed and independent of the order in which walks
are actually produced, so generation may be parallelized across start nodes
without changing the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ValidationError
from .graph import Graph

__all__ = ["WalkCorpus", "walk_rng", "corpus_from_policy"]

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass
class WalkCorpus:
    """Node-id walk sequences plus the settings that produced them."""

    walks: list[list[int]]
    walks_per_node: int
    walk_length: int

    def __iter__(self):
        return iter(self.walks)

    def __len__(self) -> int:
        return len(self.walks)

    @property
    def token_count(self) -> int:
        return sum(len(w) for w in self.walks)

    def node_frequencies(self, node_count: int) -> np.ndarray:
        """Occurrence count of every node id across all walks."""
        counts = np.zeros(node_count, dtype=np.int64)
        for walk in self.walks:
            np.add.at(counts, walk, 1)
        return counts

    def to_text(self, node_ids: list[str] | None = None) -> str:
        """One walk per line, space-separated ids (original tokens if given)."""
        if node_ids is None:
            lines = (" ".join(str(u) for u in walk) for walk in self.walks)
        else:
            lines = (" ".join(node_ids[u] for u in walk) for walk in self.walks)
        return "\n".join(lines) + ("\n" if self.walks else "")

    @classmethod
    def from_text(cls, text: str, walks_per_node: int, walk_length: int) -> "WalkCorpus":
        walks = [[int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()]
        return cls(walks, walks_per_node, walk_length)


def walk_rng(seed: int, node: int, walk_index: int) -> np.random.Generator:
    """Independent random stream for one walk, stable across run layouts."""
    return np.random.default_rng(np.random.SeedSequence((seed & _SEED_MASK, node, walk_index)))


def corpus_from_policy(
    g: Graph,
    walks_per_node: int,
    walk_length: int,
    seed: int,
    walk_fn: Callable[[int, np.random.Generator], list[int]],
) -> WalkCorpus:
    """Run ``walk_fn(start, rng)`` for every (node, walk index) pair.

    Walks are ordered by start node, then walk index.
    """
    if walks_per_node < 1:
        raise ValidationError(f"walks per node must be >= 1, got {walks_per_node}")
    if walk_length < 1:
        raise ValidationError(f"walk length must be >= 1, got {walk_length}")
    walks = []
    for u in range(g.node_count):
        for i in range(walks_per_node):
            walks.append(walk_fn(u, walk_rng(seed, u, i)))
    return WalkCorpus(walks, walks_per_node, walk_length)

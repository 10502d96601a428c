"""Baseline walk policies: uniform and second-order biased sampling.

The biased policy reweights each candidate step by where it leads relative
to the previous node: returning to it is scaled by ``1/return_param``,
moving to one of its neighbors keeps the edge weight, and moving further
away is scaled by ``1/inout_param``. With both parameters at 1 every factor
collapses and the walk is a plain uniform-neighbor walk, which serves as the
unbiased baseline. Transition distributions are computed on the fly per
step; no alias tables are precomputed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import WalkCorpus, corpus_from_policy
from .errors import ValidationError
from .graph import Graph

__all__ = ["BiasParams", "step_distribution", "biased_walk", "baseline_corpus"]


@dataclass(frozen=True)
class BiasParams:
    """Return / in-out bias parameters; both must be strictly positive."""

    return_param: float = 1.0
    inout_param: float = 1.0

    def __post_init__(self):
        if self.return_param <= 0 or self.inout_param <= 0:
            raise ValidationError(
                f"bias parameters must be positive, got "
                f"({self.return_param}, {self.inout_param})"
            )


def step_distribution(g: Graph, prev: int, cur: int, params: BiasParams) -> np.ndarray:
    """Transition probabilities over ``cur``'s out-edges given ``prev``.

    Each neighbor x of cur gets unnormalized mass
    ``weight(cur, x) * (1/return_param if x == prev; 1 if x is an
    out-neighbor of prev; 1/inout_param otherwise)``.
    """
    prev_nbrs = g.neighbor_sets[prev]
    mass = np.empty(g.out_degree(cur), dtype=np.float64)
    for i, (x, w) in enumerate(g.adjacency[cur]):
        if x == prev:
            mass[i] = w / params.return_param
        elif x in prev_nbrs:
            mass[i] = w
        else:
            mass[i] = w / params.inout_param
    return mass / mass.sum()


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; one uniform number per step."""
    cum = np.cumsum(probs)
    return min(int(np.searchsorted(cum, rng.random(), side="right")), probs.size - 1)


def biased_walk(
    g: Graph, start: int, walk_length: int, params: BiasParams, rng: np.random.Generator
) -> list[int]:
    """Second-order biased walk; first step uniform, truncates at sinks."""
    if walk_length < 1:
        raise ValidationError(f"walk length must be >= 1, got {walk_length}")
    walk = [start]
    while len(walk) < walk_length:
        cur = walk[-1]
        deg = g.out_degree(cur)
        if deg == 0:
            break
        if len(walk) == 1:
            probs = np.full(deg, 1.0 / deg)
        else:
            probs = step_distribution(g, walk[-2], cur, params)
        walk.append(g.adjacency[cur][_sample(probs, rng)][0])
    return walk


def baseline_corpus(
    g: Graph, walks_per_node: int, walk_length: int, params: BiasParams, seed: int
) -> WalkCorpus:
    """``walks_per_node`` biased walks from every node, seed-deterministic."""
    return corpus_from_policy(
        g,
        walks_per_node,
        walk_length,
        seed,
        lambda u, rng: biased_walk(g, u, walk_length, params, rng),
    )

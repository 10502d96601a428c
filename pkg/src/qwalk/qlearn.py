"""Tabular Q-learning over the graph and Q-guided walk generation.

The graph is treated as a deterministic decision process: states are nodes,
actions are out-edges, and taking an edge always reaches its head. Moving
from ``u`` to ``u2`` earns the negative L1 distance between the two nodes'
confidence rows, so edges between label-similar nodes earn rewards close to
zero. Q-values are trained by full deterministic sweeps over all node-action
pairs, then drive walks that exploit the best-valued edge with probability
``exploit_prob`` and otherwise step to a uniformly random out-neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .confidence import ConfidenceMatrix
from .corpus import WalkCorpus, corpus_from_policy
from .errors import ValidationError
from .graph import Graph

__all__ = [
    "QTable",
    "reward",
    "edge_rewards",
    "init_q",
    "q_epoch",
    "train_q",
    "choose_action",
    "greedy_heads",
    "generate_walk",
    "generate_corpus",
]


@dataclass
class QTable:
    """Per-(node, out-edge) action values in the graph's edge order.

    ``values`` is flat and aligned with the graph's CSR edge sequence;
    ``action_values(u)`` views the slice for node ``u``. ``learning_rate``
    holds the rate as of the current epoch: the sweep advancing the table
    from epoch j-1 to j consumes the stored rate (so the first sweep uses
    the initial rate) and then divides it by ``1 + j``.
    """

    values: np.ndarray
    indptr: np.ndarray
    epoch: int
    learning_rate: float
    discount: float

    def action_values(self, u: int) -> np.ndarray:
        return self.values[self.indptr[u] : self.indptr[u + 1]]


def reward(c: ConfidenceMatrix, u: int, u2: int) -> float:
    """Negative L1 distance between the confidence rows of ``u2`` and ``u``.

    Always <= 0; equals 0 exactly when the rows are identical.
    """
    return -float(np.abs(c.values[u2] - c.values[u]).sum())


def edge_rewards(c: ConfidenceMatrix, g: Graph) -> np.ndarray:
    """Reward of every edge, flat and aligned with the graph's CSR order."""
    indptr, heads, _ = g.csr()
    tails = np.repeat(np.arange(g.node_count), np.diff(indptr))
    return -np.abs(c.values[heads] - c.values[tails]).sum(axis=1)


def init_q(g: Graph, alpha0: float, discount: float) -> QTable:
    """All-zero table at epoch 0 with the initial learning rate."""
    if alpha0 <= 0:
        raise ValidationError(f"initial learning rate must be positive, got {alpha0}")
    if not 0 <= discount <= 1:
        raise ValidationError(f"discount must be in [0, 1], got {discount}")
    indptr, _, _ = g.csr()
    return QTable(
        values=np.zeros(indptr[-1], dtype=np.float64),
        indptr=indptr,
        epoch=0,
        learning_rate=float(alpha0),
        discount=float(discount),
    )


@njit(cache=True)
def _sweep(values, indptr, heads, rewards, alpha, discount):
    """One in-place sweep over all node-action pairs in ascending order."""
    n = indptr.shape[0] - 1
    for u in range(n):
        for e in range(indptr[u], indptr[u + 1]):
            v = heads[e]
            best = 0.0
            s, t = indptr[v], indptr[v + 1]
            if t > s:
                best = values[s]
                for i in range(s + 1, t):
                    if values[i] > best:
                        best = values[i]
            values[e] += alpha * (rewards[e] + discount * best - values[e])


def q_epoch(
    q: QTable, g: Graph, c: ConfidenceMatrix, rewards: np.ndarray | None = None
) -> QTable:
    """Advance the table by one epoch.

    Runs one full sweep applying the update
    ``Q(u,a) += alpha * (R(u,a,u') + discount * max_a' Q(u',a') - Q(u,a))``
    to every node-action pair in ascending (node, edge) order, in place, with
    the max over a sink's empty action set taken as 0. The sweep uses the
    rate stored on the incoming table; afterwards the rate is divided by
    ``1 + j`` where ``j`` is the new epoch number.
    """
    if rewards is None:
        rewards = edge_rewards(c, g)
    _, heads, _ = g.csr()
    values = q.values.copy()
    _sweep(values, q.indptr, heads, rewards, q.learning_rate, q.discount)
    epoch = q.epoch + 1
    return QTable(values, q.indptr, epoch, q.learning_rate / (1 + epoch), q.discount)


def train_q(g: Graph, c: ConfidenceMatrix, alpha0: float, discount: float, epochs: int) -> QTable:
    """Fresh table advanced by ``epochs`` sweeps; fully deterministic."""
    if epochs < 1:
        raise ValidationError(f"epochs must be >= 1, got {epochs}")
    q = init_q(g, alpha0, discount)
    rewards = edge_rewards(c, g)
    for _ in range(epochs):
        q = q_epoch(q, g, c, rewards)
    return q


def _greedy_head(q: QTable, g: Graph, u: int, lookahead: bool) -> int:
    """Head of the best out-edge of ``u``; ties go to the lowest edge index.

    With ``lookahead`` the edges are scored by the best action value at the
    edge's head (0 at sinks) instead of by their own action value.
    """
    if lookahead:
        scores = np.array(
            [av.max() if (av := q.action_values(v)).size else 0.0 for v in g.neighbors(u)]
        )
        return g.adjacency[u][int(np.argmax(scores))][0]
    return g.adjacency[u][int(np.argmax(q.action_values(u)))][0]


def greedy_heads(q: QTable, g: Graph, lookahead: bool = False) -> np.ndarray:
    """Per-node greedy successor (-1 at sinks), precomputed for walk speed."""
    heads = np.full(g.node_count, -1, dtype=np.int64)
    for u in range(g.node_count):
        if g.out_degree(u):
            heads[u] = _greedy_head(q, g, u, lookahead)
    return heads


def choose_action(
    q: QTable,
    g: Graph,
    u: int,
    exploit_prob: float,
    rng: np.random.Generator,
    lookahead: bool = False,
    _greedy: np.ndarray | None = None,
) -> int | None:
    """Pick the next node from ``u``, or None when ``u`` has no out-edges.

    Draws one uniform number; at or below ``exploit_prob`` the greedy edge is
    taken, otherwise a uniformly random out-neighbor.
    """
    deg = g.out_degree(u)
    if deg == 0:
        return None
    if rng.random() <= exploit_prob:
        if _greedy is not None:
            return int(_greedy[u])
        return _greedy_head(q, g, u, lookahead)
    return g.adjacency[u][int(rng.integers(deg))][0]


def generate_walk(
    q: QTable,
    g: Graph,
    start: int,
    walk_length: int,
    exploit_prob: float,
    rng: np.random.Generator,
    lookahead: bool = False,
    _greedy: np.ndarray | None = None,
) -> list[int]:
    """Q-guided walk from ``start``; truncates early at out-edge-less nodes."""
    if walk_length < 1:
        raise ValidationError(f"walk length must be >= 1, got {walk_length}")
    walk = [start]
    while len(walk) < walk_length:
        nxt = choose_action(q, g, walk[-1], exploit_prob, rng, lookahead, _greedy)
        if nxt is None:
            break
        walk.append(nxt)
    return walk


def generate_corpus(
    q: QTable,
    g: Graph,
    walks_per_node: int,
    walk_length: int,
    exploit_prob: float,
    seed: int,
    lookahead: bool = False,
) -> WalkCorpus:
    """``walks_per_node`` Q-guided walks from every node, seed-deterministic."""
    greedy = greedy_heads(q, g, lookahead)
    return corpus_from_policy(
        g,
        walks_per_node,
        walk_length,
        seed,
        lambda u, rng: generate_walk(q, g, u, walk_length, exploit_prob, rng, lookahead, greedy),
    )

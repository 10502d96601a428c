"""Independent brute-force oracles used to pin expected values in tests.

Everything here is deliberately written with plain Python containers and
loops, separate from the package's vectorized implementations.
"""

from __future__ import annotations

import numpy as np

from qwalk.graph import Graph


def random_graph(rng: np.random.Generator, max_nodes: int = 50, directed: bool | None = None,
                 edge_prob: float | None = None) -> Graph:
    """Random simple graph for property tests."""
    n = int(rng.integers(2, max_nodes + 1))
    if directed is None:
        directed = bool(rng.integers(2))
    if edge_prob is None:
        edge_prob = float(rng.uniform(0.02, 0.25))
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < edge_prob:
                edges.append((u, v, 1.0))
    return Graph.from_edges(edges, directed, n)


def bfs_within_k(g: Graph, start: int, k: int) -> set[int]:
    """Plain level-by-level BFS over out-edges, excluding the start node."""
    dist = {start: 0}
    frontier = [start]
    found = set()
    for depth in range(1, k + 1):
        nxt = []
        for u in frontier:
            for v, _ in g.adjacency[u]:
                if v not in dist:
                    dist[v] = depth
                    found.add(v)
                    nxt.append(v)
        frontier = nxt
    return found


def naive_confidence(g: Graph, node_labels: dict[int, set[int]], visible: set[int],
                     label_count: int, hops: int, iters: int,
                     order: list[int] | None = None) -> list[list[float]]:
    """Direct two-buffer evaluation of the confidence recurrence.

    ``order`` optionally permutes the node processing order to demonstrate
    that the synchronous update is order-independent.
    """
    rows = [[0.0] * label_count for _ in range(g.node_count)]
    for u in visible:
        for lab in node_labels[u]:
            rows[u][lab] = 1.0
    hoods = {u: sorted(bfs_within_k(g, u, hops)) for u in range(g.node_count)}
    nodes = list(range(g.node_count)) if order is None else list(order)
    for _ in range(iters):
        new = [row[:] for row in rows]
        for u in nodes:
            if u in visible:
                continue
            nbrs = hoods[u]
            if not nbrs:
                continue
            for lab in range(label_count):
                new[u][lab] = sum(rows[x][lab] for x in nbrs) / len(nbrs)
        rows = new
    return rows


def l1_reward(row_from: list[float], row_to: list[float]) -> float:
    return -sum(abs(b - a) for a, b in zip(row_from, row_to))

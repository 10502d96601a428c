"""Graph container, edge-list / label-file parsing, and labelled-node splits.

Node ids in input files may be arbitrary tokens (integers or strings); they
are remapped to a dense 0..n-1 space in first-appearance order and the
original tokens are kept on the graph so outputs can be written back in the
input's id space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "Graph",
    "LabelAssignment",
    "LabelledSplit",
    "parse_edge_list",
    "parse_labels",
    "k_hop_neighborhood",
    "all_k_hop_neighborhoods",
    "split_labelled",
]


@dataclass
class Graph:
    """Immutable simple graph over dense integer node ids.

    ``adjacency[u]`` is the ordered list of ``(neighbor, weight)`` out-edges
    of ``u``. Undirected graphs store both directions with equal weight.
    Self-loops are dropped and duplicate edges collapse to their first
    occurrence at construction time. Instances are treated as read-only and
    are safe to share across workers.
    """

    node_count: int
    directed: bool
    adjacency: list[list[tuple[int, float]]]
    node_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.node_ids:
            self.node_ids = [str(u) for u in range(self.node_count)]

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, float]],
        directed: bool,
        node_count: int,
        node_ids: list[str] | None = None,
    ) -> "Graph":
        """Build a graph from (u, v, weight) triples in dense id space.

        Self-loops are ignored. A repeated edge (for undirected graphs,
        either orientation) keeps the weight of its first occurrence.
        """
        adjacency: list[list[tuple[int, float]]] = [[] for _ in range(node_count)]
        seen: set[tuple[int, int]] = set()
        for u, v, w in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValidationError(f"edge ({u}, {v}) references a node id >= {node_count}")
            if w <= 0:
                raise ValidationError(f"edge ({u}, {v}) has non-positive weight {w}")
            if u == v:
                continue
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            adjacency[u].append((v, float(w)))
            if not directed:
                adjacency[v].append((u, float(w)))
        return cls(node_count, directed, adjacency, list(node_ids) if node_ids else [])

    @property
    def edge_count(self) -> int:
        """Number of stored directed arcs (undirected edges count twice)."""
        return sum(len(nbrs) for nbrs in self.adjacency)

    def out_degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def neighbors(self, u: int) -> list[int]:
        return [v for v, _ in self.adjacency[u]]

    @cached_property
    def neighbor_sets(self) -> list[frozenset[int]]:
        return [frozenset(v for v, _ in nbrs) for nbrs in self.adjacency]

    @cached_property
    def node_index(self) -> dict[str, int]:
        """Original id token -> dense node id."""
        return {tok: u for u, tok in enumerate(self.node_ids)}

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat adjacency as (indptr, heads, weights), edge order preserved."""
        return self._csr

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        for u, nbrs in enumerate(self.adjacency):
            indptr[u + 1] = indptr[u] + len(nbrs)
        heads = np.empty(indptr[-1], dtype=np.int64)
        weights = np.empty(indptr[-1], dtype=np.float64)
        pos = 0
        for nbrs in self.adjacency:
            for v, w in nbrs:
                heads[pos] = v
                weights[pos] = w
                pos += 1
        return indptr, heads, weights

    def to_edge_list(self) -> str:
        """Serialize back to edge-list text using the original id tokens.

        Undirected edges are emitted once (at their lower dense endpoint);
        unit weights are omitted. Re-parsing the output with the same
        directedness reproduces this graph exactly.
        """
        lines = []
        for u, nbrs in enumerate(self.adjacency):
            for v, w in nbrs:
                if not self.directed and v < u:
                    continue
                if w == 1.0:
                    lines.append(f"{self.node_ids[u]} {self.node_ids[v]}")
                else:
                    lines.append(f"{self.node_ids[u]} {self.node_ids[v]} {w!r}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class LabelAssignment:
    """Ground-truth labels: a label universe plus per-node label sets.

    ``label_universe`` lists the original label tokens; a label's dense id is
    its position. Nodes absent from ``actual_labels`` are unlabelled.
    """

    label_universe: list[str]
    actual_labels: dict[int, frozenset[int]]

    @property
    def label_count(self) -> int:
        return len(self.label_universe)

    @cached_property
    def labelled_nodes(self) -> list[int]:
        return sorted(self.actual_labels)

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.label_universe)}


@dataclass(frozen=True)
class LabelledSplit:
    """Partition of nodes into label-visible and label-hidden sets.

    ``visible`` nodes expose their true labels to downstream learning;
    ``hidden`` holds the remaining nodes (withheld labelled nodes plus, when
    the graph's node count is supplied at split time, genuinely unlabelled
    ones).
    """

    visible: frozenset[int]
    hidden: frozenset[int]
    ratio: float


def _tokenize(text: str):
    """Yield (line_number, tokens) for non-empty, non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def parse_edge_list(text: str, directed: bool) -> Graph:
    """Parse whitespace-separated edge-list text into a Graph.

    Each line is ``u v`` or ``u v w`` with a positive real weight (default
    1.0). ``#``-prefixed lines and blank lines are ignored. Self-loops are
    dropped, duplicate edges collapse to the first occurrence, and undirected
    input is symmetrized.
    """
    index: dict[str, int] = {}
    tokens_in_order: list[str] = []

    def intern(tok: str) -> int:
        if tok not in index:
            index[tok] = len(tokens_in_order)
            tokens_in_order.append(tok)
        return index[tok]

    edges: list[tuple[int, int, float]] = []
    for lineno, toks in _tokenize(text):
        if len(toks) not in (2, 3):
            raise ParseError(f"expected 'u v' or 'u v w', got {len(toks)} fields", lineno)
        w = 1.0
        if len(toks) == 3:
            try:
                w = float(toks[2])
            except ValueError:
                raise ParseError(f"bad weight {toks[2]!r}", lineno) from None
            if not np.isfinite(w) or w <= 0:
                raise ValidationError(f"line {lineno}: weight must be positive, got {toks[2]}")
        u = intern(toks[0])
        v = intern(toks[1])
        edges.append((u, v, w))
    return Graph.from_edges(edges, directed, len(tokens_in_order), tokens_in_order)


def parse_labels(text: str, node_index: Mapping[str, int] | None = None) -> LabelAssignment:
    """Parse label-file text: first token a node id, remaining tokens labels.

    Label ids are assigned in first-appearance order. When ``node_index`` is
    given (e.g. from a parsed graph), node tokens are mapped through it and
    unknown tokens are rejected; otherwise node tokens must be integers.
    Repeated lines for one node merge their label sets.
    """
    universe: list[str] = []
    label_ids: dict[str, int] = {}
    assigned: dict[int, set[int]] = {}
    for lineno, toks in _tokenize(text):
        if len(toks) < 2:
            raise ValidationError(f"line {lineno}: labels require >=1 label token")
        tok = toks[0]
        if node_index is not None:
            if tok not in node_index:
                raise ValidationError(f"line {lineno}: node id {tok!r} not present in the graph")
            node = node_index[tok]
        else:
            try:
                node = int(tok)
            except ValueError:
                raise ParseError(f"bad node id {tok!r}", lineno) from None
            if node < 0:
                raise ValidationError(f"line {lineno}: node id must be non-negative")
        for lab in toks[1:]:
            if lab not in label_ids:
                label_ids[lab] = len(universe)
                universe.append(lab)
            assigned.setdefault(node, set()).add(label_ids[lab])
    return LabelAssignment(universe, {u: frozenset(s) for u, s in assigned.items()})


def k_hop_neighborhood(g: Graph, u: int, k: int) -> set[int]:
    """Nodes within shortest-path distance 1..k of ``u`` along out-edges.

    ``u`` itself is excluded. Distances follow outgoing edges, so a directed
    sink has an empty neighborhood for every ``k``.
    """
    if not 0 <= u < g.node_count:
        raise IndexError(f"node {u} out of range for graph with {g.node_count} nodes")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    reached = {u}
    frontier = [u]
    result: set[int] = set()
    for _ in range(k):
        nxt = []
        for x in frontier:
            for v, _ in g.adjacency[x]:
                if v not in reached:
                    reached.add(v)
                    result.add(v)
                    nxt.append(v)
        if not nxt:
            break
        frontier = nxt
    return result


def all_k_hop_neighborhoods(g: Graph, k: int) -> list[np.ndarray]:
    """Per-node within-k neighborhoods as sorted index arrays."""
    return [
        np.fromiter(sorted(k_hop_neighborhood(g, u, k)), dtype=np.int64)
        for u in range(g.node_count)
    ]


def split_labelled(
    labels: LabelAssignment,
    visible_fraction: float,
    seed: int,
    node_count: int | None = None,
) -> LabelledSplit:
    """Uniformly choose a visible subset of the labelled nodes.

    ``round(visible_fraction * |labelled|)`` labelled nodes become visible;
    the rest are hidden. When ``node_count`` is given, nodes with no labels
    at all are also placed in ``hidden`` so that visible and hidden together
    cover the whole graph. Deterministic for a fixed seed.
    """
    if not 0 < visible_fraction <= 1:
        raise ValidationError(f"visible fraction must be in (0, 1], got {visible_fraction}")
    labelled = labels.labelled_nodes
    if not labelled:
        raise ValidationError("label assignment is empty")
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    order = rng.permutation(len(labelled))
    n_visible = int(round(visible_fraction * len(labelled)))
    n_visible = min(max(n_visible, 1), len(labelled))
    visible = frozenset(labelled[i] for i in order[:n_visible])
    hidden = set(labelled) - visible
    if node_count is not None:
        hidden |= set(range(node_count)) - set(labelled)
    return LabelledSplit(visible, frozenset(hidden), visible_fraction)

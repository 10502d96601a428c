"""Skip-gram with negative sampling over walk corpora.

Walks are treated as sentences: every (center, context) pair within a fixed
window is a positive example, scored against ``negatives`` noise nodes drawn
from a unigram distribution raised to ``noise_exponent``. Input vectors are
the learned node representation; output vectors are the context-side
parameters and are discarded downstream.

Training runs either single-threaded and fully deterministic (the default)
or hogwild-style across walk shards, where unsynchronized concurrent updates
are tolerated and results are only statistically reproducible. The hot loop
is JIT-compiled; ``sgns_pair_step`` is the reference update used by the
tests to pin the kernel's semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np
from numba import njit, prange

from .corpus import WalkCorpus
from .errors import ValidationError

__all__ = [
    "SgnsConfig",
    "EmbeddingMatrix",
    "build_noise_table",
    "init_embedding",
    "sgns_pair_step",
    "pair_count",
    "train_sgns",
    "save_embeddings",
    "load_embeddings",
]

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


@dataclass
class SgnsConfig:
    window: int = 20
    epochs: int = 100
    negatives: int = 5
    initial_lr: float = 0.025
    noise_exponent: float = 0.75
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError(f"window must be >= 1, got {self.window}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.negatives < 1:
            raise ValidationError(f"negatives must be >= 1, got {self.negatives}")
        if self.initial_lr <= 0:
            raise ValidationError(f"initial_lr must be positive, got {self.initial_lr}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")


@dataclass
class EmbeddingMatrix:
    """Learned node vectors: (node x dim) input and output matrices."""

    input_vectors: np.ndarray
    output_vectors: np.ndarray
    dim: int
    epoch_loss: list[float] | None = None


def _sigmoid(x):
    t = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))


def _softplus(x):
    """log(1 + exp(x)), stable for |x| up to at least the exp overflow range."""
    return np.logaddexp(0.0, x)


def build_noise_table(
    corpus: WalkCorpus, noise_exponent: float, node_count: int | None = None
) -> np.ndarray:
    """Negative-sampling distribution: P(node) proportional to freq^exponent.

    Nodes absent from the corpus get probability 0. With exponent 0 the
    distribution is uniform over the nodes that appear.
    """
    if node_count is None:
        node_count = max((max(w) for w in corpus.walks if w), default=-1) + 1
    if node_count <= 0 or corpus.token_count == 0:
        raise ValidationError("cannot build a noise table from an empty corpus")
    counts = corpus.node_frequencies(node_count).astype(np.float64)
    support = counts > 0
    probs = np.zeros(node_count, dtype=np.float64)
    probs[support] = counts[support] ** noise_exponent
    return probs / probs.sum()


def init_embedding(node_count: int, dim: int, seed: int) -> EmbeddingMatrix:
    """Input vectors uniform in [-0.5/dim, 0.5/dim), output vectors zero."""
    if dim < 1:
        raise ValidationError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed & _MASK)
    inputs = (rng.random((node_count, dim)) - 0.5) / dim
    return EmbeddingMatrix(inputs, np.zeros((node_count, dim)), dim)


def sgns_pair_step(
    emb: EmbeddingMatrix, center: int, context: int, negatives: Sequence[int], lr: float
) -> float:
    """One gradient step on a single (center, context) pair; returns the loss.

    Loss is ``-log sigmoid(v.c) - sum_neg log sigmoid(-v.n)`` where ``v`` is
    the center's input vector and ``c``/``n`` are output vectors. Gradients
    are evaluated jointly at the incoming parameters, then the center input
    vector and the context/negative output vectors are updated in place.
    """
    W, O = emb.input_vectors, emb.output_vectors
    negs = np.asarray(negatives, dtype=np.int64)
    v0 = W[center].copy()
    ctx0 = O[context].copy()
    negs0 = O[negs].copy()

    pos_dot = float(v0 @ ctx0)
    g_pos = float(_sigmoid(pos_dot)) - 1.0
    loss = float(_softplus(-pos_dot))

    neg_dots = negs0 @ v0
    g_negs = _sigmoid(neg_dots)
    loss += float(_softplus(neg_dots).sum())

    O[context] -= lr * g_pos * v0
    for k, neg in enumerate(negs):
        O[neg] -= lr * g_negs[k] * v0
    W[center] -= lr * (g_pos * ctx0 + g_negs @ negs0)
    return loss


def pair_count(corpus: WalkCorpus, window: int) -> int:
    """Number of (center, context) pairs one epoch visits."""
    total = 0
    for walk in corpus.walks:
        n = len(walk)
        for i in range(n):
            total += min(i + window, n - 1) - max(i - window, 0)
    return total


@njit(cache=True, inline="always")
def _next_uniform(state):
    state = state + np.uint64(_GOLDEN)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def _sigmoid_s(x):
    t = np.exp(-abs(x))
    if x >= 0.0:
        return 1.0 / (1.0 + t)
    return t / (1.0 + t)


@njit(cache=True, inline="always")
def _softplus_s(x):
    if x > 0.0:
        return x + np.log1p(np.exp(-x))
    return np.log1p(np.exp(x))


@njit(cache=True)
def _train_walks(
    tokens, offsets, walk_pair_offset, w_lo, w_hi,
    W, O, cum, window, negatives, lr0, denom, state, epoch_offset,
):
    """Scan walks [w_lo, w_hi) once, updating W and O in place.

    The global pair counter driving the linear learning-rate decay is
    reconstructed from per-walk pair offsets, so the schedule does not depend
    on how walks are sharded. Returns (advanced PRNG state, summed loss).
    """
    n_nodes = W.shape[0]
    d = W.shape[1]
    grad = np.empty(d, dtype=np.float64)
    v0 = np.empty(d, dtype=np.float64)
    neg_ids = np.empty(negatives, dtype=np.int64)
    neg_gs = np.empty(negatives, dtype=np.float64)
    loss = 0.0
    for w in range(w_lo, w_hi):
        s, e = offsets[w], offsets[w + 1]
        t = epoch_offset + walk_pair_offset[w]
        for i in range(s, e):
            c = tokens[i]
            lo = i - window if i - window > s else s
            hi = i + window if i + window < e - 1 else e - 1
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                ctx = tokens[j]
                lr = lr0 * (1.0 - 0.99 * (t / denom))

                for k in range(d):
                    v0[k] = W[c, k]
                pos_dot = 0.0
                for k in range(d):
                    pos_dot += v0[k] * O[ctx, k]
                g_pos = _sigmoid_s(pos_dot) - 1.0
                loss += _softplus_s(-pos_dot)
                for k in range(d):
                    grad[k] = g_pos * O[ctx, k]

                for m in range(negatives):
                    while True:
                        state, r = _next_uniform(state)
                        neg = np.searchsorted(cum, r, side="right")
                        if neg >= n_nodes:
                            neg = n_nodes - 1
                        if neg != ctx:
                            break
                    dot = 0.0
                    for k in range(d):
                        dot += v0[k] * O[neg, k]
                    g = _sigmoid_s(dot)
                    loss += _softplus_s(dot)
                    neg_ids[m] = neg
                    neg_gs[m] = g
                    for k in range(d):
                        grad[k] += g * O[neg, k]

                for k in range(d):
                    O[ctx, k] -= lr * g_pos * v0[k]
                for m in range(negatives):
                    neg = neg_ids[m]
                    g = neg_gs[m]
                    for k in range(d):
                        O[neg, k] -= lr * g * v0[k]
                for k in range(d):
                    W[c, k] -= lr * grad[k]
                t += 1
    return state, loss


@njit(cache=True)
def _train_serial(
    tokens, offsets, walk_pair_offset, W, O, cum,
    window, negatives, lr0, denom, seed, epochs, loss_out,
):
    state = np.uint64(seed)
    pairs_per_epoch = walk_pair_offset[walk_pair_offset.shape[0] - 1]
    for ep in range(epochs):
        state, loss = _train_walks(
            tokens, offsets, walk_pair_offset, 0, offsets.shape[0] - 1,
            W, O, cum, window, negatives, lr0, denom, state, ep * pairs_per_epoch,
        )
        loss_out[ep] = loss


@njit(cache=True, parallel=True)
def _train_hogwild(
    tokens, offsets, walk_pair_offset, W, O, cum,
    window, negatives, lr0, denom, seed, epochs, shard_bounds, loss_out,
):
    pairs_per_epoch = walk_pair_offset[walk_pair_offset.shape[0] - 1]
    n_shards = shard_bounds.shape[0] - 1
    for ep in range(epochs):
        shard_loss = np.zeros(n_shards, dtype=np.float64)
        for s in prange(n_shards):
            state = (
                np.uint64(seed)
                + np.uint64(ep + 1) * np.uint64(_GOLDEN)
                + np.uint64(s + 1) * np.uint64(_MIX1)
            )
            _, loss = _train_walks(
                tokens, offsets, walk_pair_offset, shard_bounds[s], shard_bounds[s + 1],
                W, O, cum, window, negatives, lr0, denom, state, ep * pairs_per_epoch,
            )
            shard_loss[s] = loss
        loss_out[ep] = shard_loss.sum()


def _flatten(corpus: WalkCorpus, window: int):
    tokens = np.fromiter(
        (u for walk in corpus.walks for u in walk), dtype=np.int64, count=corpus.token_count
    )
    offsets = np.zeros(len(corpus.walks) + 1, dtype=np.int64)
    walk_pair_offset = np.zeros(len(corpus.walks) + 1, dtype=np.int64)
    for i, walk in enumerate(corpus.walks):
        offsets[i + 1] = offsets[i] + len(walk)
        n = len(walk)
        pairs = sum(min(j + window, n - 1) - max(j - window, 0) for j in range(n))
        walk_pair_offset[i + 1] = walk_pair_offset[i] + pairs
    return tokens, offsets, walk_pair_offset


def train_sgns(
    corpus: WalkCorpus, node_count: int, dim: int, config: SgnsConfig
) -> EmbeddingMatrix:
    """Train embeddings over the corpus for ``config.epochs`` epochs.

    Every epoch scans all in-window (center, context) pairs in corpus order,
    draws ``config.negatives`` noise nodes per pair (redrawing any draw equal
    to the context node), and applies ``sgns_pair_step``'s update. The
    learning rate decays linearly from ``initial_lr`` to ``initial_lr/100``
    across all scheduled pair visits. With ``workers == 1`` the result is
    deterministic for a fixed seed; with more workers, walk shards train
    hogwild-style and determinism is given up.
    """
    if corpus.token_count == 0:
        raise ValidationError("cannot train on an empty corpus")
    top = max(max(w) for w in corpus.walks if w)
    if top >= node_count:
        raise ValidationError(f"corpus references node {top} >= node_count {node_count}")

    probs = build_noise_table(corpus, config.noise_exponent, node_count)
    cum = np.cumsum(probs)
    tokens, offsets, walk_pair_offset = _flatten(corpus, config.window)
    total_pairs = int(walk_pair_offset[-1]) * config.epochs
    denom = float(max(total_pairs - 1, 1))

    emb = init_embedding(node_count, dim, config.seed)
    loss_out = np.zeros(config.epochs, dtype=np.float64)
    if walk_pair_offset[-1] > 0:
        if config.workers == 1:
            _train_serial(
                tokens, offsets, walk_pair_offset,
                emb.input_vectors, emb.output_vectors, cum,
                config.window, config.negatives, config.initial_lr, denom,
                config.seed & _MASK, config.epochs, loss_out,
            )
        else:
            n_walks = len(corpus.walks)
            bounds = np.linspace(0, n_walks, config.workers + 1).astype(np.int64)
            _train_hogwild(
                tokens, offsets, walk_pair_offset,
                emb.input_vectors, emb.output_vectors, cum,
                config.window, config.negatives, config.initial_lr, denom,
                config.seed & _MASK, config.epochs, bounds, loss_out,
            )
        emb.epoch_loss = list(loss_out / walk_pair_offset[-1])
    else:
        emb.epoch_loss = [0.0] * config.epochs
    return emb


class _SplitMix:
    """Python mirror of the kernel's PRNG; used by the reference trainer."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def uniform(self) -> float:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        z = z ^ (z >> 31)
        return (z >> 11) * 2.0**-53

    def draw_negative(self, cum: np.ndarray, context: int) -> int:
        while True:
            idx = int(np.searchsorted(cum, self.uniform(), side="right"))
            if idx >= cum.size:
                idx = cum.size - 1
            if idx != context:
                return idx


def _train_reference(
    corpus: WalkCorpus, node_count: int, dim: int, config: SgnsConfig
) -> EmbeddingMatrix:
    """Slow pure-Python trainer with identical semantics to the kernel."""
    probs = build_noise_table(corpus, config.noise_exponent, node_count)
    cum = np.cumsum(probs)
    emb = init_embedding(node_count, dim, config.seed)
    per_epoch = pair_count(corpus, config.window)
    total_pairs = per_epoch * config.epochs
    denom = float(max(total_pairs - 1, 1))
    rng = _SplitMix(config.seed)
    losses = []
    t = 0
    for _ in range(config.epochs):
        epoch_loss = 0.0
        for walk in corpus.walks:
            n = len(walk)
            for i in range(n):
                lo, hi = max(i - config.window, 0), min(i + config.window, n - 1)
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    lr = config.initial_lr * (1.0 - 0.99 * (t / denom))
                    negs = [rng.draw_negative(cum, walk[j]) for _ in range(config.negatives)]
                    epoch_loss += sgns_pair_step(emb, walk[i], walk[j], negs, lr)
                    t += 1
        losses.append(epoch_loss / max(per_epoch, 1))
    emb.epoch_loss = losses
    return emb


def save_embeddings(emb: EmbeddingMatrix, node_ids: list[str], out: IO[str]):
    """Word-vector text format: header line ``n dim``, then id + dim reals."""
    n = emb.input_vectors.shape[0]
    out.write(f"{n} {emb.dim}\n")
    for u in range(n):
        row = " ".join(repr(x) for x in emb.input_vectors[u])
        out.write(f"{node_ids[u]} {row}\n")


def load_embeddings(text: str) -> tuple[list[str], np.ndarray]:
    """Inverse of save_embeddings; returns (id tokens, vectors)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty embedding file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValidationError("embedding file must start with 'node_count dim'")
    n, dim = int(header[0]), int(header[1])
    if len(lines) - 1 != n:
        raise ValidationError(f"embedding file declares {n} rows, found {len(lines) - 1}")
    tokens = []
    vectors = np.empty((n, dim), dtype=np.float64)
    for r, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != dim + 1:
            raise ValidationError(f"embedding row {r} has {len(parts) - 1} values, expected {dim}")
        tokens.append(parts[0])
        vectors[r] = [float(x) for x in parts[1:]]
    return tokens, vectors

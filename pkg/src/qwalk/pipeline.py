"""End-to-end pipeline: ingest, split, confidence, Q-training, walks,
embedding training, evaluation, and single-parameter sweeps.

A run is fully described by an ExperimentConfig. Defaults reproduce the
canonical fixed setting used throughout the experiments; every field can be
overridden from a flat ``key=value`` config file or CLI flags. The master
seed is split into independent per-stage sub-streams (split / walks / sgns /
cross-validation) so changing one stage never perturbs another's randomness.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .confidence import learn_confidence, write_confidence_csv
from .errors import PipelineError, ValidationError
from .evaluate import F1Report, cross_validate
from .graph import Graph, LabelAssignment, parse_edge_list, parse_labels, split_labelled
from .qlearn import generate_corpus, train_q
from .sgns import SgnsConfig, save_embeddings, train_sgns
from .walks import BiasParams, baseline_corpus

__all__ = ["ExperimentConfig", "run_pipeline", "synth_graph", "sweep", "SWEEP_COLUMNS"]

_SEED_MASK = 0xFFFFFFFFFFFFFFFF

POLICIES = ("qwalk", "biased", "uniform")
SWEEP_COLUMNS = ("parameter", "value", "policy", "macro_f1", "micro_f1")


@dataclass
class ExperimentConfig:
    """All knobs of one pipeline run; defaults are the canonical setting."""

    graph_path: str = ""
    labels_path: str = ""
    directed: bool = False
    policy: str = "qwalk"
    labelled_fraction: float = 0.8
    hops: int = 1
    confidence_iters: int = 3
    q_learning_rate: float = 1.0
    discount: float = 0.9
    q_epochs: int = 100
    exploit_prob: float = 0.8
    q_lookahead: bool = False
    walks_per_node: int = 24
    walk_length: int = 100
    dim: int = 256
    window: int = 20
    sgns_epochs: int = 100
    negatives: int = 5
    sgns_lr: float = 0.025
    noise_exponent: float = 0.75
    workers: int = 1
    k_nn: int = 3
    folds: int = 5
    eval_nodes: str = "all"
    return_param: float = 0.25
    inout_param: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValidationError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.eval_nodes not in ("all", "hidden"):
            raise ValidationError(f"eval_nodes must be 'all' or 'hidden', got {self.eval_nodes!r}")
        if not 0 <= self.exploit_prob <= 1:
            raise ValidationError(f"exploit_prob must be in [0, 1], got {self.exploit_prob}")

    def to_text(self) -> str:
        """Flat key=value form, one field per line, alphabetical."""
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        """Parse key=value lines over ``base`` (or the defaults)."""
        overrides = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"config line {lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            overrides[key.strip()] = value.strip()
        return cls.from_mapping(overrides, base)

    @classmethod
    def from_mapping(
        cls, overrides: Mapping[str, object], base: "ExperimentConfig | None" = None
    ) -> "ExperimentConfig":
        by_name = {f.name: f for f in fields(cls)}
        kwargs = dataclasses.asdict(base) if base is not None else {}
        for key, value in overrides.items():
            if key not in by_name:
                raise ValidationError(f"unknown config field {key!r}")
            kwargs[key] = _coerce(value, by_name[key].type)
        return cls(**kwargs)


def _coerce(value, field_type: str | type):
    name = field_type if isinstance(field_type, str) else field_type.__name__
    if isinstance(value, str):
        if name == "bool":
            low = value.lower()
            if low not in ("true", "false", "1", "0"):
                raise ValidationError(f"bad boolean {value!r}")
            return low in ("true", "1")
        if name == "int":
            return int(value)
        if name == "float":
            return float(value)
        return value
    if name == "float" and isinstance(value, int):
        return float(value)
    return value


def stage_seeds(seed: int) -> dict[str, int]:
    """Independent per-stage seeds derived from the master seed."""
    children = np.random.SeedSequence(seed & _SEED_MASK).spawn(4)
    names = ("split", "walks", "sgns", "cv")
    return {n: int(c.generate_state(1, np.uint64)[0]) for n, c in zip(names, children)}


def _stage(name: str, fn: Callable):
    try:
        return fn()
    except PipelineError:
        raise
    except Exception as e:
        raise PipelineError(name, e) from e


def run_pipeline(
    config: ExperimentConfig,
    graph: Graph | None = None,
    labels: LabelAssignment | None = None,
    out_dir: str | Path | None = None,
) -> F1Report:
    """Execute one full run and return its cross-validated F1 report.

    Stages run in order: parse, split, confidence, q-training, walks, sgns,
    evaluate (baseline policies skip confidence and q-training). Any stage
    failure aborts with the stage name and cause. When ``out_dir`` is given,
    the resolved config and all intermediate artifacts are written there.
    """
    cfg = config

    def _parse():
        if graph is not None:
            if labels is None:
                raise ValidationError("labels must accompany an in-memory graph")
            return graph, labels
        if not cfg.graph_path or not cfg.labels_path:
            raise ValidationError("graph_path and labels_path are required")
        g = parse_edge_list(Path(cfg.graph_path).read_text(), cfg.directed)
        lab = parse_labels(Path(cfg.labels_path).read_text(), g.node_index)
        return g, lab

    g, lab = _stage("parse", _parse)
    seeds = stage_seeds(cfg.seed)

    split = _stage(
        "split",
        lambda: split_labelled(lab, cfg.labelled_fraction, seeds["split"], g.node_count),
    )

    conf = None
    if cfg.policy == "qwalk":
        conf = _stage(
            "confidence",
            lambda: learn_confidence(g, lab, split, cfg.hops, cfg.confidence_iters),
        )
        q = _stage(
            "q-training",
            lambda: train_q(g, conf, cfg.q_learning_rate, cfg.discount, cfg.q_epochs),
        )
        corpus = _stage(
            "walks",
            lambda: generate_corpus(
                q, g, cfg.walks_per_node, cfg.walk_length, cfg.exploit_prob,
                seeds["walks"], cfg.q_lookahead,
            ),
        )
    else:
        params = (
            BiasParams(1.0, 1.0)
            if cfg.policy == "uniform"
            else BiasParams(cfg.return_param, cfg.inout_param)
        )
        corpus = _stage(
            "walks",
            lambda: baseline_corpus(g, cfg.walks_per_node, cfg.walk_length, params, seeds["walks"]),
        )

    emb = _stage(
        "sgns",
        lambda: train_sgns(
            corpus, g.node_count, cfg.dim,
            SgnsConfig(
                window=cfg.window, epochs=cfg.sgns_epochs, negatives=cfg.negatives,
                initial_lr=cfg.sgns_lr, noise_exponent=cfg.noise_exponent,
                seed=seeds["sgns"], workers=cfg.workers,
            ),
        ),
    )

    def _evaluate():
        if cfg.eval_nodes == "hidden":
            eligible = sorted(set(split.hidden) & set(lab.actual_labels))
        else:
            eligible = lab.labelled_nodes
        return cross_validate(emb, lab, eligible, cfg.folds, cfg.k_nn, seeds["cv"])

    report = _stage("evaluate", _evaluate)

    if out_dir is not None:
        def _artifacts():
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / "config.resolved").write_text(cfg.to_text())
            (out / "node_index.json").write_text(
                json.dumps({tok: u for u, tok in enumerate(g.node_ids)}, sort_keys=True)
            )
            if conf is not None:
                with open(out / "confidence.csv", "w") as fh:
                    write_confidence_csv(conf, lab, g, fh)
            (out / "walks.txt").write_text(corpus.to_text(g.node_ids))
            with open(out / "embeddings.txt", "w") as fh:
                save_embeddings(emb, g.node_ids, fh)
            (out / "report.json").write_text(
                report.to_json(settings=dataclasses.asdict(cfg))
            )

        _stage("artifacts", _artifacts)
    return report


def synth_graph(
    communities: int,
    nodes_per_community: int,
    p_in: float,
    p_out: float,
    seed: int,
) -> tuple[Graph, LabelAssignment]:
    """Planted-partition graph with one label per community.

    Every within-community node pair is joined independently with
    probability ``p_in``, every across-community pair with ``p_out``.
    Undirected, unit weights, deterministic per seed.
    """
    if communities < 1 or nodes_per_community < 1:
        raise ValidationError("communities and nodes_per_community must be >= 1")
    if not (0 <= p_out < p_in <= 1):
        raise ValidationError(f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")
    n = communities * nodes_per_community
    rng = np.random.default_rng(seed & _SEED_MASK)
    comm = np.arange(n) // nodes_per_community
    thresh = np.where(comm[:, None] == comm[None, :], p_in, p_out)
    hit = np.triu(rng.random((n, n)) < thresh, k=1)
    edges = [(int(u), int(v), 1.0) for u, v in np.argwhere(hit)]
    g = Graph.from_edges(edges, directed=False, node_count=n)
    labels = LabelAssignment(
        [str(c) for c in range(communities)],
        {u: frozenset({int(comm[u])}) for u in range(n)},
    )
    return g, labels


def sweep(
    base: ExperimentConfig,
    parameter: str,
    values: Sequence,
    seeds: Sequence[int],
    graph: Graph | None = None,
    labels: LabelAssignment | None = None,
    out_csv: str | Path | None = None,
) -> list[dict]:
    """Run the qwalk policy and the biased baseline over a parameter grid.

    For every value in ``values`` and both policies, the pipeline runs once
    per seed; rows report the per-policy means over seeds. Row order is
    (value, policy) with qwalk first. When ``out_csv`` is given the table is
    also written as CSV with the stable column schema ``SWEEP_COLUMNS``.
    """
    names = {f.name for f in fields(ExperimentConfig)}
    if parameter not in names:
        raise ValidationError(f"unknown sweep parameter {parameter!r}")
    field_type = {f.name: f.type for f in fields(ExperimentConfig)}[parameter]
    rows = []
    for value in values:
        coerced = _coerce(value, field_type)
        for policy in ("qwalk", "biased"):
            scores = []
            for s in seeds:
                cfg = replace(base, policy=policy, seed=int(s), **{parameter: coerced})
                report = run_pipeline(cfg, graph=graph, labels=labels)
                scores.append((report.macro_f1, report.micro_f1))
            rows.append(
                {
                    "parameter": parameter,
                    "value": coerced,
                    "policy": policy,
                    "macro_f1": float(np.mean([m for m, _ in scores])),
                    "micro_f1": float(np.mean([mi for _, mi in scores])),
                }
            )
    if out_csv is not None:
        lines = [",".join(SWEEP_COLUMNS)]
        for row in rows:
            lines.append(",".join(str(row[c]) for c in SWEEP_COLUMNS))
        Path(out_csv).write_text("\n".join(lines) + "\n")
    return rows

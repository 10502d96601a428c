"""Command-line interface: embed, synth, sweep, and eval verbs."""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .errors import ParseError, PipelineError, ValidationError
from .evaluate import cross_validate
from .graph import parse_labels
from .pipeline import ExperimentConfig, run_pipeline, sweep, synth_graph
from .sgns import EmbeddingMatrix, load_embeddings

_BOOL_FIELDS = {"directed", "q_lookahead"}
_PATH_FIELDS = {"graph_path", "labels_path"}


def _add_config_flags(parser: argparse.ArgumentParser):
    """One flag per ExperimentConfig field; unset flags keep defaults."""
    for f in fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in _BOOL_FIELDS:
            parser.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction,
                                default=None)
        elif f.name == "seed":
            parser.add_argument(flag, dest=f.name, type=int, required=True)
        else:
            ftype = {"int": int, "float": float, "str": str}[
                f.type if isinstance(f.type, str) else f.type.__name__
            ]
            parser.add_argument(flag, dest=f.name, type=ftype, default=None)


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig()
    if getattr(args, "config", None):
        base = ExperimentConfig.from_text(Path(args.config).read_text(), base)
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(ExperimentConfig)
        if getattr(args, f.name, None) is not None
    }
    return ExperimentConfig.from_mapping(overrides, base)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="run the full pipeline on a dataset")
    p_embed.add_argument("--config", help="key=value config file; flags override it")
    p_embed.add_argument("--out", required=True, help="run directory for artifacts")
    _add_config_flags(p_embed)

    p_synth = sub.add_parser("synth", help="generate a planted-partition benchmark")
    p_synth.add_argument("--communities", type=int, required=True)
    p_synth.add_argument("--nodes-per-community", type=int, required=True)
    p_synth.add_argument("--p-in", type=float, required=True)
    p_synth.add_argument("--p-out", type=float, required=True)
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--out-prefix", required=True,
                         help="writes <prefix>.edges and <prefix>.labels")

    p_sweep = sub.add_parser("sweep", help="sweep one parameter over seeds and policies")
    p_sweep.add_argument("--config", help="key=value config file; flags override it")
    p_sweep.add_argument("--parameter", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--seeds", required=True, help="comma-separated seeds")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    _add_config_flags(p_sweep)

    p_eval = sub.add_parser("eval", help="evaluate precomputed embeddings")
    p_eval.add_argument("--embeddings", required=True)
    p_eval.add_argument("--labels", required=True)
    p_eval.add_argument("--k-nn", dest="k_nn", type=int, default=3)
    p_eval.add_argument("--folds", type=int, default=5)
    p_eval.add_argument("--seed", type=int, required=True)
    p_eval.add_argument("--out", help="report file; prints to stdout when omitted")
    return parser


def _cmd_embed(args) -> int:
    cfg = _config_from_args(args)
    report = run_pipeline(cfg, out_dir=args.out)
    print(f"macro_f1={report.macro_f1:.4f} micro_f1={report.micro_f1:.4f} -> {args.out}")
    return 0


def _cmd_synth(args) -> int:
    g, labels = synth_graph(
        args.communities, args.nodes_per_community, args.p_in, args.p_out, args.seed
    )
    edges = Path(args.out_prefix + ".edges")
    labs = Path(args.out_prefix + ".labels")
    edges.write_text(g.to_edge_list())
    lines = [
        f"{g.node_ids[u]} " + " ".join(labels.label_universe[l] for l in sorted(labels.actual_labels[u]))
        for u in sorted(labels.actual_labels)
    ]
    labs.write_text("\n".join(lines) + "\n")
    print(f"wrote {edges} ({g.edge_count // 2} edges) and {labs} ({g.node_count} nodes)")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    rows = sweep(cfg, args.parameter, values, seeds, out_csv=args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_eval(args) -> int:
    tokens, vectors = load_embeddings(Path(args.embeddings).read_text())
    index = {tok: i for i, tok in enumerate(tokens)}
    labels = parse_labels(Path(args.labels).read_text(), index)
    emb = EmbeddingMatrix(vectors, np.zeros_like(vectors), vectors.shape[1])
    report = cross_validate(
        emb, labels, labels.labelled_nodes, args.folds, args.k_nn, args.seed
    )
    doc = report.to_json(
        settings={"embeddings": args.embeddings, "labels": args.labels, "seed": args.seed}
    )
    if args.out:
        Path(args.out).write_text(doc)
        print(f"macro_f1={report.macro_f1:.4f} micro_f1={report.micro_f1:.4f} -> {args.out}")
    else:
        print(doc)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "embed": _cmd_embed,
        "synth": _cmd_synth,
        "sweep": _cmd_sweep,
        "eval": _cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except (ValidationError, ParseError, PipelineError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

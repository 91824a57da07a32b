"""Command-line pipeline: gen -> triplets -> embed -> eval -> plot.

Every subcommand accepts ``--config FILE`` pointing at an INI-style file
whose ``[gen]``, ``[triplets]``, ``[embed]``, ``[eval]``, ``[plot]``
sections provide defaults for the equally named options; explicit
command-line flags win. All stages are deterministic in their ``--seed``
and rewrite byte-identical outputs on identical inputs.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure;
``embed`` returns 4 when the epoch limit was reached without the loss
plateauing.
"""

import argparse
import configparser
import json
import sys

import numpy as np

from . import datasets, encoder, trainer, triplets as tp
from .exceptions import DataError, NumericError
from .metrics import (
    kmeans,
    link_prediction_scores,
    negative_energy_scorer,
    pairs_from_triplets,
    procrustes_distributional,
    purity,
    triplet_error,
    write_metrics_report,
)
from .svgplot import render_svg

__all__ = ["main", "entry_point", "UsageError"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3
EXIT_NO_PLATEAU = 4

_POINT_GENERATORS = ("blobs", "moons", "circles")
_GRAPH_GENERATORS = ("linear", "hierarchy")


class UsageError(Exception):
    """Bad flags or option combinations; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _bool_flag(raw):
    return raw.strip().lower() in ("1", "true", "yes", "on")


# Option registry per subcommand: dest -> (converter, built-in default).
_SPECS = {
    "gen": {
        "n": (int, 1000),
        "seed": (int, 0),
        "noise_sd": (float, 0.05),
        "factor": (float, 0.5),
        "items_per_fine": (int, 1),
        "fines_per_super": (int, 5),
        "supers": (int, 20),
        "out": (str, None),
    },
    "triplets": {
        "points": (str, None),
        "graph": (str, None),
        "d": (int, 2),
        "p": (float, 1.0),
        "eps": (float, 0.0),
        "strategy": (str, tp.STRATEGY_UNIFORM),
        "seed": (int, 0),
        "out": (str, None),
    },
    "embed": {
        "test": (str, None),
        "n": (int, None),
        "d": (int, 2),
        "clamp": (float, trainer.TrainConfig().clamp_c),
        "lr": (float, 0.01),
        "lr_decay": (float, 1e-5),
        "batch_size": (int, 256),
        "max_epochs": (int, 200),
        "patience": (int, 10),
        "margin": (float, 1.0),
        "h_in": (int, 50),
        "h_dim": (int, 50),
        "dirac": (_bool_flag, False),
        "seed": (int, 0),
        "out": (str, None),
        "report": (str, None),
        "save_params": (str, None),
    },
    "eval": {
        "embedding": (str, None),
        "triplets": (str, None),
        "points": (str, None),
        "k": (int, None),
        "seed": (int, 0),
        "out": (str, None),
    },
    "plot": {
        "embedding": (str, None),
        "points": (str, None),
        "radius_scale": (float, 2.0),
        "canvas": (int, 600),
        "out": (str, None),
    },
}


def build_parser():
    parser = _Parser(prog="ordemb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic dataset file")
    p_gen.add_argument(
        "kind", choices=_POINT_GENERATORS + _GRAPH_GENERATORS, help="generator name"
    )
    p_gen.add_argument("--n", type=int, help="number of points / path classes")
    p_gen.add_argument("--noise-sd", type=float, dest="noise_sd")
    p_gen.add_argument("--factor", type=float, help="inner circle radius")
    p_gen.add_argument("--items-per-fine", type=int, dest="items_per_fine")
    p_gen.add_argument("--fines-per-super", type=int, dest="fines_per_super")
    p_gen.add_argument("--supers", type=int)

    p_tri = sub.add_parser("triplets", help="sample labeled triplets")
    p_tri.add_argument("--points", help="points CSV to simulate the oracle from")
    p_tri.add_argument("--graph", help="edge-list graph for the hop oracle")
    p_tri.add_argument("--d", type=int, help="target embedding dimension in the budget rule")
    p_tri.add_argument("--p", type=float, help="budget multiplier")
    p_tri.add_argument("--eps", type=float, help="label flip probability")
    p_tri.add_argument("--strategy", choices=(tp.STRATEGY_UNIFORM, tp.STRATEGY_GRAPH_HOP))

    p_emb = sub.add_parser("embed", help="train embeddings from a triplet file")
    p_emb.add_argument("train", help="training triplet file")
    p_emb.add_argument("--test", help="held-out triplet file for the report")
    p_emb.add_argument("--n", type=int, help="item count (default: max index + 1)")
    p_emb.add_argument("--d", type=int, help="embedding dimension")
    p_emb.add_argument("--clamp", type=float, help="variance upper bound")
    p_emb.add_argument("--lr", type=float)
    p_emb.add_argument("--lr-decay", type=float, dest="lr_decay")
    p_emb.add_argument("--batch-size", type=int, dest="batch_size")
    p_emb.add_argument("--max-epochs", type=int, dest="max_epochs")
    p_emb.add_argument("--patience", type=int)
    p_emb.add_argument("--margin", type=float)
    p_emb.add_argument("--h-in", type=int, dest="h_in")
    p_emb.add_argument("--h-dim", type=int, dest="h_dim")
    p_emb.add_argument(
        "--dirac",
        action="store_const",
        const=True,
        help="pin variances to the floor (point-embedding baseline)",
    )
    p_emb.add_argument("--report", help="report path (default: OUT.report.json)")
    p_emb.add_argument("--save-params", dest="save_params", help="encoder checkpoint path")

    p_eval = sub.add_parser("eval", help="score an embedding against triplets")
    p_eval.add_argument("--embedding", help="embedding CSV")
    p_eval.add_argument("--triplets", help="evaluation triplet file")
    p_eval.add_argument("--points", help="ground-truth points CSV")
    p_eval.add_argument("--k", type=int, help="k-means cluster count")

    p_plot = sub.add_parser("plot", help="render embeddings as SVG ellipses")
    p_plot.add_argument("--embedding", help="embedding CSV")
    p_plot.add_argument("--points", help="points CSV supplying labels for colors")
    p_plot.add_argument("--radius-scale", type=float, dest="radius_scale")
    p_plot.add_argument("--canvas", type=int, help="canvas width in pixels")

    for sub_parser in (p_gen, p_tri, p_emb, p_eval, p_plot):
        sub_parser.add_argument("--seed", type=int)
        sub_parser.add_argument("--out", help="output path")
        sub_parser.add_argument("--config", help="INI config file with defaults")
    return parser


def _resolve(args, command):
    """Merge CLI values, config-file section values, and built-in defaults."""
    config = None
    if getattr(args, "config", None):
        config = configparser.ConfigParser()
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise DataError(f"config file {args.config}: {exc}") from exc
    opts = {}
    for dest, (conv, default) in _SPECS[command].items():
        value = getattr(args, dest, None)
        if value is None and config is not None and config.has_option(command, dest):
            try:
                value = conv(config.get(command, dest))
            except ValueError as exc:
                raise DataError(f"config option [{command}] {dest}: {exc}") from exc
        if value is None:
            value = default
        opts[dest] = value
    return opts


def _require_out(opts):
    if not opts["out"]:
        raise UsageError("--out is required")
    return opts["out"]


def _cmd_gen(args):
    opts = _resolve(args, "gen")
    out = _require_out(opts)
    kind = args.kind
    if kind == "blobs":
        datasets.save_points(out, datasets.gen_blobs(opts["n"], seed=opts["seed"]))
    elif kind == "moons":
        datasets.save_points(
            out, datasets.gen_moons(opts["n"], noise_sd=opts["noise_sd"], seed=opts["seed"])
        )
    elif kind == "circles":
        datasets.save_points(
            out,
            datasets.gen_circles(
                opts["n"], factor=opts["factor"], noise_sd=opts["noise_sd"], seed=opts["seed"]
            ),
        )
    elif kind == "linear":
        datasets.save_graph(out, datasets.gen_linear_order(opts["n"]))
    else:
        datasets.save_graph(
            out,
            datasets.gen_hierarchy(
                opts["items_per_fine"], opts["fines_per_super"], opts["supers"]
            ),
        )
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_triplets(args):
    opts = _resolve(args, "triplets")
    out = _require_out(opts)
    if bool(opts["points"]) == bool(opts["graph"]):
        raise UsageError("exactly one of --points or --graph is required")
    if opts["points"]:
        if opts["strategy"] == tp.STRATEGY_GRAPH_HOP:
            raise UsageError("graph_hop sampling needs --graph")
        ds = datasets.load_points(opts["points"])
        n = len(ds)
        budget = tp.budget_from_rule(n, opts["d"], opts["p"])
        sample = tp.sample_uniform(n, budget, tp.make_point_oracle(ds), seed=opts["seed"])
    else:
        graph = datasets.load_graph(opts["graph"])
        n = graph.n_nodes
        budget = tp.budget_from_rule(n, opts["d"], opts["p"])
        if opts["strategy"] == tp.STRATEGY_GRAPH_HOP:
            sample = tp.sample_graph_hop(graph, budget, seed=opts["seed"])
        else:
            sample = tp.sample_uniform(
                n, budget, tp.make_graph_oracle(graph), seed=opts["seed"]
            )
    sample = tp.apply_noise(sample, opts["eps"], seed=opts["seed"])
    train_part, test_part = tp.split_train_test(sample)
    tp.save_triplets(out, sample)
    tp.save_triplets(f"{out}.train", train_part)
    tp.save_triplets(f"{out}.test", test_part)
    print(f"wrote {budget} triplets to {out} (+ .train/.test split)")
    return EXIT_OK


def _report_json(report):
    # wall_seconds varies between runs and is deliberately left out so the
    # written report stays byte-identical under identical inputs.
    payload = {
        "losses": report.losses,
        "train_errors": report.train_errors,
        "holdout_error": report.holdout_error,
        "epochs": report.epochs,
        "converged": report.converged,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _cmd_embed(args):
    opts = _resolve(args, "embed")
    out = _require_out(opts)
    train_arr = tp.load_triplets(args.train)
    test_arr = tp.load_triplets(opts["test"]) if opts["test"] else None
    n = opts["n"]
    if n is None:
        n = int(train_arr[:, :3].max()) + 1
        if test_arr is not None:
            n = max(n, int(test_arr[:, :3].max()) + 1)
    config = trainer.TrainConfig(
        d=opts["d"],
        clamp_c=opts["clamp"],
        learning_rate=opts["lr"],
        lr_decay=opts["lr_decay"],
        batch_size=opts["batch_size"],
        max_epochs=opts["max_epochs"],
        patience=opts["patience"],
        margin=opts["margin"],
        h_in=opts["h_in"],
        h_dim=opts["h_dim"],
        dirac=opts["dirac"],
        seed=opts["seed"],
    )
    try:
        params, emb, report = trainer.train(train_arr, n, config, holdout=test_arr)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    trainer.save_embeddings(out, emb)
    report_path = opts["report"] or f"{out}.report.json"
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_report_json(report))
    if opts["save_params"]:
        encoder.save_params(opts["save_params"], params)
    print(
        f"epochs={report.epochs} final_loss={report.losses[-1]:.6g} "
        f"train_error={report.train_errors[-1]:.6g} "
        f"holdout_error={'n/a' if report.holdout_error is None else f'{report.holdout_error:.6g}'} "
        f"wall_seconds={report.wall_seconds:.2f}"
    )
    if not report.converged:
        print("warning: epoch limit reached before the loss plateaued", file=sys.stderr)
        return EXIT_NO_PLATEAU
    return EXIT_OK


def _cmd_eval(args):
    opts = _resolve(args, "eval")
    out = _require_out(opts)
    if not opts["embedding"] or not opts["triplets"]:
        raise UsageError("--embedding and --triplets are required")
    emb = trainer.load_embeddings(opts["embedding"])
    arr = tp.load_triplets(opts["triplets"])
    if int(arr[:, :3].max()) >= len(emb):
        raise DataError(
            f"triplet file references item {int(arr[:, :3].max())} but the "
            f"embedding holds only {len(emb)} items"
        )
    metrics = {"err": triplet_error(arr, emb)}
    notes = []
    ground_truth = None
    if opts["points"]:
        ground_truth = datasets.load_points(opts["points"])
        if len(ground_truth) != len(emb):
            raise DataError(
                f"ground truth has {len(ground_truth)} points but the "
                f"embedding holds {len(emb)} items"
            )
        metrics["procrustes"] = procrustes_distributional(ground_truth.points, emb)
    else:
        notes.append("procrustes skipped: no ground-truth points given")
    if ground_truth is not None and ground_truth.labels is not None:
        k = opts["k"] or int(np.unique(ground_truth.labels).size)
        clusters = kmeans(emb.features(), k, seed=opts["seed"])
        metrics["purity"] = purity(clusters, ground_truth.labels)
    else:
        notes.append("purity skipped: no ground-truth labels given")
    pos, neg = pairs_from_triplets(arr)
    auc, ap = link_prediction_scores(pos, neg, negative_energy_scorer(emb))
    metrics["auc"] = auc
    metrics["ap"] = ap
    write_metrics_report(out, metrics, notes)
    for key, value in metrics.items():
        print(f"{key}={value:.17g}")
    return EXIT_OK


def _cmd_plot(args):
    opts = _resolve(args, "plot")
    out = _require_out(opts)
    if not opts["embedding"]:
        raise UsageError("--embedding is required")
    emb = trainer.load_embeddings(opts["embedding"])
    labels = None
    if opts["points"]:
        ds = datasets.load_points(opts["points"])
        if ds.labels is None:
            raise DataError(f"{opts['points']} carries no label column")
        if len(ds) != len(emb):
            raise DataError(
                f"{opts['points']} has {len(ds)} rows but the embedding "
                f"holds {len(emb)} items"
            )
        labels = ds.labels
    svg = render_svg(
        emb, labels=labels, radius_scale=opts["radius_scale"], canvas=opts["canvas"]
    )
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    print(f"wrote {out}")
    return EXIT_OK


_DISPATCH = {
    "gen": _cmd_gen,
    "triplets": _cmd_triplets,
    "embed": _cmd_embed,
    "eval": _cmd_eval,
    "plot": _cmd_plot,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry_point():
    sys.exit(main())

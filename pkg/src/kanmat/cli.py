"""Command-line entry point: synth, matrix, rank, transform, serve.

Exit codes: 0 success, 1 runtime/IO failure (including CSV parse errors),
2 usage or precondition errors. Flags override values from a ``--config``
JSON file, which overrides built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import dataset as dataset_io
from . import ranking as ranking_mod
from . import render, synth
from .additive import FitConfig
from .errors import CsvParseError, KanmatError
from .forest import ForestParams
from .matrix import compute_baseline, compute_mkan, compute_pkan

MATRIX_KINDS = ("pkan", "mkan", "pearson", "nmi")


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 42)")
    p.add_argument("--config", type=Path, default=None, help="JSON config file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--metric", choices=("nse", "kge"), default=None)
    p.add_argument("--grid", type=int, default=None, help="spline intervals (default 10)")
    p.add_argument("--degree", type=int, default=None, help="spline degree (default 3)")
    p.add_argument("--lambda", dest="ridge_lambda", type=float, default=None,
                   help="ridge strength (default 1e-3)")
    p.add_argument("--prune-tau", type=float, default=None,
                   help="attribution prune threshold (default 0.02)")
    p.add_argument("--holdout", type=float, default=None,
                   help="holdout fraction (default 0.2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kanmat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark dataset")
    p.add_argument("experiment", choices=synth.EXPERIMENTS)
    p.add_argument("-n", "--rows", type=int, default=5000)
    p.add_argument("--shift", type=int, default=150)
    p.add_argument("--ordering", choices=("sorted", "iid"), default="sorted")
    p.add_argument("-o", "--output", type=Path, required=True)
    _common_flags(p)

    p = sub.add_parser("matrix", help="compute an association matrix from a CSV")
    p.add_argument("kind", choices=MATRIX_KINDS)
    p.add_argument("input", type=Path)
    p.add_argument("--targets", default=None, help="comma-separated target rows (mkan)")
    p.add_argument("--exclude-targets", default=None,
                   help="comma-separated names to drop as targets (mkan)")
    p.add_argument("--curve-samples", type=int, default=None)
    p.add_argument("--mi-bins", type=int, default=None)
    _common_flags(p)

    p = sub.add_parser("rank", help="rank inputs per target and evaluate top-k forests")
    p.add_argument("input", type=Path)
    p.add_argument("--targets", required=True, help="comma-separated target columns")
    p.add_argument("--methods", default="mkan,pearson,nmi")
    p.add_argument("--topk", default="2,4,6", help="comma-separated k values")
    p.add_argument("--log-targets", action="store_true",
                   help="log10-transform target columns (floor 1e-6) before ranking")
    _common_flags(p)

    p = sub.add_parser("transform", help="apply an ordered transform list to a CSV")
    p.add_argument("input", type=Path)
    p.add_argument("--ops", default=None,
                   help='e.g. "lag:Ux:50;subtract_group_mean:p:time;drop:z"')
    p.add_argument("--replay", type=Path, default=None,
                   help="history sidecar JSON to replay instead of --ops")
    p.add_argument("-o", "--output", type=Path, required=True)
    _common_flags(p)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8900)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", type=Path, default=None)
    _common_flags(p)

    return parser


def load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise KanmatError("--config must contain a JSON object")
    return cfg


def fit_config_from_args(args) -> FitConfig:
    file_cfg = load_config_file(args.config)
    values = dict(asdict(FitConfig()))
    values.update({k: v for k, v in file_cfg.get("fit", {}).items() if k in values})
    overrides = {
        "seed": args.seed,
        "metric": args.metric,
        "grid": args.grid,
        "degree": args.degree,
        "ridge_lambda": args.ridge_lambda,
        "prune_threshold": args.prune_tau,
        "holdout_fraction": args.holdout,
        "curve_samples": getattr(args, "curve_samples", None),
        "mi_bins": getattr(args, "mi_bins", None),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return FitConfig(**values)


def forest_params_from_args(args) -> ForestParams:
    file_cfg = load_config_file(args.config)
    values = dict(asdict(ForestParams()))
    values.update({k: v for k, v in file_cfg.get("forest", {}).items() if k in values})
    if args.seed is not None:
        values["seed"] = args.seed
    return ForestParams(**values)


def _print_grid(m):
    cols = m.labels
    width = max(10, max(len(c) for c in cols) + 2)
    header = " " * width + "".join(f"{c:>{width}}" for c in cols)
    print(header)
    for row in m.row_labels:
        line = f"{row:>{width}}"
        for col in cols:
            line += f"{m.cell(row, col).strength:>{width}.3f}"
        print(line)


def cmd_synth(args) -> int:
    spec = synth.SynthSpec(args.experiment, args.rows, seed=args.seed if args.seed is not None else 42,
                           shift=args.shift, ordering=args.ordering)
    d = synth.generate(spec)
    args.output.parent.mkdir(parents=True, exist_ok=True)
    d.to_csv(args.output)
    print(f"wrote {args.output} ({d.n_rows} rows)")
    for name in d.names:
        col = d.column(name)
        print(f"  {name}: mean={col.mean():.4f} std={col.std():.4f} "
              f"min={col.min():.4f} max={col.max():.4f}")
    return 0


def cmd_matrix(args) -> int:
    cfg = fit_config_from_args(args)
    d = dataset_io.read_csv(args.input)
    kind = args.kind
    if kind == "pkan":
        m = compute_pkan(d, cfg)
    elif kind == "mkan":
        if args.targets and args.exclude_targets:
            raise KanmatError("--targets and --exclude-targets are mutually exclusive")
        targets = None
        if args.targets:
            targets = [t.strip() for t in args.targets.split(",") if t.strip()]
        elif args.exclude_targets:
            excluded = {t.strip() for t in args.exclude_targets.split(",") if t.strip()}
            for name in excluded:
                if name not in d.names:
                    raise KanmatError(f"unknown column {name!r}")
            targets = [c for c in d.names if c not in excluded]
        m = compute_mkan(d, targets=targets, cfg=cfg)
    else:
        m = compute_baseline(d, kind, cfg)

    args.out.mkdir(parents=True, exist_ok=True)
    json_path = args.out / f"{kind}.json"
    svg_path = args.out / f"{kind}.svg"
    json_path.write_text(render.export_json(m), encoding="utf-8")
    svg_path.write_text(render.render_svg(m), encoding="utf-8")
    _print_grid(m)
    print(f"wrote {json_path} and {svg_path}")
    return 0


def cmd_rank(args) -> int:
    cfg = fit_config_from_args(args)
    params = forest_params_from_args(args)
    d = dataset_io.read_csv(args.input)
    targets = [t.strip() for t in args.targets.split(",") if t.strip()]
    for t in targets:
        if t not in d.names:
            raise KanmatError(f"unknown target {t!r}")
    if args.log_targets:
        for t in targets:
            d = dataset_io.apply_transform(d, dataset_io.TransformSpec("log", t))
    methods = [m.strip().lower() for m in args.methods.split(",") if m.strip()]
    ks = [int(k) for k in args.topk.split(",") if k.strip()]

    args.out.mkdir(parents=True, exist_ok=True)
    eval_rows = [["method", *(f"top_{k}" for k in sorted(set(ks)))]]
    for method in methods:
        if method == "mkan":
            report = ranking_mod.multi_target_ranking(d, targets, cfg)
        else:
            report = ranking_mod.rank_by_baseline(d, targets, method, cfg)
        rank_path = args.out / f"ranking_{method}.csv"
        rank_path.write_text(report.to_table_csv(), encoding="utf-8")
        topk = ranking_mod.evaluate_topk(d, report, targets, ks, params)
        eval_rows.append(topk.to_csv_row(method))
        detail = {
            str(k): {
                "features": list(topk.scores[k].features),
                "per_target": topk.scores[k].per_target,
                "mean": topk.scores[k].mean,
                "pooled": topk.scores[k].pooled,
            }
            for k in topk.ks
        }
        (args.out / f"topk_{method}.json").write_text(
            json.dumps(detail, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"{method}: ranked {len(report.order)} inputs -> {rank_path}")

    eval_path = args.out / "topk_eval.csv"
    eval_path.write_text("\n".join(",".join(r) for r in eval_rows) + "\n", encoding="utf-8")
    print(f"wrote {eval_path}")
    return 0


def cmd_transform(args) -> int:
    if (args.ops is None) == (args.replay is None):
        raise KanmatError("provide exactly one of --ops or --replay")
    d = dataset_io.read_csv(args.input)
    if args.replay is not None:
        with open(args.replay, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        specs = [dataset_io.TransformSpec.from_dict(s) for s in doc["history"]]
    else:
        specs = dataset_io.parse_op_string(args.ops)
    d = dataset_io.apply_transforms(d, specs)
    args.output.parent.mkdir(parents=True, exist_ok=True)
    d.to_csv(args.output)
    sidecar = args.output.with_suffix(args.output.suffix + ".history.json")
    sidecar.write_text(
        json.dumps({"history": [t.to_dict() for t in d.history]}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {args.output} ({d.n_rows} rows, {len(d.names)} columns) and {sidecar}")
    return 0


def cmd_serve(args) -> int:
    import socket

    import uvicorn

    from .service import create_app

    # fail fast with a clear exit code if the port is taken
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    finally:
        probe.close()

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "synth": cmd_synth,
        "matrix": cmd_matrix,
        "rank": cmd_rank,
        "transform": cmd_transform,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except CsvParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KanmatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():  # console_scripts target
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()

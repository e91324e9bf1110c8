"""Command-line entry point: ``motivscore <subcommand> ...``.

Exit codes: 0 success, 1 data or validation error, 2 config error, 3 I/O error.
"""

import argparse
import csv
import json
import os
import sys

from . import __version__
from .data import (
    NUMERIC,
    class_counts,
    derive_strategy_labels,
    load_csv,
    summary_statistics,
    synthesize_dataset,
    write_csv,
)
from .errors import ConfigError, DataError
from .experiment import (
    config_from_mapping,
    emit_report,
    flags_from_report,
    load_config,
    load_report,
    report_json,
    run_experiment,
    run_importance,
)

SEED_ENV = "MOTIVSCORE_SEED"
EXIT_DATA, EXIT_CONFIG, EXIT_IO = 1, 2, 3


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _write_text(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_stats(args):
    d = load_csv(args.csv, strict=args.strict)
    stats = summary_statistics(d, NUMERIC)
    if args.format == "json":
        body = {"n": len(d), "features": {name: s._asdict() for name, s in stats.items()}}
        print(json.dumps(body, indent=2))
        return
    print(f"n = {len(d)}")
    print(f"{'feature':<18}{'mean':>8}{'sd':>8}{'min':>8}{'max':>8}")
    for name, s in stats.items():
        print(f"{name:<18}{s.mean:>8.3f}{s.sd:>8.3f}{s.min:>8.2f}{s.max:>8.2f}")


def cmd_synth(args):
    seed = args.seed if args.seed is not None else (_default_seed() or 0)
    write_csv(synthesize_dataset(args.n, seed), args.out)


def cmd_labels(args):
    d = derive_strategy_labels(load_csv(args.csv, strict=args.strict))
    counts = class_counts(d)
    for label, count in counts.items():
        print(f"{label.value},{count},{count / len(d):.4f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "strategy"])
            writer.writerows((i, label.value) for i, label in enumerate(d.labels))


def _config(args):
    overrides = {"task": args.task}
    seed = args.seed if args.seed is not None else _default_seed()
    if seed is not None:
        overrides["seed"] = seed
    if getattr(args, "models", None):
        overrides["models"] = tuple(m.strip() for m in args.models.split(",") if m.strip())
    if getattr(args, "balance", None):
        overrides["balancing"] = args.balance
    if args.data:
        overrides["data"] = args.data
    if args.config:
        return load_config(args.config, **overrides)
    return config_from_mapping(overrides)


def cmd_experiment(args):
    cfg = _config(args)
    report = run_experiment(cfg)
    if args.out is None:
        if args.format != "json":
            raise ConfigError("--format csv needs --out DIR")
        sys.stdout.write(report_json(report))
        return
    os.makedirs(args.out, exist_ok=True)
    if args.format == "json":
        paths = emit_report(report, "json", os.path.join(args.out, f"{cfg.task}_report.json"))
    else:
        paths = emit_report(report, "csv", args.out)
    for p in paths:
        print(p)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)


def cmd_importance(args):
    result = run_importance(_config(args))
    if args.format == "csv":
        rows = "".join(f"{r['feature']},{r['value']:.6f}\n" for r in result["importance"])
        _write_text("feature,value\n" + rows, args.out)
    else:
        _write_text(json.dumps(result, indent=2) + "\n", args.out)


def cmd_at_risk(args):
    model, flags = flags_from_report(load_report(args.model_report), args.threshold, args.model)
    lines = [f"# model={model} threshold={args.threshold}", "index,predicted_grade"]
    lines += [f"{f.index},{f.predicted_grade:.4f}" for f in flags]
    _write_text("\n".join(lines) + "\n", args.out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="motivscore",
        description="Grade and learning-strategy prediction from motivation questionnaires.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="per-feature summary of a student CSV")
    p.add_argument("csv")
    p.add_argument("--strict", action="store_true", help="enforce the published value ranges")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write a synthetic student CSV")
    p.add_argument("--n", type=int, default=924)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("labels", help="derive Deep/Surface labels and print class counts")
    p.add_argument("csv")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", help="also write index,strategy rows here")
    p.set_defaults(func=cmd_labels)

    def experiment_args(p, with_models=True):
        p.add_argument("--task", choices=("regression", "classification"), required=True)
        p.add_argument("--config", help="flat key = value file; flags given here win")
        p.add_argument("--data", help="student CSV (default: synthetic data)")
        p.add_argument("--seed", type=int)
        p.add_argument("--balance", choices=("paper-faithful", "leakage-safe", "none"))
        if with_models:
            p.add_argument("--models", help="comma-separated subset of RF,LR,SVM,DT,KNN")

    p = sub.add_parser("experiment", help="run the regression or classification experiment")
    experiment_args(p)
    p.add_argument("--out", help="output directory (default: JSON on stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("importance", help="random-forest feature importance")
    experiment_args(p, with_models=False)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("at-risk", help="students predicted below a grade threshold")
    p.add_argument("--model-report", required=True, help="JSON report of a regression run")
    p.add_argument("--threshold", type=float, default=4.0)
    p.add_argument("--model", help="model whose predictions to use (default: report's pick)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_at_risk)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DataError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())

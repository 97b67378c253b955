"""Command-line entry point: ``faircart {gen-synth,train,tune,evaluate,predict}``.

Exit status: 0 success, 2 configuration error, 3 data error, 4 internal error.
Failures print one JSON object to stderr. Output files are written only once
every computation has succeeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__, _kernels, synthdata
from .dataset import (HoldoutPlan, holdout_split, load_column_specs, load_csv, load_features,
                      specs_to_doc, write_rows)
from .errors import ConfigError, DataError, FairCartError, SchemaError
from .fairmetrics import DEFAULT_ALPHA, format_report, statistical_parity
from .tree import GrowConfig, grow, load_model, predict, serialize
from .tuner import DEFAULT_EPSILON, DEFAULT_GRID, evaluate, format_table, summary, tune, write_curve

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("faircart")


def _on_off(value: str) -> bool:
    v = value.lower()
    if v in ("on", "true", "yes", "1"):
        return True
    if v in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {value!r}")


def _grid(value: str) -> list[float]:
    try:
        return [float(x) for x in value.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {value!r}") from exc


def _write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _resolved(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _envelope(args, **body) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
            "backend": _kernels.backend_name(), "run_config": _resolved(args), **body}


def cmd_gen_synth(args) -> int:
    cfg = synthdata.SynthConfig(n=args.n, seed=args.seed, s_coding=args.s_coding)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    synthdata.write_csv(cfg, out)
    if args.config_out:
        _write_json(Path(args.config_out), specs_to_doc(synthdata.column_specs()))
    print(f"wrote {cfg.n} rows to {out}")
    return EXIT_OK


def _grow_config(args, lambda_: float) -> GrowConfig:
    return GrowConfig(max_depth=args.depth, lambda_=lambda_, alpha=args.alpha,
                      min_leaf=args.min_leaf, min_split=args.min_split,
                      fairness_enabled=args.fairness, parity_scope=args.parity_scope)


def cmd_train(args) -> int:
    if args.fairness and args.lambda_ is None:
        raise ConfigError("--lambda is required unless --fairness off")
    lam = 1.0 if args.lambda_ is None else args.lambda_
    specs = load_column_specs(args.config)
    config = _grow_config(args, lam)
    data = load_csv(args.data, specs)
    train, test = holdout_split(data, HoldoutPlan(args.train_frac, args.seed, args.stratify))
    model = grow(train, config)
    ev_train = evaluate(model, train, args.alpha)
    ev_test = evaluate(model, test, args.alpha)
    sample = statistical_parity(data.target, data.sensitive, args.alpha)
    report = _envelope(
        args,
        model_config=config.to_dict(),
        n={"total": data.n, "train": train.n, "test": test.n},
        sample=sample.to_dict(),
        train=ev_train.to_dict(),
        test=ev_test.to_dict(),
        tree={"depth": model.depth, "leaves": model.n_leaves},
    )
    out = Path(args.out_dir)
    _write_json(out / "model.json", serialize(model))
    _write_json(out / "report.json", report)
    print(f"sample: {format_report(sample)}")
    print(f"train:  {format_report(ev_train.fairness, ev_train.accuracy)}")
    print(f"test:   {format_report(ev_test.fairness, ev_test.accuracy)}")
    return EXIT_OK


def cmd_tune(args) -> int:
    specs = load_column_specs(args.config)
    _grow_config(args, 1.0)
    data = load_csv(args.data, specs)
    result = tune(data, grid=args.grid, depth=args.depth, alpha=args.alpha, seed=args.seed,
                  epsilon=args.epsilon, train_fraction=args.train_frac, stratified=args.stratify,
                  min_leaf=args.min_leaf, min_split=args.min_split, parity_scope=args.parity_scope)
    doc = _envelope(args, **summary(result),
                    n={"total": data.n, "train": int(result.partition["train"].size),
                       "inner": int(result.partition["inner"].size),
                       "val": int(result.partition["val"].size),
                       "test": int(result.partition["test"].size)},
                    test_report=result.test_report.to_dict(),
                    baseline_report=result.baseline_report.to_dict())
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_curve(result.curve, out / "curve.csv")
    _write_json(out / "model.json", serialize(result.final_model))
    _write_json(out / "baseline_model.json", serialize(result.baseline_model))
    _write_json(out / "summary.json", doc)
    write_rows(args.data, out / "test.csv", result.partition["test"])
    print(f"lambda* = {result.lambda_star:g}")
    print(format_table(result))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    specs = load_column_specs(args.config)
    data = load_csv(args.data, specs, feature_names=model.feature_names)
    ev = evaluate(model, data, args.alpha)
    doc = _envelope(args, n=data.n, **ev.to_dict())
    if args.out:
        _write_json(Path(args.out), doc)
    else:
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write("\n")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model)
    specs = load_column_specs(args.config)
    X, rows = load_features(args.data, specs, model.feature_names)
    pred = predict(model, X)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("row", "prediction"))
        w.writerows(zip(rows.tolist(), pred.tolist()))
    print(f"wrote {pred.size} predictions to {out}")
    return EXIT_OK


def _add_model_args(p: argparse.ArgumentParser, depth_required: bool = True) -> None:
    p.add_argument("--data", required=True, help="input CSV")
    p.add_argument("--config", required=True, help="column spec JSON")
    p.add_argument("--depth", type=int, required=depth_required, default=3, help="maximum tree depth")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="significance level of the parity interval")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-frac", type=float, default=0.7)
    p.add_argument("--stratify", type=_on_off, default=True, metavar="on|off")
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--min-split", type=int, default=10)
    p.add_argument("--parity-scope", choices=("node", "tree"), default="node",
                   help="population on which a candidate split's parity is measured")
    p.add_argument("--out-dir", default="out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faircart", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="write the synthetic dataset as CSV")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s-coding", choices=synthdata.S_CODINGS, default="factor")
    p.add_argument("--out", required=True)
    p.add_argument("--config-out", help="also write a matching column spec JSON here")
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("train", help="fit one tree on a holdout split")
    _add_model_args(p)
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--fairness", type=_on_off, default=True, metavar="on|off")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="choose lambda on a validation split")
    _add_model_args(p)
    p.add_argument("--grid", type=_grid, default=list(DEFAULT_GRID), help="comma-separated lambdas")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.set_defaults(func=cmd_tune, fairness=True)

    p = sub.add_parser("evaluate", help="score a saved model on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="label the rows of an unlabeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)
    return parser


def _fail(code: int, kind: str, exc: BaseException) -> int:
    json.dump({"status": kind, "exit_code": code, "error": type(exc).__name__, "message": str(exc)},
              sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config error", exc)
    except (DataError, SchemaError) as exc:
        return _fail(EXIT_DATA, "data error", exc)
    except FairCartError as exc:
        return _fail(EXIT_INTERNAL, "internal error", exc)
    except (AssertionError, ValueError, ArithmeticError) as exc:
        return _fail(EXIT_INTERNAL, "internal error", exc)


if __name__ == "__main__":
    sys.exit(main())

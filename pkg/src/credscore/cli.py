"""``credscore`` command line.

Every command writes its artifacts into ``--out`` together with
``manifest.json`` (arguments, seed, input and artifact hashes). Exit codes:
0 success, 2 usage, 3 data error, 4 model error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifiers import KINDS, ClassifierSpec
from .dataset import Dataset, format_schema, parse_csv, parse_schema, stratified_folds, to_csv
from .discretize import apply_discretization, fit_discretizer
from .errors import CredscoreError, DataError, ModelError
from .evaluate import cost_sweep, cross_validate, feature_sweep
from .persist import dumps, load_pipeline
from .rank import PipelineSpec, fit_pipeline, parse_threshold_mode, predict_dataset, rank_features, score_dataset
from .reports import (cost_sweep_csv, cv_metrics_csv, feature_sweep_csv, ranking_csv, roc_csv,
                      scores_csv)
from .scorecard import woe_csv, woe_report, woe_table
from .synth import SynthSpec, generate

log = logging.getLogger("credscore")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 2, 3, 4


class UsageError(CredscoreError):
    exit_code = EXIT_USAGE


# -- helpers ------------------------------------------------------------------

def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects artifacts for one command and writes the manifest last."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts: dict[str, str] = {}
        self.inputs: dict[str, str] = {}

    def input(self, path, error=DataError) -> Path:
        path = Path(path)
        if not path.is_file():
            raise error(f"cannot read {path}")
        self.inputs[str(path)] = _sha256_file(path)
        return path

    def write(self, name: str, text: str):
        data = text.encode("utf-8")
        (self.out / name).write_bytes(data)
        self.artifacts[name] = hashlib.sha256(data).hexdigest()
        log.info("wrote %s", self.out / name)

    def finish(self):
        skip = {"func", "out", "verbose", "jobs"}
        manifest = {
            "command": self.args.command,
            "arguments": {k: v for k, v in sorted(vars(self.args).items()) if k not in skip},
            "seed": getattr(self.args, "seed", None),
            "inputs": self.inputs,
            "artifacts": self.artifacts,
            "versions": {"credscore": __version__, "numpy": np.__version__,
                         "python": platform.python_version()},
        }
        text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        (self.out / "manifest.json").write_text(text, encoding="utf-8")


def _load_data(run: Run, args) -> Dataset:
    data = run.input(args.data)
    schema_path = Path(args.schema) if args.schema else data.parent / "schema.txt"
    schema = parse_schema(run.input(schema_path).read_text(encoding="utf-8"))
    with open(data, newline="", encoding="utf-8") as fh:
        d = parse_csv(fh, schema, args.missing)
    group = getattr(args, "group", "combined")
    return d.select_group(group) if group else d


def _classifier_spec(args, kind: str | None = None) -> ClassifierSpec:
    kw = {"kind": kind or args.classifier}
    for flag, field in (("trees", "n_trees"), ("C", "C"), ("min_leaf", "min_leaf"),
                        ("epochs", "epochs")):
        value = getattr(args, flag, None)
        if value is not None:
            kw[field] = value
    if getattr(args, "prune", False):
        kw["prune"] = True
    return ClassifierSpec(**kw)


def _n_features(text: str, d: Dataset) -> int | None:
    if text == "all":
        return None
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"--features expects a count, 'all' or 'sweep', got {text!r}") from None
    m = len(d.schema.features)
    if not 1 <= n <= m:
        raise UsageError(f"--features {n} outside [1, {m}]")
    return n


def _pipeline_spec(args, d: Dataset) -> PipelineSpec:
    try:
        mode = parse_threshold_mode(args.threshold)
    except ModelError as e:
        raise UsageError(str(e)) from None
    return PipelineSpec(_classifier_spec(args), _n_features(args.features, d), args.metric, mode)


# -- commands -----------------------------------------------------------------

def cmd_synth(args, run: Run):
    strength = {"form": args.form_strength, "bank": args.bank_strength}
    d = generate(SynthSpec(n_good=args.n_good, n_bad=args.n_bad, strength=strength,
                           correlation=args.correlation, missing_rate=args.missing_rate,
                           seed=args.seed))
    run.write("data.csv", to_csv(d, args.missing))
    run.write("schema.txt", format_schema(d.schema))


def cmd_rank(args, run: Run):
    d = _load_data(run, args)
    disc = apply_discretization(d, fit_discretizer(d))
    run.write("ranking.csv", ranking_csv(rank_features(disc, args.metric), d.schema))


def cmd_train(args, run: Run):
    d = _load_data(run, args)
    spec = _pipeline_spec(args, d)
    if args.holdout_fold is not None:
        if not 0 <= args.holdout_fold < args.folds:
            raise UsageError("--holdout-fold must lie in [0, --folds)")
        train, _ = stratified_folds(d, args.folds, args.seed).train_test(args.holdout_fold)
        d = d.subset(train)
    p = fit_pipeline(d, spec, args.seed, jobs=args.jobs)
    run.write("pipeline.txt", dumps(p))


def cmd_evaluate(args, run: Run):
    if args.features == "sweep":
        args.classifiers = args.classifier
        return cmd_sweep_features(args, run)
    d = _load_data(run, args)
    res = cross_validate(d, _pipeline_spec(args, d), args.folds, args.seed, jobs=args.jobs)
    run.write("metrics.csv", cv_metrics_csv(res))
    run.write("roc.csv", roc_csv(res.pooled_curve))


def cmd_sweep_features(args, run: Run):
    d = _load_data(run, args)
    kinds = list(KINDS) if args.classifiers == "all" else args.classifiers.split(",")
    bad = [k for k in kinds if k not in KINDS]
    if bad:
        raise UsageError(f"unknown classifier(s) {bad}; choose from {', '.join(KINDS)}")
    specs = [_classifier_spec(args, k) for k in kinds]
    rows = feature_sweep(d, specs, args.metric, args.folds, args.seed, jobs=args.jobs)
    run.write("feature_sweep.csv", feature_sweep_csv(rows))


def _parse_ratios(text: str) -> list[float]:
    try:
        ratios = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--ratios expects comma-separated numbers, got {text!r}") from None
    if not ratios or any(x <= 0 for x in ratios):
        raise UsageError("--ratios must be positive")
    return sorted(ratios)


def cmd_sweep_costs(args, run: Run):
    ratios = _parse_ratios(args.ratios)
    p = load_pipeline(run.input(args.model, ModelError))
    d = _load_data(run, args)
    run.write("cost_sweep.csv", cost_sweep_csv(cost_sweep(p, d, ratios)))


def cmd_score(args, run: Run):
    p = load_pipeline(run.input(args.model, ModelError))
    d = _load_data(run, args)
    s = score_dataset(p, d)
    labels = (p.schema.positive_label, p.schema.negative_label)
    run.write("scores.csv", scores_csv(s, predict_dataset(p, d), d.y, labels))


def cmd_woe_report(args, run: Run):
    d = _load_data(run, args)
    if args.model:
        p = load_pipeline(run.input(args.model, ModelError))
        cuts = p.cuts
        names = [n for n in p.selected if n in d.schema.names]
        source = f"cut points and feature selection from {args.model}"
    else:
        cuts = fit_discretizer(d)
        names = d.schema.names
        source = "cut points fitted on the same data"
    if args.features:
        wanted = args.features.split(",")
        unknown = [n for n in wanted if n not in d.schema.names]
        if unknown:
            raise UsageError(f"unknown feature(s) {unknown}")
        names = [n for n in names if n in wanted]
    sub = d.select(names)
    missing = [f.name for f in sub.schema.features if f.is_numeric and f.name not in cuts.cuts]
    if missing:
        raise ModelError(f"pipeline has no cut points for {missing}")
    disc = apply_discretization(sub, cuts)
    rows = woe_table(disc)
    note = (f"Weight of evidence computed on the full dataset {args.data} "
            f"({len(d)} instances); {source}.")
    run.write("woe.csv", woe_csv(rows))
    run.write("woe.txt", woe_report(rows, note))


# -- argument parsing ---------------------------------------------------------

def _common(p, data=True):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--missing", default="?", help="missing-value token (default '?')")
    p.add_argument("-v", "--verbose", action="store_true")
    if data:
        p.add_argument("--data", required=True, help="dataset CSV")
        p.add_argument("--schema", help="schema sidecar (default: schema.txt next to --data)")


def _group(p):
    p.add_argument("--group", choices=("form", "bank", "combined"), default="combined",
                   help="feature set: application form, bank statement, or both")


def _model_flags(p, sweep=False):
    if not sweep:
        p.add_argument("--classifier", choices=KINDS, default="naive_bayes")
    p.add_argument("--trees", type=int, help="forest size (default 100)")
    p.add_argument("--C", type=float, help="SVM complexity (default 1)")
    p.add_argument("--min-leaf", dest="min_leaf", type=int, help="tree/forest minimum leaf size")
    p.add_argument("--prune", action="store_true", help="collapse unhelpful tree splits")
    p.add_argument("--epochs", type=int, help="SVM epochs")
    p.add_argument("--metric", choices=("chi2", "infogain"), default="chi2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="credscore", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"credscore {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset and schema")
    _common(p, data=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-good", dest="n_good", type=int, default=7401)
    p.add_argument("--n-bad", dest="n_bad", type=int, default=121)
    p.add_argument("--form-strength", dest="form_strength", type=float, default=1.0)
    p.add_argument("--bank-strength", dest="bank_strength", type=float, default=1.0)
    p.add_argument("--correlation", type=float, default=0.0)
    p.add_argument("--missing-rate", dest="missing_rate", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rank", help="rank features by chi-squared or information gain")
    _common(p)
    _group(p)
    p.add_argument("--metric", choices=("chi2", "infogain"), default="chi2")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("train", help="fit and save a pipeline")
    _common(p)
    _group(p)
    _model_flags(p)
    p.add_argument("--features", default="all", help="number of top-ranked features, or 'all'")
    p.add_argument("--threshold", default="f1", help="half, f1 or cost:X")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--holdout-fold", dest="holdout_fold", type=int,
                   help="train on all stratified folds except this one")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="stratified k-fold evaluation")
    _common(p)
    _group(p)
    _model_flags(p)
    p.add_argument("--features", default="all", help="count, 'all', or 'sweep'")
    p.add_argument("--threshold", default="f1", help="half, f1 or cost:X")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep-features", help="AUC as features are removed one by one")
    _common(p)
    _group(p)
    _model_flags(p, sweep=True)
    p.add_argument("--classifier", dest="classifiers", default="naive_bayes",
                   help="comma-separated classifier kinds, or 'all'")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep_features)

    p = sub.add_parser("sweep-costs", help="metrics of a saved pipeline across cost ratios")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--ratios", default="1,2,5,10,20,50")
    p.set_defaults(func=cmd_sweep_costs, group=None)

    p = sub.add_parser("score", help="score a dataset with a saved pipeline")
    _common(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_score, group=None)

    p = sub.add_parser("woe-report", help="weight-of-evidence table")
    _common(p)
    _group(p)
    p.add_argument("--model", help="reuse cut points and selection from a saved pipeline")
    p.add_argument("--features", help="comma-separated feature names")
    p.set_defaults(func=cmd_woe_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.captureWarnings(True)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        run = Run(args)
        args.func(args, run)
        run.finish()
    except CredscoreError as e:
        print(f"credscore {args.command}: error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"credscore {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

"""End-to-end regression and classification experiments and their reports."""

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field, fields, replace
from typing import NamedTuple, Optional

import numpy as np

from . import __version__
from .data import (
    Balancing,
    StrategyLabel,
    derive_strategy_labels,
    load_csv,
    oversample_indices,
    random_oversample,
    synthesize_dataset,
    train_test_split,
)
from .errors import ConfigError
from .evaluation import classification_metrics, confusion, cross_validate, mae
from .models import CLASSIFICATION, DEFAULT_PARAMS, MODEL_NAMES, REGRESSION, ModelSpec
from .rng import split_mix
from .tree import mdi_importance

# seed streams derived from the master seed
SPLIT_STREAM, OVERSAMPLE_STREAM, CV_STREAM, FIT_STREAM = range(4)

MOTIVATION_FEATURES = ("intrinsic", "extrinsic", "autonomy", "relatedness", "competence",
                       "self_esteem")
STRATEGY_FEATURES = ("deep_strategy", "surface_strategy")
DEMOGRAPHIC_FEATURES = ("study_year", "age")
POSITIVE_LABEL = StrategyLabel.DEEP.value
METRIC_ROWS = ("accuracy", "precision", "recall", "f1", "tp", "fp", "tn", "fn")


@dataclass(frozen=True)
class ExperimentConfig:
    task: str = REGRESSION
    models: tuple = MODEL_NAMES
    seed: int = 0
    test_fraction: Optional[float] = None
    cv_folds: Optional[int] = None
    balancing: Optional[str] = None
    include_gender: bool = False
    include_strategy_scores: Optional[bool] = None
    standardize: bool = False
    hyperparameters: dict = field(default_factory=dict)
    data: Optional[str] = None
    strict: bool = False
    synthetic_n: int = 924
    synthetic_seed: int = 0
    at_risk_threshold: float = 4.0
    at_risk_model: Optional[str] = None
    record_timing: bool = False

    def __post_init__(self):
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ConfigError(f"task must be regression or classification, got {self.task!r}")
        models = tuple(self.models)
        bad = [m for m in models if m not in MODEL_NAMES]
        if bad or not models or len(set(models)) != len(models):
            raise ConfigError(f"models must be distinct names from {MODEL_NAMES}, got {models}")
        object.__setattr__(self, "models", models)
        if self.balancing is not None:
            try:
                object.__setattr__(self, "balancing", Balancing(self.balancing).value)
            except ValueError:
                raise ConfigError(f"unknown balancing mode {self.balancing!r}") from None
        if self.test_fraction is not None and not 0 < self.test_fraction < 1:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if self.cv_folds is not None and self.cv_folds < 2:
            raise ConfigError(f"cv_folds must be at least 2, got {self.cv_folds}")
        for name, params in self.hyperparameters.items():
            if name not in MODEL_NAMES:
                raise ConfigError(f"hyperparameters for unknown model {name!r}")
            unknown = set(params) - set(DEFAULT_PARAMS[name])
            if unknown:
                raise ConfigError(f"{name} has no parameter(s) {sorted(unknown)}")
        if self.at_risk_model is not None and self.at_risk_model not in MODEL_NAMES:
            raise ConfigError(f"unknown at_risk_model {self.at_risk_model!r}")

    @property
    def regression(self):
        return self.task == REGRESSION

    @property
    def resolved_test_fraction(self):
        if self.test_fraction is not None:
            return self.test_fraction
        return 0.3 if self.regression else 0.2

    @property
    def resolved_cv_folds(self):
        if self.cv_folds is not None:
            return self.cv_folds
        return 10 if self.regression else 5

    @property
    def resolved_balancing(self):
        if self.balancing is not None:
            return Balancing(self.balancing)
        return Balancing.NONE if self.regression else Balancing.PAPER_FAITHFUL

    @property
    def features(self):
        strategy = self.include_strategy_scores
        if strategy is None:
            strategy = self.regression
        names = MOTIVATION_FEATURES + (STRATEGY_FEATURES if strategy else ()) \
            + DEMOGRAPHIC_FEATURES
        return names + (("gender",) if self.include_gender else ())

    def spec(self, name):
        return ModelSpec(name, self.task, dict(self.hyperparameters.get(name, {})),
                         self.standardize)

    def echo(self):
        out = asdict(self)
        out["models"] = list(self.models)
        out.update(test_fraction=self.resolved_test_fraction,
                   cv_folds=self.resolved_cv_folds,
                   balancing=self.resolved_balancing.value,
                   include_strategy_scores="deep_strategy" in self.features,
                   features=list(self.features))
        return out


@dataclass
class ExperimentReport:
    toolkit_version: str
    task: str
    config: dict
    data: dict
    split: dict
    features: list
    models: list
    importance: Optional[list] = None
    at_risk: Optional[dict] = None
    predictions: Optional[dict] = None
    warnings: list = field(default_factory=list)
    wall_clock_seconds: Optional[float] = None

    def to_dict(self):
        out = asdict(self)
        if out["wall_clock_seconds"] is None:
            del out["wall_clock_seconds"]
        return out

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


class AtRiskFlag(NamedTuple):
    index: int
    predicted_grade: float
    threshold: float


# --------------------------------------------------------------------------
# config file

def _parse_scalar(text):
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null", ""):
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_config_text(text):
    """``key = value`` lines; ``#`` starts a comment; ``MODEL.param`` sets a hyperparameter."""
    values, hyper = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." in key:
            model, param = key.split(".", 1)
            hyper.setdefault(model, {})[param] = _parse_scalar(value)
        elif key == "models":
            values[key] = tuple(m.strip() for m in value.split(",") if m.strip())
        else:
            values[key] = _parse_scalar(value)
    return values, hyper


def config_from_mapping(values, hyper=None, base=None):
    """Build (or update ``base``) from parsed values; unknown keys are errors."""
    allowed = {f.name for f in fields(ExperimentConfig)} - {"hyperparameters"}
    unknown = set(values) - allowed
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    merged = dict(base.hyperparameters) if base else {}
    for model, params in (hyper or {}).items():
        merged[model] = {**merged.get(model, {}), **params}
    kwargs = dict(values, hyperparameters=merged)
    try:
        return replace(base, **kwargs) if base else ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        values, hyper = parse_config_text(fh.read())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(values, hyper)


# --------------------------------------------------------------------------
# experiments

def load_dataset(cfg):
    if cfg.data:
        return load_csv(cfg.data, strict=cfg.strict), {"source": os.path.basename(cfg.data)}
    d = synthesize_dataset(cfg.synthetic_n, cfg.synthetic_seed)
    return d, {"source": "synthetic", "synthetic_n": cfg.synthetic_n,
               "synthetic_seed": cfg.synthetic_seed}


def _counts_dict(labels):
    counts = {label.value: 0 for label in StrategyLabel}
    for label in labels:
        counts[StrategyLabel(label).value] += 1
    return counts


def _cv_summary(cv, metric):
    return {"metric": metric, "folds": len(cv.per_fold), "per_fold": list(cv.per_fold),
            "mean": cv.mean, "sd": cv.sd}


def _evaluate_models(cfg, X_train, y_train, X_test, metric):
    cv_seed = split_mix(cfg.seed, CV_STREAM)
    fit_seed = split_mix(cfg.seed, FIT_STREAM)
    results, trained, warnings = [], {}, []
    for name in cfg.models:
        spec = cfg.spec(name)
        cv = cross_validate(spec, X_train, y_train, cfg.resolved_cv_folds, cv_seed, metric)
        model = spec.fit(X_train, y_train, fit_seed)
        warnings.extend(f"{name} cv {w}" for w in cv.warnings)
        warnings.extend(f"{name} final fit: {w}" for w in model.warnings)
        trained[name] = model
        results.append({"model": name, "cv": _cv_summary(cv, metric),
                        "fitted": model.describe(), "predict": model.predict(X_test)})
    return results, trained, warnings


def _importance(cfg, trained):
    if "RF" not in trained:
        return None
    values = mdi_importance(trained["RF"].model)
    ranked = sorted(zip(cfg.features, values), key=lambda fv: (-fv[1], cfg.features.index(fv[0])))
    return [{"feature": f, "value": float(v)} for f, v in ranked]


def run_regression_experiment(cfg, dataset=None, data_info=None):
    """70/30 split, k-fold CV on train, test MAE per model sorted ascending."""
    if not cfg.regression:
        raise ConfigError("run_regression_experiment needs task=regression")
    start = time.perf_counter()
    if dataset is None:
        dataset, data_info = load_dataset(cfg)
    split = train_test_split(dataset, cfg.resolved_test_fraction,
                             split_mix(cfg.seed, SPLIT_STREAM))
    X_train, X_test = split.train.matrix(cfg.features), split.test.matrix(cfg.features)
    y_train, y_test = split.train.column("performance"), split.test.column("performance")
    results, trained, warnings = _evaluate_models(cfg, X_train, y_train, X_test, "mae")
    predictions = {"index": list(split.test_indices), "actual": [float(v) for v in y_test]}
    for r in results:
        pred = r.pop("predict")
        r["test"] = {"mae": mae(y_test, pred).mae, "n": len(y_test)}
        predictions[r["model"]] = [float(v) for v in pred]
    results.sort(key=lambda r: (r["test"]["mae"], cfg.models.index(r["model"])))

    chosen = cfg.at_risk_model or results[0]["model"]
    if chosen not in trained:
        raise ConfigError(f"at_risk_model {chosen!r} was not trained")
    flags = flag_predictions(predictions[chosen], cfg.at_risk_threshold, split.test_indices)
    report = ExperimentReport(
        toolkit_version=__version__,
        task=cfg.task,
        config=cfg.echo(),
        data=dict(data_info or {}, n_records=len(dataset)),
        split={"test_fraction": cfg.resolved_test_fraction, "n_train": len(split.train),
               "n_test": len(split.test), "balancing": Balancing.NONE.value,
               "baseline_mae": mae(y_test, np.full(len(y_test), y_train.mean())).mae},
        features=list(cfg.features),
        models=results,
        importance=_importance(cfg, trained),
        at_risk={"model": chosen, "threshold": cfg.at_risk_threshold,
                 "flags": [f._asdict() for f in flags]},
        predictions=predictions,
        warnings=warnings,
    )
    if cfg.record_timing:
        report.wall_clock_seconds = time.perf_counter() - start
    return report


def classification_split(cfg, dataset):
    """Labelled train/test datasets per the balancing mode, plus bookkeeping.

    paper-faithful oversamples the whole dataset and then splits, so copies
    of one minority record can land on both sides; leakage-safe splits first
    and oversamples only the training part.
    """
    labelled = derive_strategy_labels(dataset)
    mode = cfg.resolved_balancing
    split_seed = split_mix(cfg.seed, SPLIT_STREAM)
    os_seed = split_mix(cfg.seed, OVERSAMPLE_STREAM)
    info = {"balancing": mode.value, "original_counts": _counts_dict(labelled.labels)}
    if mode == Balancing.PAPER_FAITHFUL:
        source = oversample_indices(labelled.labels, os_seed)
        pool = labelled.subset(source)
        info["balanced_counts"] = _counts_dict(pool.labels)
        split = train_test_split(pool, cfg.resolved_test_fraction, split_seed, mode)
        train, test = split.train, split.test
        test_index = [int(source[i]) for i in split.test_indices]
    else:
        split = train_test_split(labelled, cfg.resolved_test_fraction, split_seed, mode)
        train, test = split.train, split.test
        if mode == Balancing.LEAKAGE_SAFE:
            train = random_oversample(train, os_seed)
        test_index = list(split.test_indices)
    info.update(test_fraction=cfg.resolved_test_fraction, n_train=len(train), n_test=len(test),
                train_counts=_counts_dict(train.labels), test_counts=_counts_dict(test.labels))
    return train, test, test_index, info


def _labels_array(d):
    return np.array([label.value for label in d.labels])


def run_classification_experiment(cfg, dataset=None, data_info=None):
    """Balance, 80/20 split, k-fold CV accuracy, test metrics with Deep as positive."""
    if cfg.regression:
        raise ConfigError("run_classification_experiment needs task=classification")
    start = time.perf_counter()
    if dataset is None:
        dataset, data_info = load_dataset(cfg)
    train, test, test_index, split_info = classification_split(cfg, dataset)
    X_train, X_test = train.matrix(cfg.features), test.matrix(cfg.features)
    y_train, y_test = _labels_array(train), _labels_array(test)
    results, trained, warnings = _evaluate_models(cfg, X_train, y_train, X_test, "accuracy")
    predictions = {"index": test_index, "actual": list(y_test)}
    for r in results:
        pred = r.pop("predict")
        metrics = classification_metrics(confusion(y_test, pred, POSITIVE_LABEL))
        r["test"] = _metrics_dict(metrics)
        warnings.extend(f"{r['model']} test: {w}" for w in metrics.warnings)
        predictions[r["model"]] = [str(v) for v in pred]
    report = ExperimentReport(
        toolkit_version=__version__,
        task=cfg.task,
        config=cfg.echo(),
        data=dict(data_info or {}, n_records=len(dataset)),
        split=split_info,
        features=list(cfg.features),
        models=results,
        importance=_importance(cfg, trained),
        predictions=predictions,
        warnings=warnings,
    )
    if cfg.record_timing:
        report.wall_clock_seconds = time.perf_counter() - start
    return report


def _metrics_dict(m):
    c = m.counts
    return {
        "accuracy": m.accuracy,
        "precision": m.macro_precision,
        "recall": m.macro_recall,
        "f1": m.macro_f1,
        "per_class": {
            POSITIVE_LABEL if k == "positive" else StrategyLabel.SURFACE.value: asdict(v)
            for k, v in m.per_class.items()
        },
        "tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn,
    }


def run_experiment(cfg, dataset=None, data_info=None):
    run = run_regression_experiment if cfg.regression else run_classification_experiment
    return run(cfg, dataset, data_info)


def run_importance(cfg, dataset=None):
    """RF importance on the task's training split, sorted descending."""
    if dataset is None:
        dataset, _ = load_dataset(cfg)
    if cfg.regression:
        split = train_test_split(dataset, cfg.resolved_test_fraction,
                                 split_mix(cfg.seed, SPLIT_STREAM))
        X, y = split.train.matrix(cfg.features), split.train.column("performance")
    else:
        train, _, _, _ = classification_split(cfg, dataset)
        X, y = train.matrix(cfg.features), _labels_array(train)
    model = cfg.spec("RF").fit(X, y, split_mix(cfg.seed, FIT_STREAM))
    ranked = _importance(cfg, {"RF": model})
    return {"task": cfg.task, "toolkit_version": __version__, "n_train": int(len(y)),
            "importance": ranked}


# --------------------------------------------------------------------------
# at-risk students

def flag_predictions(predicted, threshold=4.0, indices=None):
    """Flags for every prediction strictly below ``threshold``, lowest first."""
    if not 1.0 <= threshold <= 7.0:
        raise ValueError(f"threshold must lie on the 1-7 grade scale, got {threshold}")
    predicted = np.asarray(predicted, dtype=float)
    indices = range(len(predicted)) if indices is None else indices
    flags = [AtRiskFlag(int(i), float(p), float(threshold))
             for i, p in zip(indices, predicted) if p < threshold]
    return sorted(flags, key=lambda f: (f.predicted_grade, f.index))


def flag_at_risk(model, X, threshold=4.0, indices=None):
    """Students whose predicted grade from a regression ``model`` is below ``threshold``."""
    return flag_predictions(model.predict(X), threshold, indices)


def flags_from_report(report, threshold=4.0, model=None):
    if isinstance(report, ExperimentReport):
        report = report.to_dict()
    if report.get("task") != REGRESSION:
        raise ConfigError("at-risk flags need a regression report")
    preds = report["predictions"]
    model = model or report["at_risk"]["model"]
    if model not in preds:
        raise ConfigError(f"report has no predictions for model {model!r}")
    return model, flag_predictions(preds[model], threshold, preds["index"])


# --------------------------------------------------------------------------
# output

def report_json(report):
    d = report.to_dict() if isinstance(report, ExperimentReport) else report
    return json.dumps(d, indent=2) + "\n"


def _fmt(v):
    return str(v) if isinstance(v, (int, np.integer)) else format(float(v), ".6f")


def report_tables(report):
    """``{filename: rows}`` for the plot-ready CSV tables of a report."""
    d = report.to_dict() if isinstance(report, ExperimentReport) else report
    tables = {}
    if d["task"] == REGRESSION:
        tables["regression_mae.csv"] = [["model", "mae"]] + [
            [m["model"], _fmt(m["test"]["mae"])] for m in d["models"]]
    else:
        names = [m["model"] for m in d["models"]]
        rows = [["metric"] + names]
        for metric in METRIC_ROWS:
            rows.append([metric] + [_fmt(m["test"][metric]) for m in d["models"]])
        tables["classification_metrics.csv"] = rows
    if d.get("importance"):
        tables["importance.csv"] = [["feature", "value"]] + [
            [r["feature"], _fmt(r["value"])] for r in d["importance"]]
    return tables


def emit_report(report, fmt, path):
    """Write ``report`` as one JSON file, or as CSV tables into directory ``path``."""
    if fmt == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report_json(report))
        return [path]
    if fmt != "csv":
        raise ConfigError(f"unknown report format {fmt!r}")
    os.makedirs(path, exist_ok=True)
    written = []
    for name, rows in report_tables(report).items():
        out = os.path.join(path, name)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
        written.append(out)
    return written


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

"""Student dataset: records, CSV I/O, labelling, splitting, balancing, synthesis."""

import csv
import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize, stats

from .errors import (
    DegenerateSplit,
    InsufficientData,
    MissingColumn,
    RangeViolation,
    RowParseError,
    SingleClass,
)
from .rng import generator

SCHEMA_VERSION = "1"

PSYCHOMETRIC = (
    "intrinsic",
    "extrinsic",
    "autonomy",
    "relatedness",
    "competence",
    "self_esteem",
    "deep_strategy",
    "surface_strategy",
)
NUMERIC = PSYCHOMETRIC + ("study_year", "age", "performance")
COLUMNS = PSYCHOMETRIC + ("study_year", "age", "gender", "performance")

# (mean, sd, min, max) of the published cohort of 924 students.
COHORT_STATS = {
    "intrinsic": (4.98, 0.61, 2.17, 6.58),
    "extrinsic": (5.25, 0.75, 2.42, 7.00),
    "autonomy": (5.01, 0.89, 2.00, 6.25),
    "relatedness": (4.46, 0.90, 1.50, 6.25),
    "competence": (4.77, 0.84, 2.25, 6.25),
    "self_esteem": (4.17, 0.17, 1.75, 7.00),
    "deep_strategy": (4.11, 0.72, 2.00, 6.25),
    "surface_strategy": (3.32, 0.79, 1.50, 6.25),
    "study_year": (3.24, 1.48, 1, 6),
    "age": (22.83, 3.36, 18, 44),
    "performance": (4.72, 0.54, 2.92, 6.40),
}


class StrategyLabel(str, enum.Enum):
    DEEP = "Deep"
    SURFACE = "Surface"


class Balancing(str, enum.Enum):
    NONE = "none"
    PAPER_FAITHFUL = "paper-faithful"
    LEAKAGE_SAFE = "leakage-safe"


@dataclass(frozen=True)
class StudentRecord:
    intrinsic: float
    extrinsic: float
    autonomy: float
    relatedness: float
    competence: float
    self_esteem: float
    deep_strategy: float
    surface_strategy: float
    study_year: int
    age: int
    gender: str
    performance: float


@dataclass(frozen=True)
class Dataset:
    records: tuple
    labels: Optional[tuple] = None
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if self.labels is not None:
            labels = tuple(StrategyLabel(v) for v in self.labels)
            if len(labels) != len(self.records):
                raise ValueError("labels and records differ in length")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.records)

    def subset(self, indices):
        labels = None if self.labels is None else [self.labels[i] for i in indices]
        return Dataset([self.records[i] for i in indices], labels, self.schema_version)

    def column(self, name):
        if name == "gender":
            return np.array([r.gender == "M" for r in self.records], dtype=float)
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def matrix(self, names):
        """Feature matrix with one column per name; ``gender`` becomes a male indicator."""
        if not self.records:
            return np.empty((0, len(names)))
        return np.column_stack([self.column(n) for n in names])


@dataclass(frozen=True)
class DataSplit:
    train: Dataset
    test: Dataset
    seed: int
    test_fraction: float
    balancing: Balancing = Balancing.NONE
    train_indices: tuple = ()
    test_indices: tuple = ()


class FeatureStats(NamedTuple):
    mean: float
    sd: float
    min: float
    max: float


# --------------------------------------------------------------------------
# CSV

def _parse_value(name, text, line):
    text = text.strip()
    if text == "":
        raise RowParseError(line, name, text)
    if name == "gender":
        if text not in ("F", "M"):
            raise RowParseError(line, name, text)
        return text
    try:
        value = float(text)
    except ValueError:
        raise RowParseError(line, name, text) from None
    if not math.isfinite(value):
        raise RowParseError(line, name, text)
    if name in ("study_year", "age"):
        if value != int(value):
            raise RowParseError(line, name, text)
        return int(value)
    return value


def validate_record(rec, strict=False, line=None):
    """Raise ``RangeViolation`` if ``rec`` breaks a record invariant.

    Relaxed mode bounds every score to the 1-7 response scale; strict mode
    additionally enforces the published cohort's min/max envelope.
    """
    if not 1 <= rec.study_year <= 6:
        raise RangeViolation(line, "study_year", rec.study_year)
    if rec.age < 16:
        raise RangeViolation(line, "age", rec.age)
    if not 1.0 <= rec.performance <= 7.0:
        raise RangeViolation(line, "performance", rec.performance)
    for name in PSYCHOMETRIC:
        value = getattr(rec, name)
        lo, hi = COHORT_STATS[name][2:] if strict else (1.0, 7.0)
        if not lo <= value <= hi:
            raise RangeViolation(line, name, value)


def load_csv(path, strict=False):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MissingColumn(COLUMNS[0]) from None
        for name in COLUMNS:
            if name not in header:
                raise MissingColumn(name)
        pos = {name: header.index(name) for name in COLUMNS}
        records = []
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            values = {}
            for name in COLUMNS:
                if pos[name] >= len(row):
                    raise RowParseError(line, name)
                values[name] = _parse_value(name, row[pos[name]], line)
            rec = StudentRecord(**values)
            validate_record(rec, strict, line)
            records.append(rec)
    return Dataset(records)


def write_csv(d, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for rec in d.records:
            writer.writerow([repr(getattr(rec, name)) if name != "gender" else rec.gender
                             for name in COLUMNS])


# --------------------------------------------------------------------------
# labels and bookkeeping

def strategy_label(deep, surface):
    return StrategyLabel.DEEP if deep >= surface else StrategyLabel.SURFACE


def derive_strategy_labels(d):
    labels = [strategy_label(r.deep_strategy, r.surface_strategy) for r in d.records]
    return replace(d, labels=tuple(labels))


def class_counts(d):
    """Per-label counts; both strategy labels are always present as keys."""
    if d.labels is None:
        raise ValueError("dataset has no labels")
    counts = {label: 0 for label in StrategyLabel}
    for label in d.labels:
        counts[label] += 1
    return counts


def summary_statistics(d, names=NUMERIC):
    if len(d) < 2:
        raise InsufficientData(f"need at least 2 records, got {len(d)}")
    out = {}
    for name in names:
        col = d.column(name)
        out[name] = FeatureStats(float(col.mean()), float(col.std(ddof=1)),
                                 float(col.min()), float(col.max()))
    return out


# --------------------------------------------------------------------------
# splitting and balancing

def n_test_rows(n, test_fraction):
    # round() guards against products like 10 * 0.3 = 3.0000000000000004
    return math.ceil(round(n * test_fraction, 9))


def train_test_split(d, test_fraction, seed, balancing=Balancing.NONE):
    """Seeded random partition with ``ceil(n * test_fraction)`` test rows.

    Both sides keep the original relative order of their records.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(d)
    n_test = n_test_rows(n, test_fraction)
    if n < 2 or n_test >= n:
        raise DegenerateSplit(f"cannot split {n} records with test_fraction={test_fraction}")
    perm = generator(seed).permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return DataSplit(
        train=d.subset(train_idx),
        test=d.subset(test_idx),
        seed=seed,
        test_fraction=test_fraction,
        balancing=Balancing(balancing),
        train_indices=tuple(int(i) for i in train_idx),
        test_indices=tuple(int(i) for i in test_idx),
    )


def oversample_indices(labels, seed):
    """Row indices of a randomly oversampled two-class sequence.

    The result is ``range(len(labels))`` followed by minority-class indices
    drawn uniformly with replacement until both classes have equal counts.
    """
    labels = list(labels)
    values = sorted(set(labels))
    if len(values) < 2:
        raise SingleClass(f"oversampling needs two classes, got {values}")
    if len(values) > 2:
        raise ValueError(f"expected two classes, got {values}")
    counts = {v: labels.count(v) for v in values}
    minority = min(values, key=lambda v: (counts[v], v))
    majority = max(values, key=lambda v: (counts[v], v))
    deficit = counts[majority] - counts[minority]
    base = np.arange(len(labels))
    if deficit == 0:
        return base
    pool = np.array([i for i, v in enumerate(labels) if v == minority])
    extra = pool[generator(seed).integers(0, len(pool), deficit)]
    return np.concatenate([base, extra])


def random_oversample(d, seed):
    if d.labels is None:
        raise ValueError("dataset has no labels")
    return d.subset(oversample_indices(d.labels, seed))


# --------------------------------------------------------------------------
# synthetic cohort

# Standardized-score weights of the planted grade signal; grade noise sd.
PERFORMANCE_COEFFICIENTS = {
    "study_year": 0.22,
    "intrinsic": 0.18,
    "extrinsic": 0.14,
    "competence": 0.08,
    "deep_strategy": 0.06,
    "autonomy": 0.05,
    "relatedness": 0.04,
    "self_esteem": 0.03,
    "surface_strategy": -0.05,
    "age": 0.0,
}
PERFORMANCE_NOISE_SD = 0.40

# Loadings of the latent strategy scores on standardized motivation scores.
STRATEGY_LOADINGS = {
    "deep_strategy": {"relatedness": 0.45, "intrinsic": 0.35, "extrinsic": 0.25},
    "surface_strategy": {"extrinsic": 0.45, "relatedness": 0.15, "intrinsic": -0.10},
}
FEMALE_FRACTION = 0.6


def _moments_continuous(loc, scale, lo, hi):
    a, b = (lo - loc) / scale, (hi - loc) / scale
    m, v = stats.truncnorm.stats(a, b, loc=loc, scale=scale, moments="mv")
    return float(m), float(np.sqrt(v))


def _integer_probs(loc, scale, lo, hi):
    edges = np.arange(lo, hi + 2) - 0.5
    cdf = stats.norm.cdf(edges, loc=loc, scale=scale)
    p = np.diff(cdf)
    return p / p.sum()


def _moments_integer(loc, scale, lo, hi):
    k = np.arange(lo, hi + 1)
    p = _integer_probs(loc, scale, lo, hi)
    m = float(p @ k)
    return m, float(np.sqrt(p @ (k - m) ** 2))


@lru_cache(maxsize=None)
def _fit_truncated(mean, sd, lo, hi, integer):
    """(loc, scale) of a normal whose truncation to [lo, hi] has the given moments."""
    moments = _moments_integer if integer else _moments_continuous

    def resid(theta):
        m, s = moments(theta[0], np.exp(theta[1]), lo, hi)
        return [(m - mean) / sd, (s - sd) / sd]

    sol = optimize.least_squares(resid, [mean, np.log(sd)], method="lm")
    return float(sol.x[0]), float(np.exp(sol.x[1]))


def _stratified_uniform(rng, n):
    # one draw per equal-probability stratum, in random order
    return (rng.permutation(n) + rng.random(n)) / n


def _truncated_sample(rng, name, n, overrides):
    mean, sd, lo, hi = COHORT_STATS[name]
    if name in overrides:
        mean, sd = overrides[name]
    integer = name in ("study_year", "age")
    loc, scale = _fit_truncated(mean, sd, lo, hi, integer)
    u = _stratified_uniform(rng, n)
    if integer:
        cdf = np.cumsum(_integer_probs(loc, scale, lo, hi))
        return lo + np.minimum(np.searchsorted(cdf, u, side="right"), hi - lo)
    a, b = (lo - loc) / scale, (hi - loc) / scale
    return stats.truncnorm.ppf(u, a, b, loc=loc, scale=scale)


def _normal_sample(rng, n):
    return stats.norm.ppf(_stratified_uniform(rng, n))


def _standardized(values, name):
    mean, sd = COHORT_STATS[name][:2]
    return (values - mean) / sd


def synthesize_dataset(n, seed, overrides=None):
    """Synthetic cohort shaped like the published one.

    Motivation, need and self-esteem scores, study year and age are
    independent truncated Gaussians matching the published mean, sd and
    range, drawn by stratified inverse-CDF sampling so that sample moments
    stay close to the targets even for a single cohort.  Strategy scores
    load on the motivation scores (see ``STRATEGY_LOADINGS``) and grades
    are a clipped linear function of the standardized features plus noise
    (``PERFORMANCE_COEFFICIENTS``).  The real covariance structure is not
    reproduced.

    ``overrides`` maps a feature name to a replacement ``(mean, sd)``, e.g.
    for the implausibly small published self-esteem sd.
    """
    if n < 10:
        raise ValueError(f"n must be at least 10, got {n}")
    overrides = dict(overrides or {})
    rng = generator(seed)
    cols = {}
    for name in ("intrinsic", "extrinsic", "autonomy", "relatedness", "competence",
                 "self_esteem", "study_year", "age"):
        cols[name] = _truncated_sample(rng, name, n, overrides)
    z = {name: _standardized(cols[name], name) for name in cols}

    for name, loadings in STRATEGY_LOADINGS.items():
        mean, sd, lo, hi = COHORT_STATS[name]
        latent = sum(w * z[f] for f, w in loadings.items())
        resid_sd = math.sqrt(1.0 - sum(w * w for w in loadings.values()))
        latent = latent + resid_sd * _normal_sample(rng, n)
        cols[name] = np.clip(mean + sd * latent, lo, hi)
        z[name] = _standardized(cols[name], name)

    mean, _, lo, hi = COHORT_STATS["performance"]
    signal = sum(w * z[f] for f, w in PERFORMANCE_COEFFICIENTS.items())
    grade = mean + signal + PERFORMANCE_NOISE_SD * _normal_sample(rng, n)
    cols["performance"] = np.clip(grade, lo, hi)
    gender = np.where(rng.random(n) < FEMALE_FRACTION, "F", "M")

    records = []
    for i in range(n):
        values = {name: round(float(cols[name][i]), 2) for name in PSYCHOMETRIC + ("performance",)}
        records.append(StudentRecord(
            study_year=int(cols["study_year"][i]),
            age=int(cols["age"][i]),
            gender=str(gender[i]),
            **values,
        ))
    return Dataset(records)


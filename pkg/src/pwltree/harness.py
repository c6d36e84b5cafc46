"""Experiment runner: streams in, learners stepped sequentially, metrics out.

The harness owns the sequential protocol: for every step it records the
learner's prediction before the target is revealed, then lets the learner
update.  Metrics are per-step squared errors plus their running sum and
time-normalized average; trials differ only in the stream seed and are
averaged pointwise.
"""

from __future__ import annotations

import csv
import json
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .adaptive_tree import AdaptiveTreeRegressor
from .baselines import GaussianKernelRegressor, LinearFilter, VolterraFilter
from .datagen import Stream, generate
from .fixed_tree import FixedTreeRegressor
from .mixture import DirectMixtureRegressor

CONFIG_SCHEMA = 1
SEED_ENV_VAR = "PWLTREE_SEED"
DIVERGENCE_LIMIT = 1e100


class ConfigError(ValueError):
    """Raised for malformed experiment configurations."""


class TrialDiverged(RuntimeError):
    """Raised when a learner's error stops being finite mid-trial."""


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


@dataclass
class RunMetrics:
    """Per-step squared errors of one run (or a pointwise trial average)."""

    e2: np.ndarray
    counters: dict = field(default_factory=dict)
    trials: int = 1

    def __len__(self) -> int:
        return len(self.e2)

    @property
    def cum_e2(self) -> np.ndarray:
        return np.cumsum(self.e2)

    @property
    def norm_err(self) -> np.ndarray:
        """Time-normalized accumulated squared error (1/t) sum of e^2."""
        return self.cum_e2 / np.arange(1, len(self.e2) + 1)

    @property
    def final_norm_err(self) -> float:
        return float(self.norm_err[-1])


def run_stream(learner, x_ext: np.ndarray, targets: np.ndarray) -> RunMetrics:
    """Strict predict-then-update loop over one stream.

    The prediction for step t is stored before ``update`` ever sees the
    target, so no learner can peek ahead.
    """
    n = len(targets)
    preds = np.empty(n)
    for t in range(n):
        pred = learner.predict(x_ext[t])
        preds[t] = pred.y_hat
        if not np.isfinite(preds[t]) or abs(preds[t]) > DIVERGENCE_LIMIT:
            raise TrialDiverged(f"prediction diverged at step {t + 1}")
        learner.update(x_ext[t], targets[t], pred)
    counters = {}
    for name in ("regressor_evaluations", "kappa_accumulations"):
        if hasattr(learner, name):
            counters[name] = int(getattr(learner, name))
    return RunMetrics((targets - preds) ** 2, counters=counters)


def average_metrics(runs: list[RunMetrics]) -> RunMetrics:
    """Pointwise mean over trials; counters are averaged too."""
    e2 = np.mean([r.e2 for r in runs], axis=0)
    counters = {}
    for key in runs[0].counters:
        counters[key] = float(np.mean([r.counters[key] for r in runs]))
    return RunMetrics(e2, counters=counters, trials=len(runs))


# ----------------------------------------------------------------------
# learner construction
# ----------------------------------------------------------------------

def make_learner(spec: dict, dim: int):
    """Build a learner from its config entry (everything but ``name`` and
    ``kind`` is passed through as keyword parameters)."""
    params = dict(spec)
    params.pop("name", None)
    kind = params.pop("kind", None)
    try:
        if kind == "dft":
            return FixedTreeRegressor(dim=dim, **params)
        if kind == "dat":
            return AdaptiveTreeRegressor(dim=dim, **params)
        if kind == "direct":
            return DirectMixtureRegressor(dim=dim, **params)
        if kind == "lf":
            return LinearFilter(dim=dim, **params)
        if kind == "vf":
            return VolterraFilter(dim=dim, **params)
        if kind == "gkr":
            return GaussianKernelRegressor(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot build learner kind {kind!r}: {exc}") from exc
    raise ConfigError(f"unknown learner kind {kind!r}")


# ----------------------------------------------------------------------
# experiment configuration
# ----------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    stream: dict
    learners: list[dict]
    trials: int = 1
    seed: int | None = None
    stride: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")
        if not self.learners:
            raise ConfigError("at least one learner is required")
        names = [entry.get("name") or entry.get("kind") for entry in self.learners]
        if len(set(names)) != len(names):
            raise ConfigError("learner names must be unique")
        if "kind" not in self.stream:
            raise ConfigError("stream requires a kind")
        if self.seed is None:
            self.seed = default_seed()

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        schema = raw.pop("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            "schema": CONFIG_SCHEMA,
            "stream": self.stream,
            "learners": self.learners,
            "trials": self.trials,
            "seed": self.seed,
            "stride": self.stride,
            "output": self.output,
        }


def build_stream(spec: dict, seed: int) -> Stream:
    params = dict(spec)
    kind = params.pop("kind")
    if kind == "csv":
        dataset = load_csv_dataset(params["path"], params["target"],
                                   normalize=params.get("normalize", True))
        return dataset.stream
    normalize = params.pop("normalize", False)
    n = params.pop("n")
    stream = generate(kind, n, seed=seed, **params)
    return normalize_stream(stream) if normalize else stream


def normalize_stream(stream: Stream) -> Stream:
    """Map every input column and the target affinely onto [-1, 1] using
    their min/max over the whole stream (the offline preprocessing used
    for the chaotic benchmarks)."""
    cols = [_normalize_column(stream.inputs[:, j], f"x{j + 1}")[0]
            for j in range(stream.dim)]
    targets, _ = _normalize_column(stream.targets, "d")
    return Stream(stream.kind, np.column_stack(cols), targets,
                  seed=stream.seed, params={**stream.params, "normalized": True})


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    metrics: dict[str, RunMetrics]
    failures: list[str] = field(default_factory=list)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every configured learner over ``trials`` freshly seeded streams
    (seed = base seed + trial index) and average the metrics pointwise."""
    per_learner: dict[str, list[RunMetrics]] = {}
    failures: list[str] = []
    for trial in range(config.trials):
        stream = build_stream(config.stream, config.seed + trial)
        x_ext = stream.extended
        for entry in config.learners:
            name = entry.get("name") or entry["kind"]
            learner = make_learner(entry, stream.dim)
            try:
                metrics = run_stream(learner, x_ext, stream.targets)
            except TrialDiverged as exc:
                failures.append(f"trial {trial} learner {name}: {exc}")
                continue
            per_learner.setdefault(name, []).append(metrics)
    if not per_learner:
        raise TrialDiverged("every trial diverged: " + "; ".join(failures))
    averaged = {name: average_metrics(runs) for name, runs in per_learner.items()}
    return ExperimentResult(config, averaged, failures)


# ----------------------------------------------------------------------
# metric output
# ----------------------------------------------------------------------

def write_metrics_csv(result: ExperimentResult, path) -> None:
    """Long-format CSV at the configured stride: t, learner, e2, cum_e2,
    norm_err.  The final step is always included."""
    stride = result.config.stride
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "learner", "e2", "cum_e2", "norm_err"])
        for name, metrics in result.metrics.items():
            cum = metrics.cum_e2
            norm = metrics.norm_err
            n = len(metrics)
            rows = sorted(set(range(stride - 1, n, stride)) | {n - 1})
            for t in rows:
                writer.writerow([t + 1, name, repr(float(metrics.e2[t])),
                                 repr(float(cum[t])), repr(float(norm[t]))])


def write_summary_json(result: ExperimentResult, path) -> None:
    summary = {
        "schema": CONFIG_SCHEMA,
        "config": result.config.to_dict(),
        "failures": result.failures,
        "results": {
            name: {
                "n": len(metrics),
                "trials": metrics.trials,
                "final_cum_e2": float(metrics.cum_e2[-1]),
                "final_norm_err": metrics.final_norm_err,
                "counters": metrics.counters,
            }
            for name, metrics in result.metrics.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ----------------------------------------------------------------------
# external datasets
# ----------------------------------------------------------------------

@dataclass
class NormalizedDataset:
    """A CSV dataset mapped onto [-1, 1] per column, plus the affine maps
    needed to undo it."""

    stream: Stream
    input_ranges: list[tuple[float, float]]
    target_range: tuple[float, float]

    def error_scale(self) -> float:
        """Multiplier taking normalized-space errors back to original
        units (the offset cancels in differences)."""
        lo, hi = self.target_range
        return (hi - lo) / 2.0 if hi > lo else 1.0

    def denormalize_target(self, values) -> np.ndarray:
        lo, hi = self.target_range
        return (np.asarray(values, dtype=float) + 1.0) * (hi - lo) / 2.0 + lo


def _normalize_column(col: np.ndarray, name: str) -> tuple[np.ndarray, tuple[float, float]]:
    lo, hi = float(col.min()), float(col.max())
    if hi == lo:
        warnings.warn(f"column {name!r} is constant; normalized to 0")
        return np.zeros_like(col), (lo, hi)
    return 2.0 * (col - lo) / (hi - lo) - 1.0, (lo, hi)


def load_csv_dataset(path, target_column, normalize: bool = True) -> NormalizedDataset:
    """Read a rectangular numeric CSV (header row required) and map every
    column affinely onto [-1, 1] using its own min/max over the whole
    file.  ``target_column`` picks the response by name or 0-based index;
    the remaining columns become the regressor."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if not rows:
        raise ValueError("dataset has no data rows")
    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise ValueError(f"non-numeric cell in {path}: {exc}") from exc
    if isinstance(target_column, int):
        target_idx = target_column
    else:
        try:
            target_idx = header.index(target_column)
        except ValueError:
            raise ValueError(f"target column {target_column!r} not in header {header}")
    input_idx = [i for i in range(data.shape[1]) if i != target_idx]
    inputs = data[:, input_idx]
    targets = data[:, target_idx]
    input_ranges = []
    if normalize:
        cols = []
        for j, i in enumerate(input_idx):
            col, rng = _normalize_column(inputs[:, j], header[i])
            cols.append(col)
            input_ranges.append(rng)
        inputs = np.column_stack(cols)
        targets, target_range = _normalize_column(targets, header[target_idx])
    else:
        input_ranges = [(float(c.min()), float(c.max())) for c in inputs.T]
        target_range = (float(targets.min()), float(targets.max()))
    stream = Stream("csv", inputs, targets, params={"path": str(path)})
    return NormalizedDataset(stream, input_ranges, target_range)


# ----------------------------------------------------------------------
# verification (collapsed learner vs direct mixture)
# ----------------------------------------------------------------------

def verify_equivalence(mode: str, depth: int, steps: int, seed: int,
                       mu: float = 0.01, s_plus: float = 0.01) -> float:
    """Run a collapsed learner and the explicit mixture in lockstep on a
    Gaussian stream and return the worst relative prediction gap
    ``|a - b| / (1 + |b|)`` over the run."""
    stream = generate("matched", steps, seed=seed)
    x_ext = stream.extended
    if mode == "dft":
        fast = FixedTreeRegressor(depth, stream.dim, mu=mu)
        slow = DirectMixtureRegressor(depth, stream.dim, mode="hard", mu=mu)
    elif mode == "dat":
        fast = AdaptiveTreeRegressor(depth, stream.dim, mu=mu, s_plus=s_plus)
        slow = DirectMixtureRegressor(depth, stream.dim, mode="soft", mu=mu, s_plus=s_plus)
    else:
        raise ConfigError(f"unknown verify mode {mode!r}")
    worst = 0.0
    for t in range(steps):
        y_fast, _ = fast.step(x_ext[t], stream.targets[t])
        y_slow, _ = slow.step(x_ext[t], stream.targets[t])
        gap = abs(y_fast - y_slow) / (1.0 + abs(y_slow))
        if gap > worst:
            worst = gap
    return worst


def inverse_time_schedule(lam: float):
    """Step-size schedule 2 / (lam * t) used by the regret analysis."""
    return lambda t: 2.0 / (lam * t)

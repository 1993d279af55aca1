"""Experiment harnesses: M-sensitivity, activation comparison,
classification, and activation-path figures.

Every harness takes an ExperimentConfig, runs a deterministic grid of
training cells, and returns an ExperimentReport whose rows follow a
fixed tabular schema (per-seed rows, then a 'mean' row per group when
several seeds ran).  Reports serialize to CSV with 6-decimal
fixed-point floats and to JSON at full precision with a format_version
tag; rerunning a harness with the same config reproduces both files
byte for byte.

Fairness across activations inside one comparison: the dataset, the
chronological split, and the initial weight draws depend only on the
data spec and the seed, never on the activation, so rows differ only
through the activation itself (and the noise it consumes).
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .activations import ActivationKind, forward
from .data import (PriceSeries, SequenceDataset, TabularDataset,
                   chronological_split, load_csv_prices, load_csv_tabular,
                   make_windows, minmax_normalize, synth_gbm,
                   synth_sine_trend, synth_tabular)
from .lstm import init_params
from .metrics import confusion_metrics, r2, roc_auc
from .numerics import RngStream
from .svgplot import line_plot
from .training import TrainConfig, evaluate, train

FORMAT_VERSION = 1
DEFAULT_ALPHA = 0.25
REGRESSION_HEADER = ("Dataset", "Seed", "Activation Function", "M", "Alpha",
                     "MSE", "R2(Train)", "R2(Test)",
                     "Epoch of convergence")
CLASSIFICATION_HEADER = ("Dataset", "Seed", "Activation Function", "Alpha",
                         "Accuracy", "Precision", "Recall", "F1-score",
                         "ROC-AUC")
BASELINE_ACTIVATIONS = ("relu", "leaky_relu", "prelu", "tanh", "gelu")

_TEST_EVAL_STREAM = 31
_TRAIN_EVAL_STREAM = 37
_PATHS_STREAM = 41


class ConfigError(ValueError):
    """A configuration problem the caller should fix (CLI exit 2)."""


@dataclass
class ExperimentConfig:
    """Shared settings for the experiment harnesses.

    Exactly one of data_path / synth names the dataset.  synth uses the
    grammar 'gbm:seed,n[,s0,mu,sigma]', 'sine:seed,n[,s0,mu,sigma,
    amplitude,period,noise_std]', or 'tab:seed,n,d[,positive_rate]'.
    alphas is either the string 'learned' or a tuple of fixed values
    applied to the brownian activation with its gradient frozen.
    """

    data_path: str | None = None
    synth: str | None = None
    value_column: str = "Close"
    label_column: str = "label"
    dataset_name: str | None = None
    activations: tuple[str, ...] = ("brownian", "relu", "leaky_relu",
                                    "prelu", "tanh", "gelu")
    m_values: tuple[int, ...] = (500, 1000, 1500)
    alphas: tuple[float, ...] | str = "learned"
    lookback: int = 60
    split: float = 0.8
    val_fraction: float = 0.1
    norm_scope: str = "full"
    sampling: str = "collapsed"
    hidden_dim: int = 50
    seeds: tuple[int, ...] = (1,)
    out_dir: str = "."
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.data_path is not None and self.synth is not None:
            raise ConfigError("pass either a data path or a synth spec, "
                              "not both")
        if not (0.0 < self.split < 1.0):
            raise ConfigError(f"split must be in (0, 1), got {self.split}")
        if not (0.0 < self.val_fraction < 1.0):
            raise ConfigError(
                f"val_fraction must be in (0, 1), got {self.val_fraction}"
            )
        if self.lookback < 1:
            raise ConfigError(f"lookback must be >= 1, got {self.lookback}")
        if self.hidden_dim < 1:
            raise ConfigError(
                f"hidden_dim must be >= 1, got {self.hidden_dim}"
            )
        if self.norm_scope not in ("full", "train"):
            raise ConfigError(f"unknown norm_scope '{self.norm_scope}'")
        if self.sampling not in ("collapsed", "explicit"):
            raise ConfigError(f"unknown sampling mode '{self.sampling}'")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if isinstance(self.alphas, str):
            if self.alphas != "learned":
                raise ConfigError(
                    f"alphas must be 'learned' or a tuple, got "
                    f"'{self.alphas}'"
                )
        elif not self.alphas:
            raise ConfigError("alpha list is empty")


@dataclass
class ExperimentReport:
    """Tabular result of one harness run.

    rows hold typed values aligned with header: str, int, float, or
    None (rendered as an empty CSV cell).
    """

    kind: str
    header: tuple[str, ...]
    rows: list[list]
    format_version: int = FORMAT_VERSION

    def to_csv(self, path: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.header)
            for row in self.rows:
                writer.writerow([_format_cell(v) for v in row])

    def to_json(self, path: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        doc = {
            "format_version": self.format_version,
            "kind": self.kind,
            "header": list(self.header),
            "rows": self.rows,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    def write(self, out_dir: str, name: str) -> tuple[str, str]:
        """Write name.csv and name.json under out_dir; returns the paths."""
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, f"{name}.csv")
        json_path = os.path.join(out_dir, f"{name}.json")
        self.to_csv(csv_path)
        self.to_json(json_path)
        return csv_path, json_path

    def column(self, name: str) -> list:
        """Values of one column by header name (mean rows included)."""
        idx = self.header.index(name)
        return [row[idx] for row in self.rows]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6f}"


def _mean_row(group: list[list]) -> list:
    out: list = []
    for col in range(len(group[0])):
        values = [row[col] for row in group]
        if col == 1:
            out.append("mean")
        elif all(v is None for v in values):
            out.append(None)
        elif all(v == values[0] for v in values):
            out.append(values[0])
        elif all(isinstance(v, (int, float, np.integer, np.floating))
                 and v is not None for v in values):
            out.append(float(np.mean([float(v) for v in values])))
        else:
            out.append(values[0])
    return out


def parse_synth_spec(spec: str):
    """Parse a --synth spec into a PriceSeries or TabularDataset."""
    scheme, sep, rest = spec.partition(":")
    if not sep:
        raise ConfigError(
            f"synth spec '{spec}' needs the form scheme:arg,arg,..."
        )
    try:
        args = [float(a) for a in rest.split(",")] if rest else []
    except ValueError:
        raise ConfigError(f"synth spec '{spec}' has non-numeric args") from None
    if scheme == "gbm":
        if not 2 <= len(args) <= 5:
            raise ConfigError("gbm spec takes seed,n[,s0,mu,sigma]")
        defaults = [100.0, 0.05, 0.2]
        s0, mu, sigma = (args[2:] + defaults[len(args) - 2:])
        return synth_gbm(int(args[0]), int(args[1]), s0=s0, mu=mu,
                         sigma=sigma)
    if scheme == "sine":
        if not 2 <= len(args) <= 8:
            raise ConfigError(
                "sine spec takes seed,n[,s0,mu,sigma,amplitude,period,"
                "noise_std]"
            )
        defaults = [100.0, 0.08, 0.1, 3.0, 40.0, 0.4]
        s0, mu, sigma, amp, period, noise = (
            args[2:] + defaults[len(args) - 2:])
        return synth_sine_trend(int(args[0]), int(args[1]), s0=s0, mu=mu,
                                sigma=sigma, amplitude=amp, period=period,
                                noise_std=noise)
    if scheme == "tab":
        if not 3 <= len(args) <= 4:
            raise ConfigError("tab spec takes seed,n,d[,positive_rate]")
        rate = args[3] if len(args) == 4 else 0.25
        return synth_tabular(int(args[0]), int(args[1]), int(args[2]),
                             positive_rate=rate)
    raise ConfigError(f"unknown synth scheme '{scheme}'")


def _dataset_stem(path: str) -> str:
    base = os.path.basename(path)
    return os.path.splitext(base)[0] or base


def _load_series(config: ExperimentConfig) -> PriceSeries:
    if config.data_path is not None:
        series = load_csv_prices(config.data_path, config.value_column)
        series.name = config.dataset_name or _dataset_stem(config.data_path)
        return series
    if config.synth is None:
        raise ConfigError("a data path or a synth spec is required")
    series = parse_synth_spec(config.synth)
    if not isinstance(series, PriceSeries):
        raise ConfigError(
            f"synth spec '{config.synth}' does not produce a price series"
        )
    if config.dataset_name:
        series.name = config.dataset_name
    return series


def _load_tabular(config: ExperimentConfig) -> tuple[TabularDataset, str]:
    if config.data_path is not None:
        tab = load_csv_tabular(config.data_path, config.label_column)
        return tab, config.dataset_name or _dataset_stem(config.data_path)
    if config.synth is None:
        raise ConfigError("a data path or a synth spec is required")
    tab = parse_synth_spec(config.synth)
    if not isinstance(tab, TabularDataset):
        raise ConfigError(
            f"synth spec '{config.synth}' does not produce a tabular "
            f"dataset"
        )
    return tab, config.dataset_name or config.synth.replace(":", "-")


def _regression_datasets(config: ExperimentConfig):
    """Load, normalize, window, and split; independent of seed/activation."""
    series = _load_series(config)
    values = series.values
    if config.norm_scope == "train":
        boundary = int(math.floor(config.split * values.size))
        if boundary < 2:
            raise ConfigError("series too short for train-scope statistics")
        norm, vmin, vmax = minmax_normalize(values[:boundary])
        full = (values - vmin) / (vmax - vmin)
        dataset = make_windows(full, config.lookback, vmin, vmax,
                               check_unit_range=False)
    else:
        norm, vmin, vmax = minmax_normalize(values)
        dataset = make_windows(norm, config.lookback, vmin, vmax)
    train_full, test_ds = chronological_split(dataset, config.split)
    train_ds, val_ds = chronological_split(train_full, 1.0 - config.val_fraction)
    return series.name, train_ds, val_ds, test_ds


def _classification_datasets(config: ExperimentConfig):
    tab, name = _load_tabular(config)
    if tab.labels.min() == tab.labels.max():
        raise ConfigError("classification dataset has a single class")
    inputs = tab.features.reshape(len(tab), tab.features.shape[1], 1)
    dataset = SequenceDataset(inputs=inputs, targets=tab.labels)
    train_full, test_ds = chronological_split(dataset, config.split)
    train_ds, val_ds = chronological_split(train_full, 1.0 - config.val_fraction)
    return name, train_ds, val_ds, test_ds


def _kind_for(config: ExperimentConfig, name: str,
              m: int | None = None) -> ActivationKind:
    name = name.strip().lower()
    try:
        if name == "brownian":
            return ActivationKind.brownian(
                m=m if m is not None else config.m_values[0],
                sampling=config.sampling)
        return ActivationKind.from_name(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _fixed_alpha(config: ExperimentConfig) -> float | None:
    if isinstance(config.alphas, str):
        return None
    return float(config.alphas[0])


def _fit_cell(config: ExperimentConfig, kind: ActivationKind, seed: int,
              datasets, loss: str, fixed_alpha: float | None):
    """Train one cell; returns (params, history, test predictions)."""
    _, train_ds, val_ds, test_ds = datasets
    freeze = fixed_alpha is not None and kind.name == "brownian"
    train_cfg = replace(config.train, seed=seed, loss=loss,
                        freeze_alpha=freeze)
    init_alpha = DEFAULT_ALPHA
    if freeze:
        init_alpha = float(fixed_alpha)
    params = init_params(train_ds.inputs.shape[2], config.hidden_dim, 1,
                         seed=seed, alpha=init_alpha)
    params, history = train(params, kind, train_ds.inputs, train_ds.targets,
                            val_ds.inputs, val_ds.targets, train_cfg)
    test_loss, test_preds = evaluate(params, kind, test_ds.inputs,
                                     test_ds.targets, train_cfg,
                                     RngStream(seed, _TEST_EVAL_STREAM))
    return params, history, train_cfg, test_loss, test_preds


def _regression_row(config: ExperimentConfig, name: str, seed: int,
                    kind: ActivationKind, datasets,
                    fixed_alpha: float | None,
                    m_label: int | None) -> list:
    params, history, train_cfg, test_mse, test_preds = _fit_cell(
        config, kind, seed, datasets, "mse", fixed_alpha)
    _, train_ds, _, test_ds = datasets
    _, train_preds = evaluate(params, kind, train_ds.inputs,
                              train_ds.targets, train_cfg,
                              RngStream(seed, _TRAIN_EVAL_STREAM))
    alpha = params.alpha if kind.has_alpha else None
    return [name, seed, kind.display_name, m_label, alpha, test_mse,
            r2(train_preds, train_ds.targets),
            r2(test_preds, test_ds.targets),
            history.epoch_of_convergence]


def _classification_row(config: ExperimentConfig, name: str, seed: int,
                        kind: ActivationKind, datasets,
                        fixed_alpha: float | None) -> list:
    params, history, _, _, test_preds = _fit_cell(
        config, kind, seed, datasets, "bce", fixed_alpha)
    _, _, _, test_ds = datasets
    scores = confusion_metrics(test_preds, test_ds.targets)
    auc = roc_auc(test_preds, test_ds.targets)
    alpha = params.alpha if kind.has_alpha else None
    return [name, seed, kind.display_name, alpha, scores["accuracy"],
            scores["precision"], scores["recall"], scores["f1"], auc]


def _grouped_rows(config: ExperimentConfig, groups) -> list[list]:
    """Run (label, cell_fn) groups over all seeds; add mean rows."""
    rows: list[list] = []
    for label, cell_fn in groups:
        group_rows = []
        for seed in config.seeds:
            try:
                group_rows.append(cell_fn(seed))
            except ConfigError:
                raise
            except Exception as exc:
                raise RuntimeError(
                    f"cell ({label}, seed={seed}) failed: {exc}"
                ) from exc
        rows.extend(group_rows)
        if len(config.seeds) > 1:
            rows.append(_mean_row(group_rows))
    return rows


def run_sensitivity(config: ExperimentConfig) -> ExperimentReport:
    """Train the stochastic activation once per (M, seed) cell.

    Rows are grouped by M with a mean row per group when several
    seeds run.
    """
    if not config.m_values:
        raise ConfigError("sensitivity requires a non-empty M list")
    datasets = _regression_datasets(config)
    name = datasets[0]
    fixed = _fixed_alpha(config)
    groups = []
    for m in config.m_values:
        kind = _kind_for(config, "brownian", m=m)

        def cell(seed, kind=kind, m=m):
            return _regression_row(config, name, seed, kind, datasets,
                                   fixed, m)

        groups.append((f"M={m}", cell))
    return ExperimentReport("regression", REGRESSION_HEADER,
                            _grouped_rows(config, groups))


def run_comparison(config: ExperimentConfig) -> ExperimentReport:
    """Train every configured activation on the identical task.

    The brownian activation uses the first entry of m_values; the M
    column is empty for deterministic activations.
    """
    if not config.activations:
        raise ConfigError("comparison requires at least one activation")
    datasets = _regression_datasets(config)
    name = datasets[0]
    fixed = _fixed_alpha(config)
    groups = []
    for act_name in config.activations:
        kind = _kind_for(config, act_name)
        m_label = kind.m if kind.name == "brownian" else None
        alpha = fixed if kind.name == "brownian" else None

        def cell(seed, kind=kind, m_label=m_label, alpha=alpha):
            return _regression_row(config, name, seed, kind, datasets,
                                   alpha, m_label)

        groups.append((kind.display_name, cell))
    return ExperimentReport("regression", REGRESSION_HEADER,
                            _grouped_rows(config, groups))


def run_classification(config: ExperimentConfig) -> ExperimentReport:
    """Binary classification over brownian alpha variants and baselines.

    Each feature row enters the model as a length-d sequence of scalar
    steps.  A 'brownian' entry in config.activations expands into one
    variant per fixed alpha (gradient frozen) or a single learned-alpha
    variant; other entries train as themselves.
    """
    if not config.activations:
        raise ConfigError("classification requires at least one activation")
    datasets = _classification_datasets(config)
    name = datasets[0]
    groups = []
    for act_name in config.activations:
        kind = _kind_for(config, act_name)
        if kind.name == "brownian" and not isinstance(config.alphas, str):
            for alpha in config.alphas:
                def cell(seed, kind=kind, alpha=float(alpha)):
                    return _classification_row(config, name, seed, kind,
                                               datasets, alpha)

                groups.append((f"{kind.display_name} alpha={alpha}", cell))
        else:
            def cell(seed, kind=kind):
                return _classification_row(config, name, seed, kind,
                                           datasets, None)

            groups.append((kind.display_name, cell))
    return ExperimentReport("classification", CLASSIFICATION_HEADER,
                            _grouped_rows(config, groups))


def emit_paths_figure(alphas, m_values, x_min: float, x_max: float,
                      seed: int, out_dir: str, points: int = 401,
                      sampling: str = "collapsed") -> tuple[str, str]:
    """Sample activation input-output curves over an x grid.

    Writes paths.csv (long format: alpha, M, x, f at full precision)
    and paths.svg (one polyline per alpha/M combination) under out_dir;
    returns the two paths.  The x range must include negative inputs,
    where the stochastic branch lives.
    """
    alphas = [float(a) for a in alphas]
    m_values = [int(m) for m in m_values]
    if not alphas or not m_values:
        raise ConfigError("paths figure needs at least one alpha and one M")
    if not (x_min < x_max):
        raise ConfigError(f"empty x range [{x_min}, {x_max}]")
    if x_min >= 0.0:
        raise ConfigError("x range must include negative inputs")
    if points < 2:
        raise ConfigError(f"need at least 2 grid points, got {points}")
    grid = np.linspace(x_min, x_max, points)
    base = RngStream(seed, _PATHS_STREAM)
    curves = []
    records = []
    index = 0
    for alpha in alphas:
        for m in m_values:
            kind = ActivationKind.brownian(m=m, sampling=sampling)
            y, _ = forward(kind, grid, alpha, rng=base.substream(index))
            index += 1
            curves.append((f"alpha={alpha:g}, M={m}", grid, y))
            records.extend(
                (alpha, m, float(x), float(v)) for x, v in zip(grid, y))
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "paths.csv")
    svg_path = os.path.join(out_dir, "paths.svg")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("alpha,M,x,f\n")
        for alpha, m, x, v in records:
            fh.write(f"{alpha!r},{m},{x!r},{v!r}\n")
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(line_plot(curves, title="Stochastic activation sample paths",
                           xlabel="x", ylabel="f(x)"))
    return csv_path, svg_path

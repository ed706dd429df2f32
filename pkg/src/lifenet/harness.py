"""Experiment protocol: training runs, test-set evaluation, batched
simulations, learning-rate sweeps and result tables.

Seed derivation (all via ``numpy.random.default_rng`` on a seed list):

* network init, block ``k``: ``[init_seed, k]``
* random-mode training boards: ``[data_seed, DATA_STREAM]``
* test set: ``[test_seed, TEST_STREAM]``; proxy set: ``[test_seed, PROXY_STREAM]``
* run ``i`` of an experiment uses ``init_seed = data_seed = seed_base + i``
"""

from __future__ import annotations

import csv
import functools
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from . import data as data_mod
from .gol import step_n
from .network import (
    Activation,
    ArchMode,
    ModelArch,
    NumericalOverflowError,
    binarize,
    forward_vec,
    init_arch,
    loss_and_grad_vec,
)
from .optim import LEARNING_RATE_GRID, DivergenceError, OptimizerConfig, canonical_name, init_state, opt_step

log = logging.getLogger(__name__)

DATA_STREAM = 0xDA7A
TEST_STREAM = 0x7E57
PROXY_STREAM = 0x9A0C

DEFAULT_TEST_SEED = 2023
NO_LR = "----"
NO_VALUE = "—"

_BLOCK_LAYOUT = ((3, 3), (), (3, 3), (), (2,), ())

# grid-searched learning rates for the 1-step task, keyed by algorithm, then
# (dataset, activation)
TUNED_LEARNING_RATES_1STEP = {
    "Adadelta": {("random", "relu"): 1e-1, ("random", "tanh"): 1e-1, ("fixed", "relu"): 1e-1, ("fixed", "tanh"): 1e-1},
    "Adafactor": {("random", "relu"): 3e-2, ("random", "tanh"): 1e-2, ("fixed", "relu"): 3e-2, ("fixed", "tanh"): 3e-2},
    "Adagrad": {("random", "relu"): 1e-1, ("random", "tanh"): 3e-2, ("fixed", "relu"): 1e-1, ("fixed", "tanh"): 1e-1},
    "Adam": {("random", "relu"): 1e-3, ("random", "tanh"): 3e-2, ("fixed", "relu"): 3e-3, ("fixed", "tanh"): 3e-2},
    "Adamax": {("random", "relu"): 3e-4, ("random", "tanh"): 3e-2, ("fixed", "relu"): 1e-2, ("fixed", "tanh"): 1e-3},
    "AdamW": {("random", "relu"): 3e-4, ("random", "tanh"): 1e-2, ("fixed", "relu"): 1e-2, ("fixed", "tanh"): 1e-1},
    "Ftrl": {("random", "relu"): 1e-1, ("random", "tanh"): 1e-1, ("fixed", "relu"): 1e-1, ("fixed", "tanh"): 1e-1},
    "Nadam": {("random", "relu"): 1e-2, ("random", "tanh"): 1e-3, ("fixed", "relu"): 1e-3, ("fixed", "tanh"): 1e-2},
    "RMSprop": {("random", "relu"): 3e-3, ("random", "tanh"): 3e-2, ("fixed", "relu"): 1e-2, ("fixed", "tanh"): 1e-2},
    "SGD": {("random", "relu"): 3e-2, ("random", "tanh"): 1e-1, ("fixed", "relu"): 1e-1, ("fixed", "tanh"): 1e-1},
}


def tuned_learning_rate(algorithm: str, dataset: str, activation: str) -> float:
    """Grid-searched rate for the 1-step task."""
    try:
        return TUNED_LEARNING_RATES_1STEP[canonical_name(algorithm)][(dataset, Activation(activation).value)]
    except KeyError:
        raise ValueError(f"no tuned learning rate for dataset={dataset!r}") from None


# ---------------------------------------------------------------------------
# configs and results


@dataclass(frozen=True)
class TrainConfig:
    optimizer: OptimizerConfig
    n_steps: int = 1
    arch_mode: str = "recursive"
    activation: str = "tanh"
    dataset: str = "fixed"
    max_epochs: int = 10_000
    eval_every: int = 1
    proxy_eval: bool = True
    init_seed: int = 0
    data_seed: int = 0
    test_seed: int = DEFAULT_TEST_SEED
    train_size: int = data_mod.TRAIN_SIZE
    density: float = data_mod.DEFAULT_DENSITY
    test_boards: int = 100
    test_size: int = 100
    proxy_boards: int = 10
    proxy_size: int = 64
    fixed_board_file: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "arch_mode", ArchMode(self.arch_mode).value)
        object.__setattr__(self, "activation", Activation(self.activation).value)
        if self.arch_mode == ArchMode.SINGLE.value:
            if self.n_steps != 1:
                raise ValueError("single mode requires n_steps == 1")
            object.__setattr__(self, "arch_mode", ArchMode.RECURSIVE.value)
        if self.dataset not in ("random", "fixed"):
            raise ValueError(f"dataset must be 'random' or 'fixed', got {self.dataset!r}")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")
        if not isinstance(self.optimizer, OptimizerConfig):
            raise TypeError("optimizer must be an OptimizerConfig")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["optimizer"] = self.optimizer.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TrainConfig:
        d = dict(d)
        d["optimizer"] = OptimizerConfig.from_dict(d["optimizer"])
        return cls(**d)


@dataclass
class RunResult:
    success: bool
    epochs_to_success: int | None
    final_accuracy: float
    epochs_run: int
    loss_trace: list[float]
    accuracy_trace: list[tuple[int, float]]
    divergence: bool
    config: TrainConfig
    model: dict | None = None

    def to_dict(self, traces: bool = True) -> dict:
        d = {
            "success": self.success,
            "epochs_to_success": self.epochs_to_success,
            "final_accuracy": self.final_accuracy,
            "epochs_run": self.epochs_run,
            "divergence": self.divergence,
            "config": self.config.to_dict(),
            "model": self.model,
        }
        if traces:
            d["loss_trace"] = list(self.loss_trace)
            d["accuracy_trace"] = [list(p) for p in self.accuracy_trace]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> RunResult:
        return cls(
            success=d["success"],
            epochs_to_success=d["epochs_to_success"],
            final_accuracy=d["final_accuracy"],
            epochs_run=d["epochs_run"],
            loss_trace=list(d.get("loss_trace", [])),
            accuracy_trace=[tuple(p) for p in d.get("accuracy_trace", [])],
            divergence=d["divergence"],
            config=TrainConfig.from_dict(d["config"]),
            model=d.get("model"),
        )


@dataclass
class ExperimentSummary:
    algorithm: str
    dataset: str
    activation: str
    arch: str
    n_steps: int
    learning_rate: float
    n_runs: int
    n_success: int
    success_rate: float
    mean_epochs: float | None
    runs: list[dict] = field(default_factory=list)

    @property
    def key(self) -> tuple:
        return (self.algorithm, self.dataset, self.activation, self.arch, self.n_steps)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentSummary:
        return cls(**d)


def summarize(results, template: TrainConfig | None = None, keep_runs: bool = False) -> ExperimentSummary:
    """Success rate over all runs, mean epochs over successful runs only."""
    results = list(results)
    if not results:
        raise ValueError("no results to summarize")
    cfg = template or results[0].config
    wins = [r.epochs_to_success for r in results if r.success]
    return ExperimentSummary(
        algorithm=cfg.optimizer.algorithm,
        dataset=cfg.dataset,
        activation=cfg.activation,
        arch=cfg.arch_mode,
        n_steps=cfg.n_steps,
        learning_rate=cfg.optimizer.learning_rate,
        n_runs=len(results),
        n_success=len(wins),
        success_rate=len(wins) / len(results),
        mean_epochs=(sum(wins) / len(wins)) if wins else None,
        runs=[r.to_dict(traces=False) for r in results] if keep_runs else [],
    )


# ---------------------------------------------------------------------------
# test sets and evaluation


def _rng(seed, stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), stream])


def _sample_pairs(rng, n_steps, count, size, density):
    pairs = []
    for _ in range(count):
        x = data_mod.sample_board(rng, size, size, density)
        pairs.append((x, step_n(x, n_steps)))
    return pairs


def make_testset(
    n_steps: int,
    test_seed: int = DEFAULT_TEST_SEED,
    count: int = 100,
    size: int = 100,
    density: float = data_mod.DEFAULT_DENSITY,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """``count`` random ``size`` x ``size`` boards paired with their state ``n_steps`` later."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    return _sample_pairs(_rng(test_seed, TEST_STREAM), n_steps, count, size, density)


def make_proxyset(
    n_steps: int, test_seed: int = DEFAULT_TEST_SEED, count: int = 10, size: int = 64, density=data_mod.DEFAULT_DENSITY
):
    return _sample_pairs(_rng(test_seed, PROXY_STREAM), n_steps, count, size, density)


# all 512 3x3 patches as tiny boards; bit k of the code is cell k in row-major order
_PATCH_BOARDS = ((np.arange(512)[:, None] >> np.arange(9)) & 1).astype(np.uint8).reshape(512, 3, 3)
_PATCH_WEIGHTS = (1 << np.arange(9)).reshape(3, 3)


def patch_codes(x: np.ndarray) -> np.ndarray:
    """9-bit code of the zero-padded 3x3 neighborhood of every cell of ``(B, M, N)``."""
    B, M, N = x.shape
    p = np.zeros((B, M + 2, N + 2), dtype=np.int32)
    p[:, 1:-1, 1:-1] = x
    codes = np.zeros((B, M, N), dtype=np.int32)
    for di in range(3):
        for dj in range(3):
            codes += p[:, di : di + M, dj : dj + N] * _PATCH_WEIGHTS[di, dj]
    return codes


class Evaluator:
    """Counts correctly predicted cells over a fixed list of (input, target) pairs.

    A one-step model's output at a cell is a function of that cell's 3x3
    input patch, so for such models the count is computed from the 512
    possible patches weighted by how often each occurs with each target.
    """

    def __init__(self, pairs, chunk: int = 10):
        pairs = list(pairs)
        if not pairs:
            raise ValueError("empty test set")
        self.shapes = {np.shape(x) for x, _ in pairs}
        self.xs = [np.asarray(x, dtype=np.uint8) for x, _ in pairs]
        self.ys = [np.asarray(y, dtype=np.uint8) for _, y in pairs]
        self.total = sum(y.size for y in self.ys)
        self.chunk = chunk
        self._ones = np.zeros(512, dtype=np.int64)
        self._zeros = np.zeros(512, dtype=np.int64)
        for x, y in zip(self.xs, self.ys):
            codes = patch_codes(x[None])[0]
            self._ones += np.bincount(codes[y == 1], minlength=512)
            self._zeros += np.bincount(codes[y == 0], minlength=512)

    def correct(self, vec, mode, n_steps: int, act) -> int:
        if n_steps == 1:
            out = forward_vec(vec, mode, 1, act, _PATCH_BOARDS)[:, 1, 1]
            pred = binarize(out).astype(bool)
            return int(self._ones[pred].sum() + self._zeros[~pred].sum())
        hits = 0
        groups: dict[tuple, list[int]] = {}
        for i, x in enumerate(self.xs):
            groups.setdefault(x.shape, []).append(i)
        for idx in groups.values():
            for s in range(0, len(idx), self.chunk):
                part = idx[s : s + self.chunk]
                xb = np.stack([self.xs[i] for i in part])
                yb = np.stack([self.ys[i] for i in part])
                pred = binarize(forward_vec(vec, mode, n_steps, act, xb))
                hits += int(np.count_nonzero(pred == yb))
        return hits

    def accuracy(self, vec, mode, n_steps: int, act) -> float:
        return self.correct(vec, mode, n_steps, act) / self.total


def evaluate(arch: ModelArch, act, testset) -> float:
    """Fraction of test cells whose thresholded prediction matches the target."""
    ev = testset if isinstance(testset, Evaluator) else Evaluator(testset)
    return ev.accuracy(arch.to_vector(), arch.mode, arch.n_steps, act)


@functools.lru_cache(maxsize=8)
def _cached_evaluator(kind: str, n_steps: int, seed: int, count: int, size: int, density: float) -> Evaluator:
    maker = make_testset if kind == "test" else make_proxyset
    return Evaluator(maker(n_steps, seed, count, size, density))


@functools.lru_cache(maxsize=4)
def _cached_fixed_board(path: str | None) -> np.ndarray:
    return data_mod.fixed_board() if path is None else data_mod.load_board(path)


# ---------------------------------------------------------------------------
# training


def _layout(n_blocks: int) -> tuple:
    return _BLOCK_LAYOUT * n_blocks


def train_once(cfg: TrainConfig, init: ModelArch | None = None) -> RunResult:
    """One simulation: one gradient step per epoch, stop at the first epoch with 100% test accuracy."""
    mode = ArchMode(cfg.arch_mode)
    act = Activation(cfg.activation)
    n = cfg.n_steps
    arch = init if init is not None else init_arch(mode, n, cfg.init_seed)
    if arch.n_steps != n:
        raise ValueError(f"initial model has n_steps={arch.n_steps}, config wants {n}")
    mode = arch.mode
    vec = arch.to_vector()
    opt = cfg.optimizer
    state = init_state(opt, vec, _layout(len(arch.blocks)))

    test = _cached_evaluator("test", n, cfg.test_seed, cfg.test_boards, cfg.test_size, cfg.density)
    proxy = None
    if cfg.proxy_eval:
        proxy = _cached_evaluator("proxy", n, cfg.test_seed, cfg.proxy_boards, cfg.proxy_size, cfg.density)

    if cfg.dataset == "fixed":
        fixed_x = _cached_fixed_board(cfg.fixed_board_file)
        fixed_y = step_n(fixed_x, n)
        rng = None
    else:
        rng = _rng(cfg.data_seed, DATA_STREAM)

    losses: list[float] = []
    accs: list[tuple[int, float]] = []
    success = False
    diverged = False
    hit_epoch = None
    for epoch in range(1, cfg.max_epochs + 1):
        if rng is None:
            x, y = fixed_x, fixed_y
        else:
            x = data_mod.sample_board(rng, cfg.train_size, cfg.train_size, cfg.density)
            y = step_n(x, n)
        try:
            loss, grad = loss_and_grad_vec(vec, mode, n, act, x, y)
            vec, state = opt_step(opt, state, vec, grad)
        except (NumericalOverflowError, DivergenceError) as exc:
            log.debug("run diverged at epoch %d: %s", epoch, exc)
            diverged = True
            break
        losses.append(loss)
        if epoch % cfg.eval_every:
            continue
        try:
            if proxy is not None:
                acc = proxy.accuracy(vec, mode, n, act)
                if acc == 1.0:
                    acc = test.accuracy(vec, mode, n, act)
            else:
                acc = test.accuracy(vec, mode, n, act)
        except NumericalOverflowError:
            diverged = True
            break
        accs.append((epoch, acc))
        if acc == 1.0:
            success = True
            hit_epoch = epoch
            break

    if diverged:
        final_acc = 0.0
        model = None
    else:
        final_acc = 1.0 if success else test.accuracy(vec, mode, n, act)
        model = arch.with_vector(vec).to_dict()
    return RunResult(
        success=success,
        epochs_to_success=hit_epoch,
        final_accuracy=final_acc,
        epochs_run=len(losses),
        loss_trace=losses,
        accuracy_trace=accs,
        divergence=diverged,
        config=cfg,
        model=model,
    )


def run_configs(configs, workers: int | None = 1) -> list[RunResult]:
    """Run ``train_once`` over ``configs``, in order, optionally in worker processes."""
    configs = list(configs)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(configs) <= 1:
        return [train_once(c) for c in configs]
    with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as pool:
        return list(pool.map(train_once, configs))


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-linux
        return os.cpu_count() or 1


def run_configs_for(template: TrainConfig, n_runs: int, seed_base: int) -> list[TrainConfig]:
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    return [replace(template, init_seed=seed_base + i, data_seed=seed_base + i) for i in range(n_runs)]


def run_experiment(
    template: TrainConfig,
    n_runs: int = 100,
    run_seed_base: int = 0,
    workers: int | None = 1,
    keep_runs: bool = True,
) -> ExperimentSummary:
    results = run_configs(run_configs_for(template, n_runs, run_seed_base), workers)
    return summarize(results, template, keep_runs=keep_runs)


# ---------------------------------------------------------------------------
# learning-rate sweep


def select_learning_rate(table: dict[float, float]) -> float | None:
    """Highest success rate wins, ties go to the smaller rate; ``None`` when nothing succeeded."""
    if not table:
        raise ValueError("empty grid")
    best = max(table.values())
    if best <= 0.0:
        return None
    return min(lr for lr, rate in table.items() if rate == best)


@dataclass
class GridResult:
    best_lr: float | None
    table: dict[float, float]
    summaries: list[ExperimentSummary]

    @property
    def best_label(self) -> str:
        return NO_LR if self.best_lr is None else format_lr(self.best_lr)

    def to_dict(self) -> dict:
        return {
            "best_lr": self.best_label,
            "table": {format_lr(lr): rate for lr, rate in self.table.items()},
            "summaries": [s.to_dict() for s in self.summaries],
        }


def format_lr(lr: float) -> str:
    mant, exp = f"{lr:.0e}".split("e")
    return f"{mant}e{int(exp)}"


def grid_search(
    template: TrainConfig,
    grid=LEARNING_RATE_GRID,
    n_runs: int = 100,
    run_seed_base: int = 0,
    workers: int | None = 1,
    keep_runs: bool = False,
) -> GridResult:
    """Run an experiment per learning rate on identical seeds and pick the best rate."""
    grid = [float(lr) for lr in grid]
    if not grid:
        raise ValueError("empty grid")
    configs = []
    for lr in grid:
        t = replace(template, optimizer=replace(template.optimizer, learning_rate=lr))
        configs.extend(run_configs_for(t, n_runs, run_seed_base))
    results = run_configs(configs, workers)
    summaries = []
    for k, lr in enumerate(grid):
        t = configs[k * n_runs]
        summaries.append(summarize(results[k * n_runs : (k + 1) * n_runs], t, keep_runs=keep_runs))
    table = {lr: s.success_rate for lr, s in zip(grid, summaries)}
    return GridResult(select_learning_rate(table), table, summaries)


# ---------------------------------------------------------------------------
# reporting


def relative_change(random_val, fixed_val, kind: str) -> float | None:
    """Signed percent change of the fixed dataset against the random baseline.

    ``success``: (fixed - random) / random. ``epochs``: (random - fixed) / random,
    positive when the fixed board needs fewer epochs. ``None`` without a baseline.
    """
    if kind not in ("success", "epochs"):
        raise ValueError(f"kind must be 'success' or 'epochs', got {kind!r}")
    if random_val is None or fixed_val is None or random_val <= 0:
        return None
    if kind == "success":
        return 100.0 * (fixed_val - random_val) / random_val
    return 100.0 * (random_val - fixed_val) / random_val


def format_change(change: float | None) -> str:
    if change is None or not math.isfinite(change):
        return NO_VALUE
    pct = int(Decimal(repr(change)).quantize(Decimal(1), rounding=ROUND_HALF_UP))
    return f"{pct:+d}%"


def _fmt_rate(rate):
    return NO_VALUE if rate is None or rate == 0 else f"{rate:.2f}"


def _fmt_epochs(e):
    return NO_VALUE if e is None else f"{e:.0f}"


TABLE_HEADER = [
    "algorithm",
    "success_random",
    "success_fixed",
    "success_change",
    "epochs_random",
    "epochs_fixed",
    "epochs_change",
]


def comparison_rows(summaries) -> list[dict]:
    """Pair random/fixed summaries per (algorithm, activation, arch, n_steps) into table rows."""
    groups: dict[tuple, dict[str, ExperimentSummary]] = {}
    for s in summaries:
        groups.setdefault((s.algorithm, s.activation, s.arch, s.n_steps), {})[s.dataset] = s
    rows = []
    for (alg, act, arch, n), pair in sorted(groups.items()):
        r, f = pair.get("random"), pair.get("fixed")
        r_rate = r.success_rate if r else None
        f_rate = f.success_rate if f else None
        r_ep = r.mean_epochs if r else None
        f_ep = f.mean_epochs if f else None
        rows.append(
            {
                "algorithm": alg,
                "activation": act,
                "arch": arch,
                "n_steps": n,
                "success_random": _fmt_rate(r_rate),
                "success_fixed": _fmt_rate(f_rate),
                "success_change": format_change(relative_change(r_rate, f_rate, "success")),
                "epochs_random": _fmt_epochs(r_ep),
                "epochs_fixed": _fmt_epochs(f_ep),
                "epochs_change": format_change(relative_change(r_ep, f_ep, "epochs")),
            }
        )
    return rows


SUMMARY_HEADER = [
    "algorithm",
    "dataset",
    "activation",
    "arch",
    "n_steps",
    "learning_rate",
    "n_runs",
    "n_success",
    "success_rate",
    "mean_epochs",
]


def summaries_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in summaries:
        w.writerow(
            [
                s.algorithm,
                s.dataset,
                s.activation,
                s.arch,
                s.n_steps,
                format_lr(s.learning_rate),
                s.n_runs,
                s.n_success,
                f"{s.success_rate:.4f}",
                _fmt_epochs(s.mean_epochs),
            ]
        )
    return buf.getvalue()


def comparison_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["activation", "arch", "n_steps"] + TABLE_HEADER)
    for row in comparison_rows(summaries):
        w.writerow([row["activation"], row["arch"], row["n_steps"]] + [row[k] for k in TABLE_HEADER])
    return buf.getvalue()


def success_series(summaries) -> dict:
    """``{"<activation>/<arch>/<n>": {algorithm: {dataset: rate}}}`` for bar charts."""
    out: dict = {}
    for s in summaries:
        key = f"{s.activation}/{s.arch}/{s.n_steps}"
        out.setdefault(key, {}).setdefault(s.algorithm, {})[s.dataset] = s.success_rate
    return out


def report_json(summaries) -> str:
    summaries = list(summaries)
    doc = {
        "summaries": [s.to_dict() for s in summaries],
        "comparison": comparison_rows(summaries),
        "success_series": success_series(summaries),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_summaries(path) -> list[ExperimentSummary]:
    """Read summaries from an experiment, sweep or report JSON file."""
    doc = json.loads(Path(path).read_text())
    if "summary" in doc:
        return [ExperimentSummary.from_dict(doc["summary"])]
    if "summaries" in doc:
        return [ExperimentSummary.from_dict(s) for s in doc["summaries"]]
    raise ValueError(f"{path}: no summaries found")


def report(summaries, out_dir) -> dict[str, Path]:
    """Write ``summary.csv``, ``comparison.csv`` and ``report.json`` into ``out_dir``."""
    summaries = list(summaries)
    if not summaries:
        raise ValueError("report needs at least one summary")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "summary_csv": out / "summary.csv",
        "comparison_csv": out / "comparison.csv",
        "json": out / "report.json",
    }
    paths["summary_csv"].write_text(summaries_csv(summaries), encoding="utf-8")
    paths["comparison_csv"].write_text(comparison_csv(summaries), encoding="utf-8")
    paths["json"].write_text(report_json(summaries), encoding="utf-8")
    return paths

"""Command-line front end.

Every subcommand first prints one JSON line holding the fully resolved
configuration (defaults filled in), then does its work. Exit codes: 0 on
completion (including runs that merely diverged), 2 for invalid
configuration, 3 for runtime and I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from . import harness
from .gol import step
from .optim import ALGORITHMS, LEARNING_RATE_GRID, OptimizerConfig, canonical_name

log = logging.getLogger("lifenet")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(Exception):
    """Raised while resolving flags into a configuration."""


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _emit_config(command: str, **fields) -> None:
    print(json.dumps({"command": command, **fields}, sort_keys=True, ensure_ascii=False), flush=True)


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# parsing helpers


def _parse_hyper(items) -> dict:
    hyper = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--hyper expects KEY=VALUE, got {item!r}")
        try:
            hyper[key] = float(value)
        except ValueError:
            raise ConfigError(f"--hyper {key}: not a number: {value!r}") from None
    return hyper


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"malformed learning-rate grid {text!r}") from None
    if not grid:
        raise ConfigError("learning-rate grid is empty")
    if any(not np.isfinite(g) or g < 0 for g in grid):
        raise ConfigError(f"learning rates must be finite and >= 0: {text!r}")
    return grid


def _resolve_lr(args) -> float:
    if args.lr == "tuned":
        if args.steps != 1:
            raise ConfigError("--lr tuned is only defined for --steps 1")
        return harness.tuned_learning_rate(args.algo, args.dataset, args.act)
    try:
        return float(args.lr)
    except ValueError:
        raise ConfigError(f"--lr must be a number or 'tuned', got {args.lr!r}") from None


def _train_config(args, lr: float | None = None) -> harness.TrainConfig:
    try:
        lr = _resolve_lr(args) if lr is None else lr
        opt = OptimizerConfig(canonical_name(args.algo), lr, _parse_hyper(args.hyper))
        return harness.TrainConfig(
            optimizer=opt,
            n_steps=args.steps,
            arch_mode=args.arch,
            activation=args.act,
            dataset=args.dataset,
            max_epochs=args.max_epochs,
            eval_every=args.eval_every,
            proxy_eval=not args.no_proxy,
            init_seed=getattr(args, "init_seed", None) or 0,
            data_seed=getattr(args, "data_seed", None) or 0,
            test_seed=args.test_seed,
            train_size=args.train_size,
            density=args.density,
            test_boards=args.test_boards,
            test_size=args.test_size,
            proxy_boards=args.proxy_boards,
            proxy_size=args.proxy_size,
            fixed_board_file=str(Path(args.fixed_board).resolve()) if args.fixed_board else None,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _add_training_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model and training")
    g.add_argument("--algo", default="Adam", help=f"optimizer, one of {', '.join(ALGORITHMS)} (case-insensitive)")
    g.add_argument(
        "--lr",
        default="1e-3",
        help="learning rate, or 'tuned' for the grid-searched 1-step rate (default: %(default)s)",
    )
    g.add_argument("--hyper", action="append", metavar="KEY=VALUE", help="override an optimizer hyperparameter")
    g.add_argument("--dataset", default="fixed", help="'random' or 'fixed' (default: %(default)s)")
    g.add_argument("--act", default="tanh", help="'relu' or 'tanh' (default: %(default)s)")
    g.add_argument("--steps", type=int, default=1, help="Game of Life steps the model predicts")
    g.add_argument("--arch", default="recursive", help="'single', 'recursive' or 'sequential'")
    g.add_argument("--max-epochs", type=int, default=10_000)
    g.add_argument("--eval-every", type=int, default=1)
    g.add_argument("--no-proxy", action="store_true", help="evaluate the full test set at every evaluation")
    g.add_argument("--fixed-board", metavar="FILE", help="board file replacing the built-in fixed board")
    g.add_argument("--train-size", type=int, default=data_mod.TRAIN_SIZE, help="side of random training boards")
    g.add_argument("--density", type=float, default=data_mod.DEFAULT_DENSITY)
    t = p.add_argument_group("evaluation")
    t.add_argument("--test-seed", type=int, default=harness.DEFAULT_TEST_SEED)
    t.add_argument("--test-boards", type=int, default=100)
    t.add_argument("--test-size", type=int, default=100)
    t.add_argument("--proxy-boards", type=int, default=10)
    t.add_argument("--proxy-size", type=int, default=64)


def _add_workers(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: available processors)")


def _workers(args) -> int:
    w = harness.default_workers() if args.workers is None else args.workers
    if w < 1:
        raise ConfigError("--workers must be >= 1")
    return w


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    if args.steps < 0:
        raise ConfigError("--steps must be >= 0")
    if args.random is not None:
        h, w, p, seed = args.random
        try:
            spec = data_mod.BoardSpec(int(h), int(w), float(p), int(seed))
        except ValueError as exc:
            raise ConfigError(f"--random: {exc}") from None
        source = {"random": {"height": spec.height, "width": spec.width, "density": spec.density, "seed": spec.seed}}
    else:
        spec = None
        source = {"board": str(args.board)}
    _emit_config("simulate", source=source, steps=args.steps, out=args.out, dump_dir=args.dump_dir)
    board = data_mod.random_board(spec) if spec is not None else data_mod.load_board(args.board)
    dump = Path(args.dump_dir) if args.dump_dir else None
    if dump is not None:
        dump.mkdir(parents=True, exist_ok=True)
        data_mod.save_board(board, dump / "step_0000.txt")
    for k in range(1, args.steps + 1):
        board = step(board)
        if dump is not None:
            data_mod.save_board(board, dump / f"step_{k:04d}.txt")
    _write(args.out, data_mod.format_board(board))
    return EXIT_OK


def cmd_gen_board(args) -> int:
    if args.mode not in ("fixed", "random"):
        raise ConfigError(f"--mode must be 'fixed' or 'random', got {args.mode!r}")
    if args.mode == "random":
        try:
            spec = data_mod.BoardSpec(args.size, args.size, args.density, args.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        _emit_config("gen-board", mode="random", size=args.size, density=args.density, seed=args.seed, out=args.out)
        board = data_mod.random_board(spec)
    else:
        _emit_config("gen-board", mode="fixed", quadrant=args.quadrant, out=args.out)
        quadrant = data_mod.load_board(args.quadrant) if args.quadrant else None
        board = data_mod.fixed_board(quadrant)
    _write(args.out, data_mod.format_board(board))
    return EXIT_OK


def cmd_coverage(args) -> int:
    _emit_config("coverage", board=args.board or "fixed")
    board = data_mod.load_board(args.board) if args.board else data_mod.fixed_board()
    rep = data_mod.coverage(board)
    doc = {"shape": list(board.shape), "density": float(board.mean()), **rep.to_dict(), "missing": rep.missing()}
    _write(args.out, _dump(doc))
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _train_config(args)
    _emit_config("train", config=cfg.to_dict(), out=args.out)
    res = harness.train_once(cfg)
    _write(args.out, _dump({"config": cfg.to_dict(), "result": res.to_dict(traces=not args.no_traces)}))
    status = "diverged" if res.divergence else ("success" if res.success else "no success")
    log.info("%s after %d epochs, final accuracy %.6f", status, res.epochs_run, res.final_accuracy)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _train_config(args)
    workers = _workers(args)
    if args.runs < 1:
        raise ConfigError("--runs must be >= 1")
    _emit_config("experiment", config=cfg.to_dict(), runs=args.runs, seed_base=args.seed, workers=workers, out=args.out)
    summary = harness.run_experiment(cfg, args.runs, args.seed, workers, keep_runs=True)
    doc = {"config": cfg.to_dict(), "n_runs": args.runs, "seed_base": args.seed, "summary": summary.to_dict()}
    _write(args.out, _dump(doc))
    ep = "—" if summary.mean_epochs is None else f"{summary.mean_epochs:.1f}"
    log.info("success rate %.2f (%d/%d), mean epochs %s", summary.success_rate, summary.n_success, summary.n_runs, ep)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    cfg = _train_config(args, lr=grid[0])
    for lr in grid:
        _train_config(args, lr=lr)  # validate every rate up front
    workers = _workers(args)
    if args.runs < 1:
        raise ConfigError("--runs must be >= 1")
    _emit_config(
        "sweep", config=cfg.to_dict(), grid=grid, runs=args.runs, seed_base=args.seed, workers=workers, out=args.out
    )
    res = harness.grid_search(cfg, grid, args.runs, args.seed, workers, keep_runs=args.keep_runs)
    doc = {"config": cfg.to_dict(), "n_runs": args.runs, "seed_base": args.seed, **res.to_dict()}
    _write(args.out, _dump(doc))
    for lr, rate in res.table.items():
        log.info("lr %-6s success rate %.2f", harness.format_lr(lr), rate)
    log.info("best lr: %s", res.best_label)
    return EXIT_OK


def cmd_report(args) -> int:
    _emit_config("report", inputs=[str(p) for p in args.inputs], out_dir=args.out_dir)
    summaries = []
    for path in args.inputs:
        summaries.extend(harness.load_summaries(path))
    paths = harness.report(summaries, args.out_dir)
    sys.stdout.write(harness.comparison_csv(summaries))
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lifenet", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="only warnings and errors on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the automaton on a board")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--board", metavar="FILE")
    src.add_argument("--random", nargs=4, metavar=("H", "W", "P", "SEED"))
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--out", metavar="FILE", help="output board file (default: stdout)")
    p.add_argument("--dump-dir", metavar="DIR", help="also write every intermediate state")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-board", help="write a fixed or random training board")
    p.add_argument("--mode", default="fixed")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--quadrant", metavar="FILE", help="custom top-left quadrant for --mode fixed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=data_mod.TRAIN_SIZE)
    p.add_argument("--density", type=float, default=data_mod.DEFAULT_DENSITY)
    p.set_defaults(func=cmd_gen_board)

    p = sub.add_parser("coverage", help="count 3x3 patch classes on a board")
    p.add_argument("--board", metavar="FILE", help="board file (default: the built-in fixed board)")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("train", help="one training run")
    _add_training_flags(p)
    p.add_argument("--init-seed", type=int, default=0)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--no-traces", action="store_true", help="omit loss and accuracy traces")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("experiment", help="repeated runs; run i uses seed SEED + i")
    _add_training_flags(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="seed base")
    _add_workers(p)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sweep", help="learning-rate grid search")
    _add_training_flags(p)
    p.add_argument("--grid", default=",".join(harness.format_lr(lr) for lr in LEARNING_RATE_GRID))
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="seed base")
    p.add_argument("--keep-runs", action="store_true", help="store per-run records")
    _add_workers(p)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="tables from experiment or sweep JSON files")
    p.add_argument("inputs", nargs="+", metavar="JSON")
    p.add_argument("--out-dir", default="report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"lifenet {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"lifenet {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

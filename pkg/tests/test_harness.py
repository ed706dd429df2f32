import csv
import io
import json

import numpy as np
import pytest
from oracles import brute_step_n

from lifenet.data import fixed_board
from lifenet.harness import (
    NO_LR,
    NO_VALUE,
    TUNED_LEARNING_RATES_1STEP,
    Evaluator,
    ExperimentSummary,
    GridResult,
    RunResult,
    TrainConfig,
    comparison_rows,
    evaluate,
    format_change,
    format_lr,
    grid_search,
    load_summaries,
    make_proxyset,
    make_testset,
    relative_change,
    report,
    run_configs,
    run_configs_for,
    run_experiment,
    select_learning_rate,
    summarize,
    train_once,
    tuned_learning_rate,
)
from lifenet.network import ModelArch, NetworkParams, forward, init_arch, make_relu_solution, make_tanh_solution
from lifenet.optim import ALGORITHMS, LEARNING_RATE_GRID, default_config

SMALL = dict(test_boards=4, test_size=24, proxy_boards=2, proxy_size=16)


def small_cfg(alg="Adam", lr=3e-2, **kw):
    return TrainConfig(optimizer=default_config(alg, lr), **{**SMALL, **kw})


def relu_arch(n=1, mode="recursive"):
    p = make_relu_solution()
    return ModelArch.sequential([p] * n) if mode == "sequential" else ModelArch.recursive(p, n)


# ---------------------------------------------------------------------------
# test sets and evaluation


def test_default_testset_shape_and_determinism():
    ts = make_testset(1, 2023)
    assert len(ts) == 100
    assert all(x.shape == (100, 100) and y.shape == (100, 100) for x, y in ts)
    again = make_testset(1, 2023)
    assert all(np.array_equal(a[0], b[0]) for a, b in zip(ts, again))
    other = make_testset(1, 2024, count=1)
    assert not np.array_equal(other[0][0], ts[0][0])
    dens = np.mean([x.mean() for x, _ in ts])
    assert abs(dens - 0.38) < 0.005


@pytest.mark.parametrize("n", [1, 2])
def test_testset_targets_match_oracle(n):
    for x, y in make_testset(n, 7, count=3, size=20):
        np.testing.assert_array_equal(y, brute_step_n(x, n))


def test_proxyset_is_a_separate_stream():
    p = make_proxyset(1, 2023)
    assert len(p) == 10 and p[0][0].shape == (64, 64)
    t = make_testset(1, 2023, count=1, size=64)
    assert not np.array_equal(p[0][0], t[0][0])


def test_evaluate_analytic_solutions():
    ts = make_testset(1, 11, count=5, size=40)
    assert evaluate(relu_arch(), "relu", ts) == 1.0
    assert evaluate(ModelArch.single(make_tanh_solution()), "tanh", ts) == 1.0


def test_evaluate_all_dead_predictor():
    ts = make_testset(1, 11, count=5, size=40)
    dead = ModelArch.single(NetworkParams(np.zeros((3, 3)), 0, np.zeros((3, 3)), 0, np.zeros(2), 0))
    want = 1 - np.mean([y.mean() for _, y in ts])
    assert evaluate(dead, "relu", ts) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("n,mode", [(1, "recursive"), (2, "recursive"), (2, "sequential"), (3, "sequential")])
def test_fast_evaluator_agrees_with_direct_count(n, mode, rng):
    ts = make_testset(n, 5, count=3, size=20)
    arch = init_arch(mode, n, 3)
    arch = arch.with_vector(rng.normal(0, 0.8, arch.n_params))
    hits = sum(np.count_nonzero((forward(arch, "tanh", x) >= 0.5) == y) for x, y in ts)
    assert Evaluator(ts).correct(arch.to_vector(), arch.mode, n, "tanh") == hits


def test_evaluator_handles_mixed_shapes():
    ts = make_testset(2, 1, count=2, size=10) + make_testset(2, 2, count=2, size=13)
    assert evaluate(relu_arch(2), "relu", ts) == 1.0


# ---------------------------------------------------------------------------
# single runs


@pytest.mark.parametrize("alg", [a for a in ALGORITHMS if a != "Ftrl"])
def test_solved_model_with_zero_rate_succeeds_immediately(alg):
    cfg = small_cfg(alg, 0.0, activation="relu")
    res = train_once(cfg, init=relu_arch())
    assert res.success and res.epochs_to_success == 1
    assert res.final_accuracy == 1.0 and not res.divergence


def test_ftrl_rejects_zero_rate():
    # FTRL sets the weights from its accumulators and divides by the rate
    with pytest.raises(ValueError):
        default_config("Ftrl", 0.0)


def test_success_epoch_respects_eval_cadence():
    res = train_once(small_cfg("SGD", 0.0, activation="relu", eval_every=7), init=relu_arch())
    assert res.epochs_to_success == 7
    assert len(res.loss_trace) == 7 and res.accuracy_trace == [(7, 1.0)]


def test_one_epoch_from_random_init_fails():
    for seed in range(3):
        res = train_once(small_cfg(max_epochs=1, init_seed=seed, dataset="random", data_seed=seed))
        assert not res.success and res.epochs_to_success is None
        assert res.epochs_run == 1 and len(res.loss_trace) == 1
        assert res.final_accuracy < 1.0


def test_divergence_is_recorded():
    huge = ModelArch.single(NetworkParams.from_vector(np.full(23, 1e200)))
    res = train_once(small_cfg("SGD", 0.1, activation="relu"), init=huge)
    assert res.divergence and not res.success
    assert res.model is None and res.final_accuracy == 0.0


def test_loss_trace_length_equals_epochs():
    res = train_once(small_cfg("SGD", 1e-4, max_epochs=25, eval_every=5))
    assert res.epochs_run == 25 == len(res.loss_trace)
    assert [e for e, _ in res.accuracy_trace] == [5, 10, 15, 20, 25]


def test_train_once_deterministic():
    cfg = small_cfg("Adam", 3e-2, max_epochs=40, dataset="random", init_seed=4, data_seed=9)
    a, b = train_once(cfg), train_once(cfg)
    assert a.to_dict() == b.to_dict()
    c = train_once(TrainConfig.from_dict({**cfg.to_dict(), "data_seed": 10}))
    assert c.loss_trace != a.loss_trace


def test_fixed_mode_uses_constant_board(monkeypatch):
    import lifenet.harness as H

    seen = []
    real = H.loss_and_grad_vec

    def spy(vec, mode, n, act, x, y):
        seen.append(np.array(x))
        return real(vec, mode, n, act, x, y)

    monkeypatch.setattr(H, "loss_and_grad_vec", spy)
    train_once(small_cfg(max_epochs=5))
    assert all(np.array_equal(s, fixed_board()) for s in seen)
    seen.clear()
    train_once(small_cfg(max_epochs=5, dataset="random"))
    assert len(seen) == 5 and seen[0].shape == (64, 64)
    assert all(not np.array_equal(seen[i], seen[i + 1]) for i in range(4))


def test_fixed_board_file_substitution(tmp_path, monkeypatch):
    import lifenet.harness as H
    from lifenet.data import save_board

    board = np.zeros((10, 10), dtype=np.uint8)
    board[4, 3:6] = 1
    path = tmp_path / "b.txt"
    save_board(board, path)
    seen = []
    real = H.loss_and_grad_vec
    monkeypatch.setattr(H, "loss_and_grad_vec", lambda *a: seen.append(a[4]) or real(*a))
    train_once(small_cfg(max_epochs=2, fixed_board_file=str(path)))
    assert np.array_equal(seen[0], board)


def test_early_stop_params_reevaluate_to_one():
    cfg = TrainConfig(optimizer=default_config("Adam", 3e-2), init_seed=1)
    res = train_once(cfg)
    assert res.success, "seed 1 is known to converge"
    arch = ModelArch.from_dict(res.model)
    assert evaluate(arch, cfg.activation, make_testset(1, cfg.test_seed)) == 1.0
    assert res.accuracy_trace[-1] == (res.epochs_to_success, 1.0)
    assert res.epochs_to_success <= cfg.max_epochs


def test_train_config_validation():
    with pytest.raises(ValueError):
        small_cfg(max_epochs=0)
    with pytest.raises(ValueError):
        small_cfg(eval_every=0)
    with pytest.raises(ValueError):
        small_cfg(dataset="mnist")
    with pytest.raises(ValueError):
        small_cfg(arch_mode="single", n_steps=2)
    assert small_cfg(arch_mode="single").arch_mode == "recursive"


def test_config_and_result_roundtrip():
    cfg = small_cfg("Ftrl", 0.1, n_steps=2, arch_mode="sequential")
    assert TrainConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    res = train_once(small_cfg(max_epochs=3))
    back = RunResult.from_dict(json.loads(json.dumps(res.to_dict())))
    assert back.to_dict() == res.to_dict()


# ---------------------------------------------------------------------------
# experiments


def _fake(success, epochs):
    return RunResult(success, epochs if success else None, 1.0 if success else 0.5, epochs, [], [], False, small_cfg())


def test_summary_arithmetic():
    s = summarize([_fake(True, 100), _fake(True, 300), _fake(False, 10000)])
    assert s.success_rate == pytest.approx(2 / 3)
    assert s.mean_epochs == 200
    assert s.n_runs == 3 and s.n_success == 2
    none = summarize([_fake(False, 10)])
    assert none.success_rate == 0 and none.mean_epochs is None


def test_run_seeds_follow_base():
    cfgs = run_configs_for(small_cfg(), 3, 10)
    assert [(c.init_seed, c.data_seed) for c in cfgs] == [(10, 10), (11, 11), (12, 12)]


def test_always_solved_experiment():
    import lifenet.harness as H

    # every run starts from the analytic solution; patch the initializer to return it
    cfg = small_cfg("Adam", 0.0, activation="relu")
    orig = H.init_arch
    try:
        H.init_arch = lambda mode, n, seed: relu_arch(n)
        s = run_experiment(cfg, n_runs=5, run_seed_base=0, workers=1)
    finally:
        H.init_arch = orig
    assert s.success_rate == 1.0 and s.mean_epochs == 1


def test_parallel_matches_serial():
    cfg = small_cfg("Adam", 3e-2, max_epochs=30, dataset="random")
    cfgs = run_configs_for(cfg, 4, 0)
    serial = [r.to_dict() for r in run_configs(cfgs, workers=1)]
    parallel = [r.to_dict() for r in run_configs(cfgs, workers=3)]
    assert json.dumps(serial) == json.dumps(parallel)


# ---------------------------------------------------------------------------
# sweeps


def test_select_learning_rate():
    assert select_learning_rate({1e-2: 0.5, 3e-3: 0.5, 1e-3: 0.3}) == 3e-3
    assert select_learning_rate({1e-2: 0.0, 1e-3: 0.0}) is None
    assert select_learning_rate({3e-2: 0.0}) is None
    assert select_learning_rate({3e-2: 0.7}) == 3e-2


def test_grid_result_sentinel():
    g = GridResult(None, {1e-1: 0.0}, [])
    assert g.best_label == NO_LR == "----"
    assert GridResult(3e-3, {3e-3: 0.4}, []).best_label == "3e-3"
    assert format_lr(1e-1) == "1e-1" and format_lr(3e-4) == "3e-4"


def test_grid_search_runs_each_rate():
    g = grid_search(small_cfg("SGD", 1.0, max_epochs=3), grid=[1e-2, 1e-4], n_runs=2)
    assert [s.learning_rate for s in g.summaries] == [1e-2, 1e-4]
    assert set(g.table) == {1e-2, 1e-4}
    assert g.best_lr is None and g.to_dict()["best_lr"] == "----"
    single = grid_search(small_cfg("SGD", 1.0, activation="relu", max_epochs=2), grid=[0.0], n_runs=1)
    assert single.table == {0.0: single.summaries[0].success_rate}


# ---------------------------------------------------------------------------
# reporting


@pytest.mark.parametrize(
    "r,f,kind,text",
    [
        (0.61, 0.85, "success", "+39%"),
        (7449, 5022, "epochs", "+33%"),
        (0.5, 0.5, "success", "+0%"),
        (200, 200, "epochs", "+0%"),
        (0.96, 0.9, "success", "-6%"),
    ],
)
def test_relative_change_examples(r, f, kind, text):
    assert format_change(relative_change(r, f, kind)) == text


def test_relative_change_without_baseline():
    assert relative_change(0, 0.5, "success") is None
    assert relative_change(None, 300, "epochs") is None
    assert format_change(None) == NO_VALUE == "—"
    with pytest.raises(ValueError):
        relative_change(1, 2, "speed")


def _summary(alg, ds, rate, epochs, lr=1e-2):
    n = 10
    return ExperimentSummary(alg, ds, "tanh", "recursive", 1, lr, n, round(rate * n), rate, epochs)


def test_comparison_rows_and_dashes():
    rows = comparison_rows(
        [
            _summary("Adam", "random", 0.5, 400.0),
            _summary("Adam", "fixed", 0.6, 300.0),
            _summary("SGD", "random", 0.0, None),
            _summary("SGD", "fixed", 0.3, 900.0),
        ]
    )
    adam, sgd = rows
    assert adam["success_change"] == "+20%" and adam["epochs_change"] == "+25%"
    assert sgd["success_random"] == "—" and sgd["success_change"] == "—"
    assert sgd["epochs_random"] == "—" and sgd["epochs_change"] == "—"
    assert sgd["success_fixed"] == "0.30"


def test_report_files_roundtrip(tmp_path):
    sums = [_summary("Adam", "random", 0.5, 400.0), _summary("Adam", "fixed", 0.6, 300.0)]
    paths = report(sums, tmp_path / "out")
    rows = list(csv.DictReader(io.StringIO(paths["summary_csv"].read_text())))
    assert len(rows) == 2 and rows[0]["algorithm"] == "Adam" and rows[0]["learning_rate"] == "1e-2"
    comp = list(csv.DictReader(io.StringIO(paths["comparison_csv"].read_text())))
    assert comp[0]["success_change"] == "+20%"
    assert load_summaries(paths["json"]) == sums
    doc = json.loads(paths["json"].read_text())
    assert doc["success_series"]["tanh/recursive/1"]["Adam"] == {"random": 0.5, "fixed": 0.6}


def test_report_single_summary(tmp_path):
    paths = report([_summary("Nadam", "fixed", 0.2, 50.0)], tmp_path)
    assert len(paths["summary_csv"].read_text().splitlines()) == 2
    row = json.loads(paths["json"].read_text())["comparison"][0]
    assert row["success_random"] == "—" and row["success_change"] == "—"
    with pytest.raises(ValueError):
        report([], tmp_path)


def test_experiment_summary_json_roundtrip():
    s = _summary("Adam", "fixed", 0.6, 300.0)
    assert ExperimentSummary.from_dict(json.loads(json.dumps(s.to_dict()))) == s


def test_tuned_learning_rates():
    assert set(TUNED_LEARNING_RATES_1STEP) == set(ALGORITHMS)
    assert tuned_learning_rate("adam", "fixed", "tanh") == 3e-2
    assert tuned_learning_rate("AdamW", "random", "relu") == 3e-4
    assert all(lr in LEARNING_RATE_GRID for t in TUNED_LEARNING_RATES_1STEP.values() for lr in t.values())
    with pytest.raises(ValueError):
        tuned_learning_rate("Adam", "mixed", "tanh")

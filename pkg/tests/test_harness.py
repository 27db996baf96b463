import json
from fractions import Fraction
from math import e, log, sqrt
from pathlib import Path

import pytest

from coverlab.core import InputError
from coverlab.harness import (ExperimentConfig, add_points_experiment, replay_trial, run_experiment,
                              ternary_lower_bound_experiment)
from coverlab.harness.cli import main
from coverlab.harness.lowerbounds import (c_agnostic_k, first_coordinate_zero, grid_ternary_loss,
                                          ternary_expected_loss)
from coverlab.harness.report import TrialReport, emit, load
from coverlab.harness.stats import hoeffding_check, hoeffding_slack, paired_slack
from coverlab.learners import constant_learner
from coverlab.losses import Loss

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def small_config(**over):
    d = {"name": "small", "experiment": "agnostic", "trials": 20, "seed": 3,
         "class": {"family": "thresholds", "n": 10},
         "distribution": {"target": 4, "noise": "1/10"},
         "params": {"eps": 0.2, "delta": 0.1}}
    d.update(over)
    return ExperimentConfig.from_dict(d)


def test_hoeffding_values():
    r = hoeffding_check(450, 500, 0.9)
    assert r.slack == pytest.approx(sqrt(log(1e4) / 1000))
    assert r.slack == pytest.approx(0.0962, abs=5e-4)
    assert r.bound == pytest.approx(0.9 - r.slack) and r.passed
    assert not hoeffding_check(0, 500, 0.9).passed
    for conf in (1e-2, 1e-8):
        assert hoeffding_check(37, 37, 0.999, conf).passed
    assert paired_slack(100, 3) == pytest.approx(sqrt(2 * log(6e4) / 100))
    with pytest.raises(InputError):
        hoeffding_slack(0)


def test_zero_trials_gives_undefined_aggregate():
    rep = run_experiment(small_config(), trials=0)
    assert rep.trials == 0 and rep.aggregate() == {"defined": False, "trials": 0}
    assert not rep.passed
    assert emit(rep) == "trial,seed,opt,achieved,success,cover_size,m_U,m_L\n"


def test_repeated_seed_is_byte_identical():
    cfg = small_config()
    assert emit(run_experiment(cfg), "json") == emit(run_experiment(cfg), "json")
    assert emit(run_experiment(cfg), "csv") != emit(run_experiment(cfg, seed=4), "csv")


def test_replay_matches_row():
    cfg = small_config()
    rep = run_experiment(cfg)
    assert replay_trial(cfg, 7) == rep.rows[7]


def test_report_round_trip(tmp_path):
    rep = run_experiment(small_config(), trials=5)
    path = tmp_path / "r.json"
    emit(rep, "json", path)
    assert load(path) == rep
    assert len(emit(rep).splitlines()) == 6
    with pytest.raises(InputError):
        emit(rep, "xml")
    with pytest.raises(OSError):
        emit(rep, "csv", tmp_path / "missing" / "r.csv")


def test_agnostic_thresholds_config():
    rep = run_experiment(ExperimentConfig.load(CONFIGS / "agnostic-thresholds.toml"))
    agg = rep.aggregate()
    assert agg["trials"] == 500 and rep.rows[0].opt == pytest.approx(0.1)
    assert rep.passed, agg


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    cfg = ExperimentConfig.load(path)
    assert run_experiment(cfg, trials=1).trials == 1


def test_config_errors():
    with pytest.raises(InputError):
        small_config(experiment="bogus")
    with pytest.raises(InputError):
        small_config(colour="blue")
    with pytest.raises(InputError):
        small_config(params={"eps": 0.2})
    with pytest.raises(InputError):
        ExperimentConfig.from_dict({"experiment": "agnostic"})
    with pytest.raises(InputError):
        ExperimentConfig.from_toml("not = [valid")


def test_resource_abort_marks_incomplete():
    # subset enumeration is the budgeted step; C(10, 8) = 45 subsets exceed 2
    rep = run_experiment(small_config(experiment="malicious", budget=2,
                                      params={"eps": 0.25, "delta": 0.1, "eta": 0.1, "m_U": 10}), trials=3)
    assert not rep.complete and not rep.passed and "trial 0" in rep.note


# lower bounds


def test_ternary_grid_loss_matches_pair_loss():
    assert grid_ternary_loss(2, 3).table == Loss.ternary(3).table


def test_ternary_no_samples():
    # each unseen point: wrong first bit w.p. 1/2, then cost 1 or c equally
    c = 3
    H = first_coordinate_zero(4, 2)
    val = ternary_expected_loss(4, 0, constant_learner(H, 0), grid_ternary_loss(2, c))
    assert val == Fraction(1 + c, 4)
    assert val >= Fraction(c, 4) and float(val) >= c / (4 * e)


def test_ternary_small_instance():
    r = ternary_lower_bound_experiment(8, 2, 3)
    assert r.expected == Fraction(113, 128)
    assert r.passed and r.meets_4e and float(r.expected) >= 3 / (4 * e)
    const = ternary_lower_bound_experiment(8, 2, 3, constant_learner(first_coordinate_zero(8, 2), 0))
    assert const.expected == 1 and const.meets_4e
    with pytest.raises(InputError):
        ternary_lower_bound_experiment(4, 2, 3)


def test_c_agnostic_variant():
    k = c_agnostic_k(1, 4)
    assert k == 7 and k > 2 / log(4 / 3)
    r = ternary_lower_bound_experiment(k, 1, 3, n=4)
    assert r.bar == pytest.approx((3 / 4) ** 3 * 3)
    assert r.passed


def test_add_points():
    degenerate = add_points_experiment(0.0, 0.1)
    assert degenerate.opt == 0 and degenerate.passed is None
    r = add_points_experiment(0.2, 0.05, trials=2000, seed=1)
    assert r.opt == pytest.approx(0.05 * 0.05)
    assert r.identical_padding
    assert r.passed
    with pytest.raises(InputError):
        add_points_experiment(0.2, 0.6)


# command line


def test_cli_run_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text((CONFIGS / "agnostic-realizable.toml").read_text())
    out = tmp_path / "r.json"
    assert main(["run", str(cfg), "--trials", "20", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["aggregate"]["trials"] == 20
    assert main(["run", str(tmp_path / "nope.toml")]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text('experiment = "agnostic"\n')
    assert main(["run", str(bad)]) == 2
    assert main(["agnostic", "--trials", "0"]) == 0
    capsys.readouterr()


def test_cli_failing_run_exits_one(tmp_path):
    # a learner can't beat OPT + eps with a vanishing labeled sample on a noisy target
    cfg = tmp_path / "c.toml"
    cfg.write_text('experiment = "agnostic"\ntrials = 60\n[class]\nfamily = "thresholds"\nn = 20\n'
                   '[distribution]\ntarget = 10\nnoise = "2/5"\n'
                   '[params]\neps = 0.01\ndelta = 0.01\nm_U = 20\nm_L = 1\n')
    assert main(["run", str(cfg)]) == 1


def test_cli_lowerbound(capsys):
    assert main(["lowerbound", "ternary"]) == 0
    assert "113/128" in capsys.readouterr().out
    assert main(["lowerbound", "add-points", "--trials", "500"]) in (0, 1)


def test_cli_resource_abort(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text((CONFIGS / "malicious.toml").read_text() + "\n")
    text = cfg.read_text().replace('experiment = "malicious"', 'experiment = "malicious"\nbudget = 2')
    cfg.write_text(text)
    assert main(["run", str(cfg), "--trials", "2"]) == 2

"""Tests for the command line entry point."""

import pytest

from main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main

BANDIT_CONF = """\
name = cli_bandit
domain = bandit
learner.alpha = 1.0
episodes = 20
seeds = 0, 1
eval_episodes = 2
"""


@pytest.fixture
def conf(tmp_path):
    path = tmp_path / "cli_bandit.conf"
    path.write_text(BANDIT_CONF)
    return path


def test_run_writes_results_and_the_effective_config(conf, tmp_path) -> None:
    out = tmp_path / "out"
    assert main(["run", str(conf), "--out", str(out), "--override", "episodes=10"]) == EXIT_OK
    for suffix in (".csv", ".svg", ".summary.json", ".log", ".conf"):
        assert (out / f"cli_bandit{suffix}").exists()
    assert "episodes = 10" in (out / "cli_bandit.conf").read_text()


def test_validate(conf) -> None:
    assert main(["validate", str(conf)]) == EXIT_OK
    assert main(["validate", str(conf), "--override", "episodes=0"]) == EXIT_CONFIG
    assert main(["validate", str(conf), "--override", "domain=chain"]) == EXIT_CONFIG


def test_missing_config_is_a_configuration_error(tmp_path) -> None:
    assert main(["run", str(tmp_path / "absent.conf")]) == EXIT_CONFIG


def test_unwritable_output_is_a_runtime_error(conf, tmp_path) -> None:
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["run", str(conf), "--out", str(blocker / "out")]) == EXIT_RUNTIME


def test_oracle_prints_and_dumps(tmp_path, capsys) -> None:
    dump = tmp_path / "q.txt"
    assert main(["oracle", "cliff", "--width", "10", "--dump", str(dump)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "expected V*      192" in printed
    assert "greedy return    192" in printed
    assert len(dump.read_text().splitlines()) == 19 * 4


def test_diagnose_prints_the_census_table(capsys) -> None:
    assert main(["diagnose", "bandit", "--runs", "3", "--episodes", "20"]) == EXIT_OK
    table = capsys.readouterr().out
    for label in ("naive_q0", "fixed_q0", "fixed_osio", "gtsdt", "flat"):
        assert label in table

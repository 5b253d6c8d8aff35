"""Tests for episode records and their CSV encoding."""

import csv

from ophrl.core.records import CSV_HEADER, RunRecord, concatenate_csv, render_csv, write_csv
from ophrl.core.types import TerminalKind


def _record(seed: int, episode: int, ret: float = -3.5) -> RunRecord:
    return RunRecord(
        run_id=f"cliff-s{seed}",
        seed=seed,
        episode=episode,
        steps=12,
        episode_return=ret,
        terminal_kind=TerminalKind.SUCCESS,
        temperature=0.0,
        kappa=0.25,
    )


def test_rows_use_crlf_and_exact_reals() -> None:
    text = render_csv([_record(0, 0, 0.1)])
    assert text == (
        "run_id,seed,episode,steps,return,terminal_kind,temperature,kappa\r\n"
        "cliff-s0,0,0,12,0.10000000000000001,success,0,0.25\r\n"
    )
    assert render_csv([_record(0, 0)], header=False) == "cliff-s0,0,0,12,-3.5,success,0,0.25\r\n"


def test_concatenated_parts_keep_order_under_one_header(tmp_path) -> None:
    parts = []
    for seed in (4, 2):
        parts.append(write_csv(tmp_path / f"seed-{seed}.csv", [_record(seed, e) for e in range(3)], header=False))
    target = concatenate_csv(tmp_path / "all.csv", parts)

    with open(target, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_HEADER
    assert [(row[1], row[2]) for row in rows[1:]] == [
        ("4", "0"), ("4", "1"), ("4", "2"), ("2", "0"), ("2", "1"), ("2", "2"),
    ]

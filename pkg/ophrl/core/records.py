"""Per-episode records and their CSV encoding."""

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List

from ophrl.core.qstore import format_real
from ophrl.core.types import TerminalKind

CSV_HEADER = ("run_id", "seed", "episode", "steps", "return", "terminal_kind", "temperature", "kappa")


@dataclass(frozen=True, slots=True)
class RunRecord:
    """Metrics of one episode.

    Attributes:
        run_id: Experiment name and seed
        seed: Run seed
        episode: Zero-based episode index within the run
        steps: Primitive steps taken
        episode_return: Sum of raw environment rewards
        terminal_kind: How the episode ended; none when truncated
        temperature: Root Boltzmann temperature during the episode (0 if not Boltzmann)
        kappa: Commitment probability during the episode
    """

    run_id: str
    seed: int
    episode: int
    steps: int
    episode_return: float
    terminal_kind: TerminalKind
    temperature: float
    kappa: float

    def row(self) -> List[str]:
        return [
            self.run_id,
            str(self.seed),
            str(self.episode),
            str(self.steps),
            format_real(self.episode_return),
            self.terminal_kind.value,
            format_real(self.temperature),
            format_real(self.kappa),
        ]


def _writer(stream):
    return csv.writer(stream, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")


def render_csv(records: Iterable[RunRecord], header: bool = True) -> str:
    """Encode records as RFC-4180 CSV text."""
    buffer = io.StringIO()
    writer = _writer(buffer)
    if header:
        writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.row())
    return buffer.getvalue()


def write_csv(path: str | Path, records: Iterable[RunRecord], header: bool = True) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(render_csv(records, header=header))
    return path


def concatenate_csv(target: str | Path, parts: Iterable[str | Path]) -> Path:
    """Write the header, then each headerless part in the given order."""
    target = Path(target)
    with open(target, "wb") as out:
        out.write(render_csv([]).encode("utf-8"))
        for part in parts:
            out.write(Path(part).read_bytes())
    return target

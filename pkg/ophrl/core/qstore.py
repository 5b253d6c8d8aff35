"""Tabular action-value store shared by all tasks of one run."""

import math
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, Hashable, Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ophrl.core.errors import AdmissibilityError, ParameterError
from ophrl.core.types import ActionRef, StateId

if TYPE_CHECKING:
    from ophrl.core.hierarchy import TaskDef

CellKey = Tuple[Hashable, StateId, ActionRef]
UpdateListener = Callable[[Hashable, StateId, ActionRef, float, float, float], None]


def format_real(value: float) -> str:
    """Format a real with 17 significant digits (exact round trip)."""
    return format(value, ".17g")


class QStore:
    """Map from (share key, state, action) to an estimated return.

    Attributes:
        default: Value read for cells that were never written
        table: The written cells
        listeners: Callbacks run after every update with
            (share_key, state, action, old, target, new)
    """

    def __init__(self, default: float = 0.0) -> None:
        if not math.isfinite(default):
            raise ParameterError(f"default Q value must be finite, got {default}")
        self.default = default
        self.table: Dict[CellKey, float] = {}
        self.listeners: List[UpdateListener] = []

    def get(self, task: "TaskDef", s: StateId, a: ActionRef) -> float:
        """Return Q_task(s, a), or the default when the cell is absent."""
        return self.table.get((task.share_key, s, a), self.default)

    def update(
        self, task: "TaskDef", s: StateId, a: ActionRef, target: float, alpha: float
    ) -> float:
        """Move Q_task(s, a) toward target by a convex combination.

        Args:
            task: Task whose share key addresses the cell
            s: State of the cell
            a: Action of the cell
            target: Backup target, must be finite
            alpha: Learning rate in (0, 1]

        Returns:
            The new cell value
        """
        if not 0.0 < alpha <= 1.0:
            raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
        if not math.isfinite(target):
            raise ParameterError(f"backup target must be finite, got {target}")

        key = (task.share_key, s, a)
        old = self.table.get(key, self.default)
        if alpha == 1.0:
            new = target
        else:
            # clamped so rounding never leaves [min(old, target), max(old, target)]
            new = min(max(old + alpha * (target - old), min(old, target)), max(old, target))
        self.table[key] = new

        for listener in self.listeners:
            listener(task.share_key, s, a, old, target, new)
        return new

    def value(self, task: "TaskDef", s: StateId) -> float:
        """Return V_task(s), the highest Q over the actions the task offers at s."""
        actions = task.actions(s)
        if not actions:
            raise AdmissibilityError(f"task {task.id!r} offers no actions at state {s}")
        return max(self.get(task, s, a) for a in actions)

    def greedy_set(
        self, task: "TaskDef", s: StateId, tie_epsilon: float = 0.0
    ) -> List[ActionRef]:
        """Return every action whose value is within tie_epsilon of V_task(s).

        The result keeps the task's action order and is never empty.
        """
        if tie_epsilon < 0:
            raise ParameterError(f"tie_epsilon must be >= 0, got {tie_epsilon}")
        actions = task.actions(s)
        if not actions:
            raise AdmissibilityError(f"task {task.id!r} offers no actions at state {s}")
        values = [self.get(task, s, a) for a in actions]
        threshold = max(values) - tie_epsilon
        return [a for a, q in zip(actions, values) if q >= threshold]

    def is_greedy(
        self, task: "TaskDef", s: StateId, a: ActionRef, tie_epsilon: float = 0.0
    ) -> bool:
        return a in self.greedy_set(task, s, tie_epsilon)

    def items(self) -> Iterator[Tuple[CellKey, float]]:
        return iter(self.table.items())

    def dump_lines(self) -> List[str]:
        """Render the table as sorted `task_key,state,action,value` lines."""
        lines = [
            f"{_key_text(key)},{s},{a},{format_real(value)}"
            for (key, s, a), value in self.table.items()
        ]
        return sorted(lines)

    def dump(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text("\n".join(self.dump_lines()) + "\n", encoding="utf-8")
        return path


def _key_text(key: Hashable) -> str:
    if isinstance(key, tuple):
        return ":".join(_key_text(part) for part in key)
    return str(key)


class LearningParams(BaseModel):
    """Step size, discount and trace decay for one run."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    alpha: float = Field(0.1, gt=0.0, le=1.0)
    gamma: float = Field(1.0, ge=0.0, le=1.0)
    lam: float = Field(0.9, ge=0.0, le=1.0, alias="lambda")

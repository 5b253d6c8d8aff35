"""Discrete state and action vocabulary shared by every module."""

from dataclasses import dataclass
from enum import Enum
from typing import TypeAlias

# Environment-defined integer encoding of a state.
StateId: TypeAlias = int


@dataclass(frozen=True, slots=True)
class Primitive:
    """An environment action, addressed by its primitive id."""

    id: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True, slots=True)
class TaskAction:
    """A subtask offered as an action by its parent task."""

    task_id: str

    def __str__(self) -> str:
        return f"task:{self.task_id}"


ActionRef: TypeAlias = Primitive | TaskAction


def is_task(action: ActionRef) -> bool:
    return isinstance(action, TaskAction)


class TerminalKind(str, Enum):
    """How a transition ended the episode, if it did."""

    NONE = "none"
    SUCCESS = "success"
    FAILURE = "failure"

"""Task graphs: admissible sets, per-state action sets and reward hooks."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Hashable, Iterable, List, Sequence

from loguru import logger

from ophrl.core.errors import ConfigurationError, HookError
from ophrl.core.types import ActionRef, StateId, TaskAction, TerminalKind


@dataclass(frozen=True, slots=True)
class RewardContext:
    """Everything a task's reward hooks may inspect about one transition.

    Attributes:
        task: Id of the task whose hooks are evaluated
        s: State before the primitive step
        a: Action the task chose at s
        raw_reward: Reward emitted by the environment
        s_prime: State after the primitive step
        env_terminal_kind: Whether and how the step ended the episode
        subtask_completed: The task itself leaves its admissible set at s_prime
    """

    task: str
    s: StateId
    a: ActionRef
    raw_reward: float
    s_prime: StateId
    env_terminal_kind: TerminalKind = TerminalKind.NONE
    subtask_completed: bool = False


@dataclass(frozen=True, slots=True)
class Rejected:
    pass


@dataclass(frozen=True, slots=True)
class Accepted:
    r_prime: float


HookResult = Rejected | Accepted


def _never(ctx: RewardContext) -> bool:
    return False


def _identity(ctx: RewardContext) -> float:
    return ctx.raw_reward


@dataclass(eq=False)
class TaskDef:
    """One node of a task hierarchy.

    Attributes:
        id: Task id, unique within its hierarchy
        admissible: Membership test for the task's admissible states
        actions: Ordered actions the task offers at an admissible state
        share_key: Key under which the task's Q values are stored;
            defaults to the id
        reject_reward: Hook deciding whether a transition is ignored
        transform_reward: Hook mapping the raw reward to the backed-up reward
        is_root: Whether the task is the hierarchy root
    """

    id: str
    admissible: Callable[[StateId], bool]
    actions: Callable[[StateId], Sequence[ActionRef]]
    share_key: Hashable = None
    reject_reward: Callable[[RewardContext], bool] = _never
    transform_reward: Callable[[RewardContext], float] = _identity
    is_root: bool = False

    def __post_init__(self) -> None:
        if self.share_key is None:
            self.share_key = self.id

    def offers(self, s: StateId, a: ActionRef) -> bool:
        return self.admissible(s) and a in self.actions(s)

    def __repr__(self) -> str:
        return f"TaskDef({self.id!r})"


class TransitionKind(str, Enum):
    TASK_COMPLETED = "task_completed"
    ACTION_CONTINUES = "task_continues_action_continues"
    ACTION_DONE = "task_continues_action_done"
    TASK_ABORTED = "task_aborted"


def apply_reward_hooks(task: TaskDef, ctx: RewardContext) -> HookResult:
    """Run a task's rejection hook, then its transformation hook.

    Returns:
        Rejected when the task ignores this transition, otherwise Accepted
        carrying the transformed reward
    """
    if task.reject_reward(ctx):
        return Rejected()
    r_prime = task.transform_reward(ctx)
    if not math.isfinite(r_prime):
        raise HookError(f"task {task.id!r} transformed reward {ctx.raw_reward} to {r_prime}")
    return Accepted(float(r_prime))


@dataclass
class Hierarchy:
    """A rooted, acyclic graph of tasks.

    Attributes:
        tasks: Tasks by id
        root: Id of the root task
    """

    tasks: Dict[str, TaskDef]
    root: str
    name: str = "hierarchy"

    def __post_init__(self) -> None:
        if self.root not in self.tasks:
            raise ConfigurationError(f"root task {self.root!r} is not registered")
        self.tasks[self.root].is_root = True

    @property
    def root_task(self) -> TaskDef:
        return self.tasks[self.root]

    def task(self, task_id: str) -> TaskDef:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise ConfigurationError(f"unknown task id {task_id!r}") from None

    def is_flat(self) -> bool:
        return len(self.tasks) == 1

    def classify_transition(
        self,
        task: TaskDef,
        a: ActionRef,
        s_prime: StateId,
        offered_by_parent: bool = True,
    ) -> TransitionKind:
        """Decide which backup, if any, the transition earns for `task`.

        Args:
            task: Task that chose `a` at an admissible state
            a: The task's chosen action
            s_prime: Successor state
            offered_by_parent: Whether the parent still offers `task` at
                s_prime; always true for the root

        Returns:
            The transition kind
        """
        if not task.admissible(s_prime):
            return TransitionKind.TASK_COMPLETED
        if not offered_by_parent:
            return TransitionKind.TASK_ABORTED
        if isinstance(a, TaskAction):
            child = self.task(a.task_id)
            if child.admissible(s_prime) and a in task.actions(s_prime):
                return TransitionKind.ACTION_CONTINUES
        return TransitionKind.ACTION_DONE

    def validate(self, sample_states: Iterable[StateId]) -> List[str]:
        """Report structural problems; an empty list means the hierarchy is valid.

        Checks for cycles and dangling task ids reachable from the root, and
        over the sampled states for admissible tasks with no actions and for
        subtasks offered where they are not admissible.
        """
        diagnostics: List[str] = []
        states = list(sample_states)

        children: Dict[str, set] = {task_id: set() for task_id in self.tasks}
        for task in self.tasks.values():
            for s in states:
                if not task.admissible(s):
                    continue
                actions = task.actions(s)
                if not actions:
                    diagnostics.append(f"task {task.id!r} offers no actions at state {s}")
                for a in actions:
                    if not isinstance(a, TaskAction):
                        continue
                    children[task.id].add(a.task_id)
                    child = self.tasks.get(a.task_id)
                    if child is not None and not child.admissible(s):
                        diagnostics.append(
                            f"task {task.id!r} offers {a.task_id!r} at state {s} "
                            "where it is not admissible"
                        )

        for task_id, kids in children.items():
            for child_id in sorted(kids):
                if child_id not in self.tasks:
                    diagnostics.append(f"task {task_id!r} refers to unknown task {child_id!r}")

        diagnostics.extend(self._cycle_diagnostics(children))

        # Admissibility diagnostics repeat per state; keep one of each.
        unique = list(dict.fromkeys(diagnostics))
        if unique:
            logger.warning(f"Hierarchy {self.name!r} has {len(unique)} problem(s)")
        else:
            logger.debug(f"Hierarchy {self.name!r} validated over {len(states)} states")
        return unique

    def _cycle_diagnostics(self, children: Dict[str, set]) -> List[str]:
        found: List[str] = []
        visiting: List[str] = []
        done: set = set()

        def visit(task_id: str) -> None:
            if task_id in done or task_id not in children:
                return
            visiting.append(task_id)
            for child_id in sorted(children[task_id]):
                if child_id in visiting:
                    cycle = visiting[visiting.index(child_id):] + [child_id]
                    found.append("cycle: " + " -> ".join(cycle))
                else:
                    visit(child_id)
            visiting.pop()
            done.add(task_id)

        visit(self.root)
        return found

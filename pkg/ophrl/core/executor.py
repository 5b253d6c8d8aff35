"""Polling execution of a task hierarchy with off-policy backups.

Every primitive step descends from the root, letting each level choose an
action (or continue its remembered subtask under commitment), executes the
leaf primitive, then unwinds leaf-to-root. On the way up each level builds
its backup request, hands it to the learner, and only then decides whether
its own choice was greedy; that flag, OR-ed with the flag from below, is what
the level above sees as "exploring in a subtask".
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from ophrl.core.errors import AdmissibilityError, EpisodeStructureError
from ophrl.core.exploration import CommitmentSchedule, PolicyBundle, select, temperature_of
from ophrl.core.hierarchy import (
    Hierarchy,
    Rejected,
    RewardContext,
    TaskDef,
    TransitionKind,
    apply_reward_hooks,
)
from ophrl.core.learners import BackupKind, BackupRequest, Learner
from ophrl.core.qstore import QStore
from ophrl.core.records import RunRecord
from ophrl.core.types import ActionRef, Primitive, StateId, TaskAction, TerminalKind
from ophrl.envs.base import Environment

DEFAULT_STEP_LIMIT = 10_000

KIND_OF = {
    TransitionKind.TASK_COMPLETED: BackupKind.TERMINAL,
    TransitionKind.ACTION_CONTINUES: BackupKind.CONTINUATION,
    TransitionKind.ACTION_DONE: BackupKind.COMPLETION,
}


class UpdatingMode(str, Enum):
    ACTIVE_PATH = "active_path"
    ALL_GOALS = "all_goals"


@dataclass(slots=True)
class Decision:
    task_id: str
    state: StateId
    action: ActionRef
    was_greedy: bool = True


@dataclass
class CommitmentState:
    """Path of the previous step and the probability of continuing it.

    Attributes:
        active_stack: (task id, action) pairs from the root down
        kappa: Per-level probability of continuing the remembered subtask
    """

    active_stack: List[Tuple[str, ActionRef]] = field(default_factory=list)
    kappa: float = 0.0

    def clear(self) -> None:
        self.active_stack.clear()


@dataclass
class StepOutcome:
    """Result of one primitive step.

    Attributes:
        raw_reward: Environment reward
        s_prime: Successor state
        terminal: Whether and how the step ended the episode
        exploring_in_subtask: Some decision below the root was non-greedy
        candidates: Every hook-accepted, non-aborted request, leaf first,
            each tagged with the exploration flag its level saw
        decision_path: Decisions from the root down to the primitive
    """

    raw_reward: float
    s_prime: StateId
    terminal: TerminalKind
    exploring_in_subtask: bool
    candidates: List[BackupRequest]
    decision_path: List[Decision]

    @property
    def backup_requests(self) -> List[BackupRequest]:
        """Requests surviving the exploration gate."""
        return [req for req in self.candidates if not req.exploring_below]

    @property
    def state(self) -> StateId:
        return self.decision_path[0].state

    @property
    def primitive(self) -> Primitive:
        return self.decision_path[-1].action


def _request(
    task: TaskDef,
    kind: TransitionKind,
    s: StateId,
    a: ActionRef,
    raw_reward: float,
    s_prime: StateId,
    terminal: TerminalKind,
    gate: Tuple[Tuple[str, StateId, ActionRef], ...],
    exploring_below: bool,
) -> Optional[BackupRequest]:
    if kind is TransitionKind.TASK_ABORTED:
        return None
    ctx = RewardContext(
        task=task.id,
        s=s,
        a=a,
        raw_reward=raw_reward,
        s_prime=s_prime,
        env_terminal_kind=terminal,
        subtask_completed=kind is TransitionKind.TASK_COMPLETED,
    )
    hooked = apply_reward_hooks(task, ctx)
    if isinstance(hooked, Rejected):
        return None
    return BackupRequest(
        task=task.id,
        s=s,
        a=a,
        kind=KIND_OF[kind],
        r_prime=hooked.r_prime,
        s_prime=s_prime,
        gate_decisions=gate,
        exploring_below=exploring_below,
    )


def off_path_requests(hierarchy: Hierarchy, outcome: StepOutcome) -> List[BackupRequest]:
    """Requests for tasks that did not execute but offer the executed primitive at s."""
    on_path = {d.task_id for d in outcome.decision_path}
    s, leaf = outcome.state, outcome.primitive
    requests = []
    for task in hierarchy.tasks.values():
        if task.id in on_path or not task.admissible(s) or leaf not in task.actions(s):
            continue
        kind = hierarchy.classify_transition(task, leaf, outcome.s_prime)
        req = _request(
            task, kind, s, leaf, outcome.raw_reward, outcome.s_prime, outcome.terminal, (), False
        )
        if req is not None:
            requests.append(req)
    return requests


def dispatch_updating_mode(
    mode: UpdatingMode, hierarchy: Hierarchy, outcome: StepOutcome
) -> List[BackupRequest]:
    """Gated requests of the step; all-goals adds those of non-executing tasks."""
    requests = outcome.backup_requests
    if UpdatingMode(mode) is UpdatingMode.ALL_GOALS:
        requests = requests + off_path_requests(hierarchy, outcome)
    return requests


class OPHRLExecutor:
    """Runs one hierarchy on one environment for one run.

    Attributes:
        hierarchy: Task graph
        env: Environment stepped by the leaf primitives
        store: Q values of every task
        learner: Consumer of backup requests; None evaluates without learning
        policies: Root and subtask selection policies
        updating_mode: active_path or all_goals
        tie_epsilon: Tolerance defining greedy actions
        commitment: Remembered path and current kappa
    """

    def __init__(
        self,
        hierarchy: Hierarchy,
        env: Environment,
        store: QStore,
        learner: Optional[Learner],
        policies: PolicyBundle,
        updating_mode: UpdatingMode = UpdatingMode.ACTIVE_PATH,
        tie_epsilon: float = 0.0,
    ) -> None:
        self.hierarchy = hierarchy
        self.env = env
        self.store = store
        self.learner = learner
        self.policies = policies
        self.updating_mode = UpdatingMode(updating_mode)
        self.tie_epsilon = tie_epsilon
        self.commitment = CommitmentState()

    def _committed_action(
        self, task: TaskDef, s: StateId, path: List[Decision], rng: np.random.Generator
    ) -> Optional[ActionRef]:
        kappa = self.commitment.kappa
        stack = self.commitment.active_stack
        depth = len(path)
        if kappa <= 0.0 or depth >= len(stack):
            return None
        remembered_task, remembered = stack[depth]
        if remembered_task != task.id or not isinstance(remembered, TaskAction):
            return None
        if any(stack[i] != (path[i].task_id, path[i].action) for i in range(depth)):
            return None
        if not self.hierarchy.task(remembered.task_id).admissible(s):
            return None
        if remembered not in task.actions(s):
            return None
        if kappa < 1.0 and rng.random() >= kappa:
            return None
        return remembered

    def step(self, rng: np.random.Generator) -> StepOutcome:
        """Execute exactly one primitive from the environment's current state."""
        h = self.hierarchy
        s = self.env.state
        task = h.root_task
        if not task.admissible(s):
            raise EpisodeStructureError(f"root task is not admissible at state {s}")

        path: List[Decision] = []
        while True:
            if not task.actions(s):
                raise AdmissibilityError(f"task {task.id!r} offers no actions at state {s}")
            action = self._committed_action(task, s, path, rng)
            if action is None:
                action = select(self.policies.for_task(task), self.store, task, s, rng, self.tie_epsilon)
            path.append(Decision(task.id, s, action))
            if not isinstance(action, TaskAction):
                break
            task = h.task(action.task_id)

        raw_reward, s_prime, terminal = self.env.step(path[-1].action.id, rng)

        candidates: List[BackupRequest] = []
        exploring_below = False
        into_root = False
        for depth in range(len(path) - 1, -1, -1):
            decision = path[depth]
            task = h.task(decision.task_id)
            if depth == 0:
                offered = True
                into_root = exploring_below
            else:
                offered = h.task(path[depth - 1].task_id).offers(s_prime, TaskAction(task.id))
            kind = h.classify_transition(task, decision.action, s_prime, offered)
            gate = tuple((d.task_id, d.state, d.action) for d in path[depth + 1:])
            req = _request(
                task, kind, s, decision.action, raw_reward, s_prime, terminal, gate, exploring_below
            )
            if req is not None:
                candidates.append(req)
                if self.learner is not None:
                    self.learner.on_request(req, exploring_below, self.store)
            decision.was_greedy = self.store.is_greedy(task, s, decision.action, self.tie_epsilon)
            exploring_below = exploring_below or not decision.was_greedy

        outcome = StepOutcome(
            raw_reward=raw_reward,
            s_prime=s_prime,
            terminal=terminal,
            exploring_in_subtask=into_root,
            candidates=candidates,
            decision_path=path,
        )

        if self.learner is not None:
            if self.updating_mode is UpdatingMode.ALL_GOALS:
                for req in off_path_requests(h, outcome):
                    self.learner.on_request(req, False, self.store)
            self.learner.sweep(self.store)

        self.commitment.active_stack = [(d.task_id, d.action) for d in path]
        return outcome

    def run_episode(
        self,
        episode: int,
        rng: np.random.Generator,
        schedule: Optional[CommitmentSchedule] = None,
        step_limit: int = DEFAULT_STEP_LIMIT,
        run_id: str = "",
        seed: int = 0,
    ) -> RunRecord:
        """Reset the environment and step until it terminates or the step limit is hit.

        Cooling is applied once after the episode; the record carries the
        root temperature and kappa the episode ran with.
        """
        self.env.reset(rng)
        self.commitment.clear()
        self.commitment.kappa = schedule.kappa_at(episode) if schedule else 0.0
        temperature = temperature_of(self.policies.root)

        total, steps = 0.0, 0
        terminal = TerminalKind.NONE
        while steps < step_limit:
            outcome = self.step(rng)
            total += outcome.raw_reward
            steps += 1
            if outcome.terminal is not TerminalKind.NONE:
                terminal = outcome.terminal
                break
        else:
            logger.warning(f"{run_id or 'episode'} {episode}: truncated after {step_limit} steps")

        if self.learner is not None:
            self.learner.on_episode_end()
        self.policies = self.policies.tick()

        return RunRecord(
            run_id=run_id,
            seed=seed,
            episode=episode,
            steps=steps,
            episode_return=total,
            terminal_kind=terminal,
            temperature=temperature,
            kappa=self.commitment.kappa,
        )

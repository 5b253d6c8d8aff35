"""Temporal-difference learners consuming the executor's backup requests.

Six variants share one interface:

* naive_q0: one-step Q-learning that ignores exploration below the requesting task
* fixed_q0: one-step Q-learning that skips backups while a subtask explores
* fixed_osio: one-step intra-option learning with the same gate
* watkins_fixed: Watkins' Q(lambda) that clears its trace while a subtask explores
* tsdt: replay trace that never stores entries recorded while a subtask explored
* gtsdt: replay trace that stores everything and gates entries on the current
  greediness of the subtask decisions underneath them
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Hashable, List, Optional, Tuple

from ophrl.core.errors import ContractViolation
from ophrl.core.hierarchy import Hierarchy, TaskDef
from ophrl.core.qstore import LearningParams, QStore
from ophrl.core.types import ActionRef, StateId, TaskAction

# Eligibilities below this are dropped from the Watkins trace.
ELIGIBILITY_CUTOFF = 1e-8


class BackupKind(str, Enum):
    CONTINUATION = "continuation"
    COMPLETION = "completion"
    TERMINAL = "terminal"


GateDecision = Tuple[str, StateId, ActionRef]


@dataclass(frozen=True, slots=True)
class BackupRequest:
    """One pending TD backup of Q_task(s, a).

    Attributes:
        task: Id of the task owning the backed-up cell
        s: State of the cell
        a: Action of the cell
        kind: Which target the backup uses
        r_prime: Reward after the task's hooks
        s_prime: Successor state
        gate_decisions: Decisions taken below `task` on this step
        exploring_below: Whether some decision below `task` was non-greedy
    """

    task: str
    s: StateId
    a: ActionRef
    kind: BackupKind
    r_prime: float
    s_prime: StateId
    gate_decisions: Tuple[GateDecision, ...] = ()
    exploring_below: bool = False


@dataclass(slots=True)
class TraceEntry:
    request: BackupRequest
    step: int = 0
    blocked: bool = False

    @property
    def gate_decisions(self) -> Tuple[GateDecision, ...]:
        return self.request.gate_decisions


class LearnerVariant(str, Enum):
    NAIVE_Q0 = "naive_q0"
    FIXED_Q0 = "fixed_q0"
    FIXED_OSIO = "fixed_osio"
    WATKINS_FIXED = "watkins_fixed"
    TSDT = "tsdt"
    GTSDT = "gtsdt"


def compute_target(
    kind: BackupKind,
    r_prime: float,
    gamma: float,
    store: QStore,
    task: TaskDef,
    s_prime: StateId,
    a: ActionRef,
) -> float:
    """Backup target for Q_task(s, a) given the successor s_prime.

    continuation: r' + gamma * Q_task(s', a)
    completion:   r' + gamma * V_task(s')
    terminal:     r'
    """
    if kind is BackupKind.TERMINAL:
        return r_prime
    if kind is BackupKind.CONTINUATION:
        if not isinstance(a, TaskAction):
            raise ContractViolation(f"continuation backup for primitive action {a}")
        return r_prime + gamma * store.get(task, s_prime, a)
    return r_prime + gamma * store.value(task, s_prime)


class Learner:
    """Base learner: holds parameters and resolves task ids.

    Attributes:
        variant: Which learner this is
        params: Step size, discount and trace decay
        hierarchy: Tasks the requests refer to
        tie_epsilon: Tolerance defining greedy actions
    """

    variant: LearnerVariant

    def __init__(
        self, params: LearningParams, hierarchy: Hierarchy, tie_epsilon: float = 0.0
    ) -> None:
        self.params = params
        self.hierarchy = hierarchy
        self.tie_epsilon = tie_epsilon

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        raise NotImplementedError

    def sweep(self, store: QStore) -> int:
        return 0

    def on_episode_end(self) -> None:
        pass

    def _target(self, req: BackupRequest, store: QStore, kind: Optional[BackupKind] = None) -> float:
        task = self.hierarchy.task(req.task)
        return compute_target(
            kind or req.kind, req.r_prime, self.params.gamma, store, task, req.s_prime, req.a
        )

    def _apply(self, req: BackupRequest, store: QStore, target: float) -> float:
        return store.update(self.hierarchy.task(req.task), req.s, req.a, target, self.params.alpha)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params!r})"


def _max_kind(kind: BackupKind) -> BackupKind:
    # Q-learning never bootstraps from the same subtask.
    return BackupKind.TERMINAL if kind is BackupKind.TERMINAL else BackupKind.COMPLETION


class NaiveQ0(Learner):
    variant = LearnerVariant.NAIVE_Q0

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        self._apply(req, store, self._target(req, store, _max_kind(req.kind)))


class FixedQ0(Learner):
    variant = LearnerVariant.FIXED_Q0

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        if exploring_below:
            return
        self._apply(req, store, self._target(req, store, _max_kind(req.kind)))


class FixedOSIO(Learner):
    variant = LearnerVariant.FIXED_OSIO

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        if exploring_below:
            return
        self._apply(req, store, self._target(req, store))


class WatkinsFixed(Learner):
    """Watkins' Q(lambda) with replacing traces, one trace per task share key.

    Attributes:
        traces: share key -> {(state, action): eligibility}
    """

    variant = LearnerVariant.WATKINS_FIXED

    def __init__(
        self, params: LearningParams, hierarchy: Hierarchy, tie_epsilon: float = 0.0
    ) -> None:
        super().__init__(params, hierarchy, tie_epsilon)
        self.traces: Dict[Hashable, Dict[Tuple[StateId, ActionRef], float]] = {}

    def __len__(self) -> int:
        return sum(len(trace) for trace in self.traces.values())

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        if exploring_below:
            self.traces.clear()
            return

        task = self.hierarchy.task(req.task)
        trace = self.traces.setdefault(task.share_key, {})
        greedy = store.is_greedy(task, req.s, req.a, self.tie_epsilon)
        if not greedy:
            # earlier entries must not absorb the error of a non-greedy choice
            trace.clear()

        delta = self._target(req, store, _max_kind(req.kind)) - store.get(task, req.s, req.a)
        trace[(req.s, req.a)] = 1.0
        for (s, a), eligibility in list(trace.items()):
            old = store.get(task, s, a)
            store.update(task, s, a, old + delta * eligibility, self.params.alpha)

        if not greedy:
            trace.clear()
            return

        decay = self.params.gamma * self.params.lam
        for cell in list(trace):
            trace[cell] *= decay
            if trace[cell] < ELIGIBILITY_CUTOFF:
                del trace[cell]

    def on_episode_end(self) -> None:
        self.traces.clear()


class TSDT(Learner):
    """Replay trace re-backing-up every stored transition from current values.

    An admitted request is backed up as soon as it arrives, so the executor
    judges each level's greediness after that level's own backup. A sweep
    then replays the entries of earlier steps, newest step first and, within
    a step, leaf first.

    Attributes:
        trace: Entries in insertion order, tagged with the step that produced them
        max_sweep_entries: Cap on the newest earlier-step entries replayed per sweep
    """

    variant = LearnerVariant.TSDT

    def __init__(
        self,
        params: LearningParams,
        hierarchy: Hierarchy,
        tie_epsilon: float = 0.0,
        max_sweep_entries: Optional[int] = None,
    ) -> None:
        super().__init__(params, hierarchy, tie_epsilon)
        self.max_sweep_entries = max_sweep_entries
        self.trace: List[TraceEntry] = []
        self.steps = 0
        self._applied_this_step = 0

    def __len__(self) -> int:
        return len(self.trace)

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        if exploring_below:
            return
        # gates are irrelevant once the entry is admitted
        self._admit(TraceEntry(_without_gate(req), self.steps), store)

    def _admit(self, entry: TraceEntry, store: QStore) -> None:
        self.trace.append(entry)
        if self._replay(entry, store):
            self._applied_this_step += 1

    def _is_blocked(self, entry: TraceEntry, store: QStore) -> bool:
        return False

    def _replay(self, entry: TraceEntry, store: QStore) -> bool:
        entry.blocked = self._is_blocked(entry, store)
        if entry.blocked:
            return False
        self._apply(entry.request, store, self._target(entry.request, store))
        return True

    def sweep(self, store: QStore) -> int:
        """Replay earlier steps and close the current one.

        Returns:
            Backups applied during this step, on arrival or on replay
        """
        earlier = [entry for entry in self.trace if entry.step < self.steps]
        if self.max_sweep_entries is not None:
            earlier = earlier[-self.max_sweep_entries:]
        applied = self._applied_this_step
        for entry in sorted(earlier, key=lambda e: -e.step):
            if self._replay(entry, store):
                applied += 1
        self.steps += 1
        self._applied_this_step = 0
        return applied

    def on_episode_end(self) -> None:
        self.trace.clear()
        self.steps = 0
        self._applied_this_step = 0


class GTSDT(TSDT):
    variant = LearnerVariant.GTSDT

    def on_request(self, req: BackupRequest, exploring_below: bool, store: QStore) -> None:
        self._admit(TraceEntry(req, self.steps), store)

    def _is_blocked(self, entry: TraceEntry, store: QStore) -> bool:
        for task_id, sigma, beta in entry.gate_decisions:
            task = self.hierarchy.task(task_id)
            if not store.is_greedy(task, sigma, beta, self.tie_epsilon):
                return True
        return False


def _without_gate(req: BackupRequest) -> BackupRequest:
    if not req.gate_decisions:
        return req
    return BackupRequest(
        task=req.task,
        s=req.s,
        a=req.a,
        kind=req.kind,
        r_prime=req.r_prime,
        s_prime=req.s_prime,
        exploring_below=req.exploring_below,
    )


LEARNERS = {
    LearnerVariant.NAIVE_Q0: NaiveQ0,
    LearnerVariant.FIXED_Q0: FixedQ0,
    LearnerVariant.FIXED_OSIO: FixedOSIO,
    LearnerVariant.WATKINS_FIXED: WatkinsFixed,
    LearnerVariant.TSDT: TSDT,
    LearnerVariant.GTSDT: GTSDT,
}


def make_learner(
    variant: LearnerVariant | str,
    params: LearningParams,
    hierarchy: Hierarchy,
    tie_epsilon: float = 0.0,
    max_sweep_entries: Optional[int] = None,
) -> Learner:
    """Build the learner for `variant`."""
    variant = LearnerVariant(variant)
    cls = LEARNERS[variant]
    if issubclass(cls, TSDT):
        return cls(params, hierarchy, tie_epsilon, max_sweep_entries=max_sweep_entries)
    return cls(params, hierarchy, tie_epsilon)

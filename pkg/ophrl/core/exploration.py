"""Action-selection policies and the commitment schedule."""

from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ophrl.core.errors import AdmissibilityError, ParameterError
from ophrl.core.hierarchy import TaskDef
from ophrl.core.qstore import QStore
from ophrl.core.types import ActionRef, StateId


class EpsilonGreedy(BaseModel):
    """With probability epsilon pick uniformly over all actions, else over the greedy set."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["epsilon_greedy"] = "epsilon_greedy"
    epsilon: float = Field(0.1, ge=0.0, le=1.0)


class Boltzmann(BaseModel):
    """Softmax over Q / temperature, cooled once per episode down to a floor."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["boltzmann"] = "boltzmann"
    temperature: float = Field(0.5, gt=0.0)
    cooling: float = Field(1.0, gt=0.0, le=1.0)
    floor: float = Field(1e-3, ge=0.0)


class ForcedGreedy(BaseModel):
    """Always greedy; ties broken uniformly or by the task's action order."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["forced_greedy"] = "forced_greedy"
    tie_break: Literal["uniform", "first"] = "uniform"


PolicySpec = Annotated[EpsilonGreedy | Boltzmann | ForcedGreedy, Field(discriminator="kind")]


def boltzmann_probabilities(values: np.ndarray, temperature: float) -> np.ndarray:
    """Max-shifted softmax of `values / temperature`."""
    shifted = (values - values.max()) / temperature
    weights = np.exp(shifted)
    return weights / weights.sum()


def select(
    policy: PolicySpec,
    store: QStore,
    task: TaskDef,
    s: StateId,
    rng: np.random.Generator,
    tie_epsilon: float = 0.0,
) -> ActionRef:
    """Choose one of the actions `task` offers at `s`.

    Args:
        policy: Selection rule
        store: Q values consulted by the rule
        task: Task making the choice
        s: Current state
        rng: Source of randomness
        tie_epsilon: Tolerance defining the greedy set

    Returns:
        The chosen action
    """
    actions = task.actions(s)
    if not actions:
        raise AdmissibilityError(f"task {task.id!r} offers no actions at state {s}")

    if isinstance(policy, Boltzmann):
        values = np.array([store.get(task, s, a) for a in actions], dtype=float)
        probs = boltzmann_probabilities(values, policy.temperature)
        return actions[int(rng.choice(len(actions), p=probs))]

    if isinstance(policy, EpsilonGreedy):
        if policy.epsilon > 0.0 and rng.random() < policy.epsilon:
            return actions[int(rng.integers(len(actions)))]
        greedy = store.greedy_set(task, s, tie_epsilon)
        return greedy[int(rng.integers(len(greedy)))]

    greedy = store.greedy_set(task, s, tie_epsilon)
    if policy.tie_break == "first" or len(greedy) == 1:
        return greedy[0]
    return greedy[int(rng.integers(len(greedy)))]


def tick_episode(policy: PolicySpec) -> PolicySpec:
    """Apply one episode of cooling; only Boltzmann policies change."""
    if isinstance(policy, Boltzmann):
        cooled = max(policy.floor, policy.cooling * policy.temperature)
        return policy.model_copy(update={"temperature": cooled})
    return policy


def temperature_of(policy: PolicySpec) -> float:
    """Current temperature, or 0.0 for policies that have none."""
    return policy.temperature if isinstance(policy, Boltzmann) else 0.0


class PolicyBundle(BaseModel):
    """The root policy and the policy shared by every subtask."""

    model_config = ConfigDict(frozen=True)

    root: PolicySpec = Field(default_factory=EpsilonGreedy)
    subtask: PolicySpec = Field(default_factory=EpsilonGreedy)

    def for_task(self, task: TaskDef) -> PolicySpec:
        return self.root if task.is_root else self.subtask

    def tick(self) -> "PolicyBundle":
        return PolicyBundle(root=tick_episode(self.root), subtask=tick_episode(self.subtask))

    def forced_greedy(self) -> "PolicyBundle":
        greedy = ForcedGreedy(tie_break="first")
        return PolicyBundle(root=greedy, subtask=greedy)


class CommitmentSchedule(BaseModel):
    """Linear, clamped interpolation of the commitment probability kappa."""

    model_config = ConfigDict(frozen=True)

    start: float = Field(0.0, ge=0.0, le=1.0)
    end: float = Field(0.0, ge=0.0, le=1.0)
    episodes: int = Field(1, gt=0)

    def kappa_at(self, episode: int) -> float:
        if episode < 0:
            raise ParameterError(f"episode must be >= 0, got {episode}")
        fraction = min(1.0, episode / self.episodes)
        if fraction >= 1.0:
            return self.end
        return self.start + (self.end - self.start) * fraction

    @classmethod
    def constant(cls, kappa: float) -> "CommitmentSchedule":
        return cls(start=kappa, end=kappa, episodes=1)

"""Three-armed bandit census: how often each learner ends up preferring each action."""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from loguru import logger

from ophrl.core.errors import ParameterError
from ophrl.core.executor import OPHRLExecutor
from ophrl.core.exploration import EpsilonGreedy, PolicyBundle
from ophrl.core.learners import LearnerVariant, make_learner
from ophrl.core.qstore import LearningParams, QStore, UpdateListener
from ophrl.core.types import ActionRef, Primitive, TaskAction
from ophrl.envs import BanditEnvironment, make_hierarchy
from ophrl.envs.bandit import START

CENSUS_EPSILON = 0.1
TAIL_EPISODES = 100

SUB = TaskAction("sub")
BEST_ARM = Primitive("C")


@dataclass
class PolicyCensus:
    """Final greedy choices over independent runs.

    Attributes:
        runs: Number of runs
        final_root_choice_counts: Greedy root action -> runs
        final_sub_choice_counts: Greedy subtask action -> runs; empty for the flat agent
        choices: Per-run (root choice, sub choice or None)
        tail_returns: Per-run mean online return over the last episodes
    """

    runs: int
    final_root_choice_counts: Dict[ActionRef, int] = field(default_factory=dict)
    final_sub_choice_counts: Dict[ActionRef, int] = field(default_factory=dict)
    choices: List[Tuple[ActionRef, Optional[ActionRef]]] = field(default_factory=list)
    tail_returns: List[float] = field(default_factory=list)

    def root_count(self, action: ActionRef) -> int:
        return self.final_root_choice_counts.get(action, 0)

    def sub_count(self, action: ActionRef) -> int:
        return self.final_sub_choice_counts.get(action, 0)

    def root_count_given_sub(self, root: ActionRef, sub: ActionRef) -> int:
        """Runs choosing `root` at the root among those whose subtask prefers `sub`."""
        return sum(1 for r, s in self.choices if r == root and s == sub)

    @property
    def correct_policies(self) -> int:
        """Runs preferring the subtask at the root and the best arm inside it."""
        return self.root_count_given_sub(SUB, BEST_ARM)

    @property
    def mean_tail_return(self) -> float:
        return float(np.mean(self.tail_returns)) if self.tail_returns else 0.0

    @property
    def tail_return_stderr(self) -> float:
        if len(self.tail_returns) < 2:
            return 0.0
        return float(np.std(self.tail_returns, ddof=1) / np.sqrt(len(self.tail_returns)))


def census(
    learner_variant: LearnerVariant | str,
    runs: int,
    episodes_per_run: int,
    rng: np.random.Generator,
    shape: str = "paper",
    listener: Optional[UpdateListener] = None,
) -> PolicyCensus:
    """Train `runs` fresh bandit agents with alpha = 1 and epsilon-greedy 0.1 at both levels.

    Args:
        learner_variant: Learner to train
        runs: Independent runs, at least 1
        episodes_per_run: Episodes per run
        rng: Shared source of randomness, consumed run after run
        shape: "paper" for Root -> {B, Sub}, "flat" for {A, B, C}
        listener: Optional QStore listener attached to every run's store

    Returns:
        The census of greedy choices after training
    """
    if runs < 1:
        raise ParameterError(f"runs must be >= 1, got {runs}")

    env = BanditEnvironment()
    hierarchy = make_hierarchy(env, shape)
    params = LearningParams(alpha=1.0, gamma=1.0)
    policy = EpsilonGreedy(epsilon=CENSUS_EPSILON)
    policies = PolicyBundle(root=policy, subtask=policy)

    choices: List[Tuple[ActionRef, Optional[ActionRef]]] = []
    tail_returns: List[float] = []
    for _ in range(runs):
        store = QStore()
        if listener is not None:
            store.listeners.append(listener)
        learner = make_learner(learner_variant, params, hierarchy)
        executor = OPHRLExecutor(hierarchy, env, store, learner, policies)
        returns = [
            executor.run_episode(episode, rng).episode_return for episode in range(episodes_per_run)
        ]
        tail_returns.append(float(np.mean(returns[-TAIL_EPISODES:])))

        root = store.greedy_set(hierarchy.root_task, START)[0]
        sub = store.greedy_set(hierarchy.task("sub"), START)[0] if "sub" in hierarchy.tasks else None
        choices.append((root, sub))

    root_choices = Counter(root for root, _ in choices)
    sub_choices = Counter(sub for _, sub in choices if sub is not None)
    logger.debug(f"Census of {learner_variant} ({shape}) over {runs} runs: {dict(root_choices)}")
    return PolicyCensus(runs, dict(root_choices), dict(sub_choices), choices, tail_returns)


def render_census_table(rows: Iterable[tuple[str, PolicyCensus]]) -> str:
    """Plain-text table of root and subtask preferences per agent."""
    header = (
        f"{'agent':<12}{'runs':>6}  {'root choices':<24}{'sub choices':<16}"
        f"{'correct':>8}{'tail return':>13}"
    )
    lines = [header, "-" * len(header)]
    for label, result in rows:
        root = " ".join(f"{a}={n}" for a, n in sorted(result.final_root_choice_counts.items(), key=str))
        sub = " ".join(f"{a}={n}" for a, n in sorted(result.final_sub_choice_counts.items(), key=str))
        correct = result.correct_policies if sub else result.root_count(BEST_ARM)
        lines.append(
            f"{label:<12}{result.runs:>6}  {root:<24}{sub or '-':<16}"
            f"{correct:>8}{result.mean_tail_return:>13.2f}"
        )
    return "\n".join(lines)

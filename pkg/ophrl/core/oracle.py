"""Ground truth for the benchmark domains: value iteration and greedy evaluation.

The oracle solves the primitive-action MDP; hierarchies are evaluated against
its optimum by running them greedily.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from loguru import logger

from ophrl.core.errors import NonConvergenceError, ParameterError
from ophrl.core.exploration import PolicyBundle
from ophrl.core.hierarchy import Hierarchy, TaskDef
from ophrl.core.qstore import QStore, format_real
from ophrl.core.types import Primitive, StateId, TerminalKind
from ophrl.envs import Environment, make_hierarchy
from ophrl.envs.base import Transition


@dataclass
class FlatMDP:
    """Materialised transition table of an environment.

    Attributes:
        states: Non-terminal states
        primitives: Primitive ids
        transitions: (state, primitive) -> outcome, total over states x primitives
        start_distribution: Start states with probabilities summing to 1
    """

    states: List[StateId]
    primitives: Tuple[str, ...]
    transitions: Dict[Tuple[StateId, str], Transition]
    start_distribution: Dict[StateId, float] = field(default_factory=dict)

    @classmethod
    def from_environment(cls, env: Environment) -> "FlatMDP":
        transitions = env.enumerate()
        states = sorted({s for s, _ in transitions})
        logger.debug(f"Enumerated {env.name}: {len(states)} non-terminal states")
        return cls(states, tuple(env.primitives), transitions, env.start_distribution())

    def states_reaching(self, kind: TerminalKind) -> Set[StateId]:
        """States from which some action sequence ends the episode with `kind`."""
        predecessors: Dict[StateId, Set[StateId]] = {}
        reached: Set[StateId] = set()
        for (s, _), outcome in self.transitions.items():
            if outcome.terminal is kind:
                reached.add(s)
            elif outcome.terminal is TerminalKind.NONE:
                predecessors.setdefault(outcome.s_prime, set()).add(s)
        frontier = list(reached)
        while frontier:
            s = frontier.pop()
            for p in predecessors.get(s, ()):
                if p not in reached:
                    reached.add(p)
                    frontier.append(p)
        return reached


@dataclass
class OracleResult:
    """Optimal action values of a FlatMDP.

    Attributes:
        q_star: (state, primitive) -> optimal expected return
        iterations: Bellman sweeps performed
        residual: Sup-norm change of the last sweep
    """

    q_star: Dict[Tuple[StateId, str], float]
    iterations: int
    residual: float
    primitives: Tuple[str, ...] = ()

    def value(self, s: StateId) -> float:
        """V*(s); 0 for states without actions."""
        values = [self.q_star[(s, a)] for a in self.primitives if (s, a) in self.q_star]
        return max(values) if values else 0.0

    def to_store(self, task: TaskDef) -> QStore:
        """A QStore holding Q* under `task`'s share key."""
        store = QStore()
        for (s, a), q in self.q_star.items():
            store.table[(task.share_key, s, Primitive(a))] = q
        return store

    def dump_lines(self) -> List[str]:
        return sorted(f"oracle,{s},{a},{format_real(q)}" for (s, a), q in self.q_star.items())

    def dump(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text("\n".join(self.dump_lines()) + "\n", encoding="utf-8")
        return path


def value_iteration(
    mdp: FlatMDP, gamma: float = 1.0, tolerance: float = 1e-9, max_iters: int = 100_000
) -> OracleResult:
    """Bellman optimality iteration from Q = 0.

    Terminal transitions contribute their reward only.

    Raises:
        NonConvergenceError: when max_iters sweeps leave a residual above tolerance
    """
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must be in [0, 1], got {gamma}")

    if not mdp.states:
        return OracleResult({}, iterations=1, residual=0.0, primitives=mdp.primitives)

    index = {s: i for i, s in enumerate(mdp.states)}
    shape = (len(mdp.states), len(mdp.primitives))
    rewards = np.zeros(shape)
    successors = np.zeros(shape, dtype=np.int64)
    bootstraps = np.zeros(shape, dtype=bool)
    for i, s in enumerate(mdp.states):
        for j, a in enumerate(mdp.primitives):
            outcome = mdp.transitions[(s, a)]
            rewards[i, j] = outcome.reward
            if outcome.terminal is TerminalKind.NONE and outcome.s_prime in index:
                successors[i, j] = index[outcome.s_prime]
                bootstraps[i, j] = True

    q = np.zeros(shape)
    residual = float("inf")
    for iteration in range(1, max_iters + 1):
        v = q.max(axis=1)
        updated = rewards + gamma * np.where(bootstraps, v[successors], 0.0)
        residual = float(np.abs(updated - q).max())
        q = updated
        if residual <= tolerance:
            logger.debug(f"Value iteration converged in {iteration} sweeps")
            q_star = {
                (s, a): float(q[i, j])
                for s, i in index.items()
                for j, a in enumerate(mdp.primitives)
            }
            return OracleResult(q_star, iteration, residual, mdp.primitives)

    raise NonConvergenceError(residual, max_iters)


@dataclass(frozen=True)
class GreedyEvaluation:
    mean_return: float
    success_rate: float


def evaluate_greedy(
    source: QStore | OracleResult,
    env: Environment,
    episodes: int,
    rng: np.random.Generator,
    hierarchy: Optional[Hierarchy] = None,
    step_limit: int = 10_000,
) -> GreedyEvaluation:
    """Run the greedy policy of `source` without learning or commitment.

    An OracleResult is evaluated through the flat agent; a QStore through
    `hierarchy`. Ties are broken by the task's action order.
    """
    from ophrl.core.executor import OPHRLExecutor

    if episodes < 1:
        raise ParameterError(f"episodes must be >= 1, got {episodes}")
    if isinstance(source, OracleResult):
        hierarchy = make_hierarchy(env, "flat")
        store = source.to_store(hierarchy.root_task)
    else:
        if hierarchy is None:
            raise ParameterError("evaluating a QStore requires its hierarchy")
        store = source

    executor = OPHRLExecutor(hierarchy, env, store, None, PolicyBundle().forced_greedy())
    returns, successes = [], 0
    for episode in range(episodes):
        record = executor.run_episode(episode, rng, step_limit=step_limit)
        returns.append(record.episode_return)
        successes += record.terminal_kind is TerminalKind.SUCCESS
    return GreedyEvaluation(float(np.mean(returns)), successes / episodes)

"""Three-armed bandit: one decision, then termination."""

from typing import Dict

from ophrl.core.errors import ConfigurationError
from ophrl.core.hierarchy import Hierarchy, TaskDef
from ophrl.core.types import Primitive, StateId, TaskAction, TerminalKind
from ophrl.envs.base import Environment, Transition

START = 0
DONE = 1

ARM_REWARDS = {"A": 1.0, "B": 10.0, "C": 100.0}


class BanditEnvironment(Environment):
    name = "bandit"
    primitives = ("A", "B", "C")

    def start_distribution(self) -> Dict[StateId, float]:
        return {START: 1.0}

    def is_terminal(self, s: StateId) -> bool:
        return s == DONE

    def transition(self, s: StateId, a: str) -> Transition:
        self.check_primitive(a)
        return Transition(ARM_REWARDS[a], DONE, TerminalKind.SUCCESS)


def bandit_step(a: str) -> tuple[float, TerminalKind]:
    """Reward and terminal kind of pulling arm `a` in a fresh episode."""
    outcome = BanditEnvironment().transition(START, a)
    return outcome.reward, outcome.terminal


def _at_start(s: StateId) -> bool:
    return s == START


def make_bandit_hierarchy(shape: str = "paper") -> Hierarchy:
    """Flat agent {A, B, C}, or the two-level agent Root -> {B, Sub}, Sub -> {A, C}."""
    if shape == "flat":
        arms = tuple(Primitive(a) for a in BanditEnvironment.primitives)
        root = TaskDef("root", admissible=_at_start, actions=lambda s: arms)
        return Hierarchy({"root": root}, root="root", name="bandit-flat")

    if shape == "paper":
        root_actions = (Primitive("B"), TaskAction("sub"))
        sub_actions = (Primitive("A"), Primitive("C"))
        tasks = {
            "root": TaskDef("root", admissible=_at_start, actions=lambda s: root_actions),
            "sub": TaskDef("sub", admissible=_at_start, actions=lambda s: sub_actions),
        }
        return Hierarchy(tasks, root="root", name="bandit-paper")

    raise ConfigurationError(f"unknown hierarchy shape {shape!r} for the bandit")

"""Deterministic corridor: `length` states, one `advance` primitive."""

from typing import Dict

from pydantic import BaseModel, ConfigDict, Field

from ophrl.core.hierarchy import Hierarchy, TaskDef
from ophrl.core.types import Primitive, StateId, TerminalKind
from ophrl.envs.base import Environment, Transition


class ChainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: int = Field(15, ge=1)
    terminal_reward: float = 10.0
    step_reward: float = -1.0


class ChainEnvironment(Environment):
    """States 0..length-1; advancing from the last one ends the episode with the terminal reward."""

    name = "chain"
    primitives = ("advance",)

    def __init__(self, config: ChainConfig | None = None) -> None:
        super().__init__()
        self.config = config or ChainConfig()
        self.end = self.config.length

    def start_distribution(self) -> Dict[StateId, float]:
        return {0: 1.0}

    def is_terminal(self, s: StateId) -> bool:
        return s == self.end

    def transition(self, s: StateId, a: str) -> Transition:
        self.check_primitive(a)
        if s + 1 == self.end:
            return Transition(self.config.terminal_reward, self.end, TerminalKind.SUCCESS)
        return Transition(self.config.step_reward, s + 1, TerminalKind.NONE)


def make_chain_hierarchy(env: ChainEnvironment) -> Hierarchy:
    advance = (Primitive("advance"),)
    root = TaskDef("root", admissible=lambda s: not env.is_terminal(s), actions=lambda s: advance)
    return Hierarchy({"root": root}, root="root", name="chain-flat")

"""Width x 2 cliff walk.

Cells are (x, y) with y = 0 the bottom row. The agent starts at (0, 0) and
must reach (width - 1, 0); stepping south off the bottom row anywhere else
falls off the cliff.
"""

from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ophrl.core.errors import ConfigurationError
from ophrl.core.hierarchy import Hierarchy, RewardContext, TaskDef
from ophrl.core.types import Primitive, StateId, TaskAction, TerminalKind
from ophrl.envs.base import Environment, Transition

STEP_REWARD = -1.0
SUCCESS_REWARD = 200.0
FAILURE_REWARD = -200.0

MOVES = {"N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0)}

Cell = Tuple[int, int]


class CliffConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: int = Field(100, ge=2)
    height: int = Field(2, ge=2, le=2)


def cliff_step(cfg: CliffConfig, s: Cell, a: str) -> Tuple[float, Optional[Cell], TerminalKind]:
    """Move from cell `s`; a fall returns None as the successor cell."""
    x, y = s
    dx, dy = MOVES[a]
    nx, ny = x + dx, y + dy

    if ny < 0:
        return FAILURE_REWARD, None, TerminalKind.FAILURE
    if not (0 <= nx < cfg.width and ny < cfg.height):
        return STEP_REWARD, (x, y), TerminalKind.NONE
    if (nx, ny) == (cfg.width - 1, 0):
        return SUCCESS_REWARD, (nx, ny), TerminalKind.SUCCESS
    return STEP_REWARD, (nx, ny), TerminalKind.NONE


class CliffEnvironment(Environment):
    """Cliff walk with state id x + width * y; the fall is one extra absorbing id.

    Attributes:
        config: Grid size
        goal: State id of the success cell
        fallen: State id reached by falling
    """

    name = "cliff"
    primitives = ("N", "S", "E", "W")

    def __init__(self, config: CliffConfig | None = None) -> None:
        super().__init__()
        self.config = config or CliffConfig()
        self.goal = self.encode((self.config.width - 1, 0))
        self.fallen = self.config.width * self.config.height

    @property
    def width(self) -> int:
        return self.config.width

    def encode(self, cell: Cell) -> StateId:
        x, y = cell
        return x + self.config.width * y

    def decode(self, s: StateId) -> Cell:
        return s % self.config.width, s // self.config.width

    def start_distribution(self) -> Dict[StateId, float]:
        return {self.encode((0, 0)): 1.0}

    def is_terminal(self, s: StateId) -> bool:
        return s == self.goal or s == self.fallen

    def transition(self, s: StateId, a: str) -> Transition:
        self.check_primitive(a)
        reward, cell, terminal = cliff_step(self.config, self.decode(s), a)
        s_prime = self.fallen if cell is None else self.encode(cell)
        return Transition(reward, s_prime, terminal)

    def describe(self, s: StateId) -> str:
        if s == self.fallen:
            return "fallen"
        return str(self.decode(s))


def make_cliff_hierarchy(env: CliffEnvironment, shape: str = "paper") -> Hierarchy:
    """Flat agent over the four moves, or Root -> {Goal, Cliff} with both over the moves."""
    moves = tuple(Primitive(a) for a in CliffEnvironment.primitives)

    def walking(s: StateId) -> bool:
        return not env.is_terminal(s)

    if shape == "flat":
        root = TaskDef("root", admissible=walking, actions=lambda s: moves)
        return Hierarchy({"root": root}, root="root", name="cliff-flat")

    if shape == "paper":
        subtasks = (TaskAction("goal"), TaskAction("cliff"))

        def jump_pseudo_reward(ctx: RewardContext) -> float:
            # reaching the goal is a failure for the task whose aim is to jump
            if ctx.env_terminal_kind is TerminalKind.SUCCESS:
                return FAILURE_REWARD
            return ctx.raw_reward

        tasks = {
            "root": TaskDef("root", admissible=walking, actions=lambda s: subtasks),
            "goal": TaskDef("goal", admissible=walking, actions=lambda s: moves),
            "cliff": TaskDef(
                "cliff",
                admissible=walking,
                actions=lambda s: moves,
                transform_reward=jump_pseudo_reward,
            ),
        }
        return Hierarchy(tasks, root="root", name="cliff-paper")

    raise ConfigurationError(f"unknown hierarchy shape {shape!r} for the cliff walk")

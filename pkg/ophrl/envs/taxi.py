"""Fuel taxicab on the 5x5 grid.

Coordinates are (x, y) with y = 4 the northern row. The four landmarks are
R (0, 4), G (4, 4), Y (0, 0) and B (3, 0); the fuel station sits at (2, 1).
"""

from typing import Dict, FrozenSet, List, NamedTuple, Tuple

import numpy as np

from ophrl.core.errors import ConfigurationError, ContractViolation
from ophrl.core.hierarchy import Hierarchy, RewardContext, TaskDef
from ophrl.core.types import ActionRef, Primitive, StateId, TaskAction, TerminalKind
from ophrl.envs.base import Environment, Transition

SIZE = 5
MAX_FUEL = 12
START_FUEL = range(5, MAX_FUEL + 1)

LANDMARKS: Tuple[Tuple[int, int], ...] = ((0, 4), (4, 4), (0, 0), (3, 0))
LANDMARK_NAMES = ("R", "G", "Y", "B")
FUEL_STATION = (2, 1)
IN_TAXI = len(LANDMARKS)

STEP_REWARD = -1.0
ILLEGAL_REWARD = -10.0
EMPTY_TANK_REWARD = STEP_REWARD - 20.0
DELIVERY_REWARD = STEP_REWARD + 20.0

MOVES = {"N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0)}


def _walls() -> FrozenSet[Tuple[Tuple[int, int], Tuple[int, int]]]:
    # Each internal wall separates two horizontally adjacent cells.
    segments = [((1, 3), (2, 3)), ((1, 4), (2, 4)),
                ((0, 0), (1, 0)), ((0, 1), (1, 1)),
                ((2, 0), (3, 0)), ((2, 1), (3, 1))]
    return frozenset(segments + [(b, a) for a, b in segments])


WALLS = _walls()

STATE_COUNT = SIZE * SIZE * (IN_TAXI + 1) * len(LANDMARKS) * (MAX_FUEL + 1)
SUCCESS_STATE = STATE_COUNT
FAILURE_STATE = STATE_COUNT + 1


class TaxiState(NamedTuple):
    x: int
    y: int
    passenger: int
    destination: int
    fuel: int

    @property
    def taxi(self) -> Tuple[int, int]:
        return self.x, self.y

    @property
    def in_taxi(self) -> bool:
        return self.passenger == IN_TAXI


def encode(state: TaxiState) -> StateId:
    x, y, passenger, destination, fuel = state
    return (((x * SIZE + y) * (IN_TAXI + 1) + passenger) * len(LANDMARKS) + destination) * (
        MAX_FUEL + 1
    ) + fuel


def decode(s: StateId) -> TaxiState:
    s, fuel = divmod(s, MAX_FUEL + 1)
    s, destination = divmod(s, len(LANDMARKS))
    s, passenger = divmod(s, IN_TAXI + 1)
    x, y = divmod(s, SIZE)
    return TaxiState(x, y, passenger, destination, fuel)


def blocked(cell: Tuple[int, int], a: str) -> bool:
    dx, dy = MOVES[a]
    target = (cell[0] + dx, cell[1] + dy)
    if not (0 <= target[0] < SIZE and 0 <= target[1] < SIZE):
        return True
    return (cell, target) in WALLS


def taxi_step(state: TaxiState, a: str) -> Tuple[float, TaxiState | None, TerminalKind]:
    """One primitive from a non-terminal state; terminal successors are None."""
    if a in MOVES:
        if blocked(state.taxi, a):
            return STEP_REWARD, state, TerminalKind.NONE
        if state.fuel == 0:
            return EMPTY_TANK_REWARD, None, TerminalKind.FAILURE
        dx, dy = MOVES[a]
        return STEP_REWARD, state._replace(x=state.x + dx, y=state.y + dy, fuel=state.fuel - 1), TerminalKind.NONE

    if a == "Pickup":
        if not state.in_taxi and state.taxi == LANDMARKS[state.passenger]:
            return STEP_REWARD, state._replace(passenger=IN_TAXI), TerminalKind.NONE
        return ILLEGAL_REWARD, state, TerminalKind.NONE

    if a == "Putdown":
        if state.in_taxi and state.taxi == LANDMARKS[state.destination]:
            return DELIVERY_REWARD, None, TerminalKind.SUCCESS
        return ILLEGAL_REWARD, state, TerminalKind.NONE

    if a == "Refuel":
        if state.taxi == FUEL_STATION:
            return STEP_REWARD, state._replace(fuel=MAX_FUEL), TerminalKind.NONE
        return ILLEGAL_REWARD, state, TerminalKind.NONE

    raise ContractViolation(f"taxi: unknown primitive {a!r}")


class TaxiEnvironment(Environment):
    """Taxicab with fuel; successful and failed episodes share two absorbing ids.

    The taxi starts on a uniformly drawn cell, passenger source and
    destination are drawn independently over the landmarks, and the tank
    holds between 5 and 12 units.
    """

    name = "taxi"
    primitives = ("N", "S", "E", "W", "Pickup", "Putdown", "Refuel")

    def start_distribution(self) -> Dict[StateId, float]:
        starts = [
            encode(TaxiState(x, y, passenger, destination, fuel))
            for x in range(SIZE)
            for y in range(SIZE)
            for passenger in range(len(LANDMARKS))
            for destination in range(len(LANDMARKS))
            for fuel in START_FUEL
        ]
        probability = 1.0 / len(starts)
        return {s: probability for s in starts}

    def reset(self, rng: np.random.Generator) -> StateId:
        x, y = (int(v) for v in rng.integers(SIZE, size=2))
        passenger, destination = (int(v) for v in rng.integers(len(LANDMARKS), size=2))
        fuel = int(rng.integers(START_FUEL.start, START_FUEL.stop))
        self.state = encode(TaxiState(x, y, passenger, destination, fuel))
        return self.state

    def is_terminal(self, s: StateId) -> bool:
        return s >= STATE_COUNT

    def transition(self, s: StateId, a: str) -> Transition:
        self.check_primitive(a)
        reward, successor, terminal = taxi_step(decode(s), a)
        if terminal is TerminalKind.SUCCESS:
            return Transition(reward, SUCCESS_STATE, terminal)
        if terminal is TerminalKind.FAILURE:
            return Transition(reward, FAILURE_STATE, terminal)
        return Transition(reward, encode(successor), terminal)

    def describe(self, s: StateId) -> str:
        if s == SUCCESS_STATE:
            return "delivered"
        if s == FAILURE_STATE:
            return "out-of-fuel"
        state = decode(s)
        where = "taxi" if state.in_taxi else LANDMARK_NAMES[state.passenger]
        return (
            f"taxi={state.taxi} passenger={where} "
            f"destination={LANDMARK_NAMES[state.destination]} fuel={state.fuel}"
        )


def _navigate_id(name: str) -> str:
    return f"navigate_{name}"


def _completing_step_to_zero(ctx: RewardContext) -> float:
    if ctx.subtask_completed and ctx.raw_reward == STEP_REWARD:
        return 0.0
    return ctx.raw_reward


def _navigate_rejects(ctx: RewardContext) -> bool:
    return ctx.raw_reward == ILLEGAL_REWARD or ctx.env_terminal_kind is TerminalKind.FAILURE


def _penalty_from_below(ctx: RewardContext) -> bool:
    return ctx.raw_reward == ILLEGAL_REWARD and isinstance(ctx.a, TaskAction)


def make_taxi_hierarchy(env: TaxiEnvironment, shape: str = "paper") -> Hierarchy:
    """Root -> {Get, Put, Refuel}; Get/Put/Refuel -> {Navigate(t), primitive}; Navigate -> moves.

    Navigate tasks share Q values by target cell.
    """
    primitives = tuple(Primitive(a) for a in TaxiEnvironment.primitives)

    def live(s: StateId) -> bool:
        return not env.is_terminal(s)

    if shape == "flat":
        root = TaskDef("root", admissible=live, actions=lambda s: primitives)
        return Hierarchy({"root": root}, root="root", name="taxi-flat")

    if shape != "paper":
        raise ConfigurationError(f"unknown hierarchy shape {shape!r} for the taxicab")

    moves = tuple(Primitive(a) for a in MOVES)
    tasks: Dict[str, TaskDef] = {}

    targets = dict(zip(LANDMARK_NAMES, LANDMARKS))
    targets["fuel"] = FUEL_STATION
    for name, cell in targets.items():
        def away_from(s: StateId, cell=cell) -> bool:
            return live(s) and decode(s).taxi != cell

        tasks[_navigate_id(name)] = TaskDef(
            _navigate_id(name),
            admissible=away_from,
            actions=lambda s: moves,
            share_key=("nav", cell),
            reject_reward=_navigate_rejects,
            transform_reward=_completing_step_to_zero,
        )

    def navigate_then(target_of, finish: Primitive):
        def actions(s: StateId) -> List[ActionRef]:
            state = decode(s)
            name = target_of(state)
            offered: List[ActionRef] = []
            if state.taxi != targets[name]:
                offered.append(TaskAction(_navigate_id(name)))
            offered.append(finish)
            return offered

        return actions

    def waiting(s: StateId) -> bool:
        return live(s) and not decode(s).in_taxi

    def riding(s: StateId) -> bool:
        return live(s) and decode(s).in_taxi

    def can_fill(s: StateId) -> bool:
        return live(s) and decode(s).fuel < MAX_FUEL

    subtask_hooks = dict(reject_reward=_penalty_from_below, transform_reward=_completing_step_to_zero)
    tasks["get"] = TaskDef(
        "get",
        admissible=waiting,
        actions=navigate_then(lambda st: LANDMARK_NAMES[st.passenger], Primitive("Pickup")),
        **subtask_hooks,
    )
    tasks["put"] = TaskDef(
        "put",
        admissible=riding,
        actions=navigate_then(lambda st: LANDMARK_NAMES[st.destination], Primitive("Putdown")),
        **subtask_hooks,
    )
    tasks["refuel"] = TaskDef(
        "refuel",
        admissible=can_fill,
        actions=navigate_then(lambda st: "fuel", Primitive("Refuel")),
        **subtask_hooks,
    )

    def root_actions(s: StateId) -> List[ActionRef]:
        state = decode(s)
        offered: List[ActionRef] = [TaskAction("put" if state.in_taxi else "get")]
        if state.fuel < MAX_FUEL:
            offered.append(TaskAction("refuel"))
        return offered

    tasks["root"] = TaskDef("root", admissible=live, actions=root_actions)
    return Hierarchy(tasks, root="root", name="taxi-paper")

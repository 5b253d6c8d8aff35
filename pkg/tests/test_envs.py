"""Tests for the benchmark domains and the agents built for them."""

import pytest

from ophrl.core.errors import ConfigurationError, ContractViolation
from ophrl.core.hierarchy import Accepted, Rejected, RewardContext, apply_reward_hooks
from ophrl.core.types import Primitive, TaskAction, TerminalKind
from ophrl.envs import (
    BanditEnvironment,
    ChainEnvironment,
    CliffEnvironment,
    TaxiEnvironment,
    make_environment,
    make_hierarchy,
)
from ophrl.envs.bandit import bandit_step
from ophrl.envs.cliff import CliffConfig, cliff_step
from ophrl.envs.taxi import (
    DELIVERY_REWARD,
    EMPTY_TANK_REWARD,
    ILLEGAL_REWARD,
    IN_TAXI,
    MAX_FUEL,
    STATE_COUNT,
    TaxiState,
    decode,
    encode,
    taxi_step,
)

R, G, Y, B = range(4)


@pytest.fixture(scope="module")
def taxi() -> TaxiEnvironment:
    return TaxiEnvironment()


def test_bandit_arms_pay_fixed_rewards() -> None:
    assert [bandit_step(a) for a in "ABC"] == [
        (1.0, TerminalKind.SUCCESS),
        (10.0, TerminalKind.SUCCESS),
        (100.0, TerminalKind.SUCCESS),
    ]


def test_cliff_rewards() -> None:
    cfg = CliffConfig(width=10)
    assert cliff_step(cfg, (3, 0), "S") == (-200.0, None, TerminalKind.FAILURE)
    assert cliff_step(cfg, (3, 1), "S") == (-1.0, (3, 0), TerminalKind.NONE)
    assert cliff_step(cfg, (8, 0), "E") == (200.0, (9, 0), TerminalKind.SUCCESS)
    assert cliff_step(cfg, (0, 0), "W") == (-1.0, (0, 0), TerminalKind.NONE)
    assert cliff_step(cfg, (4, 1), "N") == (-1.0, (4, 1), TerminalKind.NONE)


def test_reward_sets_of_every_domain(cliff10, chain) -> None:
    def rewards(env):
        return {t.reward for t in env.enumerate().values()}

    assert rewards(BanditEnvironment()) == {1.0, 10.0, 100.0}
    assert rewards(cliff10) == {-1.0, 200.0, -200.0}
    assert rewards(chain) == {-1.0, 10.0}


def test_wide_cliff_has_every_cell_but_the_goal_as_a_live_state() -> None:
    env = CliffEnvironment(CliffConfig(width=100))
    live = {s for s, _ in env.enumerate()}
    assert len(live) == 199
    assert env.goal not in live and env.fallen not in live


def test_enumerate_agrees_with_stepping(taxi, rng) -> None:
    table = taxi.enumerate()
    keys = list(table)
    for index in rng.choice(len(keys), size=500, replace=False):
        s, a = keys[int(index)]
        taxi.state = s
        assert taxi.step(a, rng) == table[(s, a)]


def test_taxi_state_space_is_bounded(taxi) -> None:
    live = {s for s, _ in taxi.enumerate()}
    assert 5000 < len(live) <= STATE_COUNT


def test_taxi_starts(taxi, rng) -> None:
    for _ in range(200):
        state = decode(taxi.reset(rng))
        assert 5 <= state.fuel <= MAX_FUEL
        assert not state.in_taxi
        assert 0 <= state.x < 5 and 0 <= state.y < 5


def test_taxi_walls_block_moves_without_burning_fuel() -> None:
    state = TaxiState(1, 3, R, G, 6)
    assert taxi_step(state, "E") == (-1.0, state, TerminalKind.NONE)
    assert taxi_step(TaxiState(0, 0, R, G, 6), "E")[1] == TaxiState(0, 0, R, G, 6)
    assert taxi_step(TaxiState(2, 3, R, G, 6), "E")[1] == TaxiState(3, 3, R, G, 5)
    assert taxi_step(TaxiState(0, 4, R, G, 6), "N")[1] == TaxiState(0, 4, R, G, 6)


def test_taxi_pickup_and_putdown() -> None:
    at_r = TaxiState(0, 4, R, G, 6)
    assert taxi_step(at_r, "Pickup") == (-1.0, at_r._replace(passenger=IN_TAXI), TerminalKind.NONE)
    assert taxi_step(TaxiState(0, 3, R, G, 6), "Pickup") == (
        ILLEGAL_REWARD, TaxiState(0, 3, R, G, 6), TerminalKind.NONE
    )
    riding_at_g = TaxiState(4, 4, IN_TAXI, G, 6)
    assert taxi_step(riding_at_g, "Putdown") == (DELIVERY_REWARD, None, TerminalKind.SUCCESS)
    assert taxi_step(riding_at_g._replace(destination=Y), "Putdown")[0] == ILLEGAL_REWARD


def test_taxi_fuel() -> None:
    at_station = TaxiState(2, 1, R, G, 3)
    assert taxi_step(at_station, "Refuel")[1].fuel == MAX_FUEL
    assert taxi_step(TaxiState(2, 2, R, G, 3), "Refuel")[0] == ILLEGAL_REWARD
    assert taxi_step(TaxiState(2, 2, R, G, 0), "N") == (EMPTY_TANK_REWARD, None, TerminalKind.FAILURE)
    # blocked moves burn no fuel
    assert taxi_step(TaxiState(2, 4, R, G, 0), "N")[2] is TerminalKind.NONE


@pytest.mark.parametrize("domain", ["bandit", "cliff", "taxi"])
@pytest.mark.parametrize("shape", ["flat", "paper"])
def test_every_agent_validates(domain, shape) -> None:
    params = {"width": 10} if domain == "cliff" else {}
    hierarchy = make_hierarchy(make_environment(domain, **params), shape)
    assert hierarchy.is_flat() == (shape == "flat")


def test_unknown_domains_and_shapes_are_configuration_errors(chain) -> None:
    with pytest.raises(ConfigurationError, match="unknown domain"):
        make_environment("maze")
    with pytest.raises(ConfigurationError):
        make_hierarchy(chain, "paper")
    with pytest.raises(ConfigurationError):
        make_hierarchy(BanditEnvironment(), "deep")


def test_stepping_contract(rng) -> None:
    env = ChainEnvironment()
    with pytest.raises(ContractViolation, match="before reset"):
        env.step("advance")
    env.reset(rng)
    with pytest.raises(ContractViolation, match="unknown primitive"):
        env.step("jump")
    env.state = env.end
    with pytest.raises(ContractViolation, match="terminal"):
        env.step("advance")


def _ctx(task, a, raw_reward, terminal=TerminalKind.NONE, completed=False) -> RewardContext:
    return RewardContext(
        task=task, s=0, a=a, raw_reward=raw_reward, s_prime=1,
        env_terminal_kind=terminal, subtask_completed=completed,
    )


def test_cliff_jump_task_sees_the_goal_as_failure(cliff10) -> None:
    hierarchy = make_hierarchy(cliff10, "paper")
    east = Primitive("E")
    reached = _ctx("cliff", east, 200.0, TerminalKind.SUCCESS, completed=True)
    assert apply_reward_hooks(hierarchy.task("cliff"), reached) == Accepted(-200.0)
    assert apply_reward_hooks(hierarchy.task("goal"), reached) == Accepted(200.0)


def test_taxi_hooks(taxi) -> None:
    hierarchy = make_hierarchy(taxi, "paper")
    navigate = hierarchy.task("navigate_R")
    north = Primitive("N")
    assert apply_reward_hooks(navigate, _ctx(navigate.id, north, -1.0, completed=True)) == Accepted(0.0)
    assert apply_reward_hooks(navigate, _ctx(navigate.id, north, -1.0)) == Accepted(-1.0)
    dry = _ctx(navigate.id, north, EMPTY_TANK_REWARD, TerminalKind.FAILURE)
    assert apply_reward_hooks(navigate, dry) == Rejected()

    get = hierarchy.task("get")
    from_below = _ctx("get", TaskAction("navigate_R"), ILLEGAL_REWARD)
    assert apply_reward_hooks(get, from_below) == Rejected()
    own = _ctx("get", Primitive("Pickup"), ILLEGAL_REWARD)
    assert apply_reward_hooks(get, own) == Accepted(ILLEGAL_REWARD)


def test_navigate_tasks_share_values_by_target(taxi) -> None:
    hierarchy = make_hierarchy(taxi, "paper")
    assert hierarchy.task("navigate_R").share_key == ("nav", (0, 4))
    assert hierarchy.task("navigate_fuel").share_key == ("nav", (2, 1))


def test_taxi_root_offers_refuel_only_below_a_full_tank(taxi) -> None:
    root = make_hierarchy(taxi, "paper").root_task
    assert root.actions(encode(TaxiState(1, 1, R, G, 5))) == [TaskAction("get"), TaskAction("refuel")]
    assert root.actions(encode(TaxiState(1, 1, IN_TAXI, G, MAX_FUEL))) == [TaskAction("put")]

"""Built-in experiment configurations."""

from typing import Dict

from ophrl.core.config import ExperimentConfig, LearnerConfig
from ophrl.core.errors import ConfigurationError
from ophrl.core.executor import UpdatingMode
from ophrl.core.exploration import Boltzmann, CommitmentSchedule, EpsilonGreedy, ForcedGreedy, PolicyBundle
from ophrl.core.learners import LearnerVariant
from ophrl.envs.cliff import CliffConfig

TAXI_EPISODES = 100_000
TAXI_DESK_EPISODES = 20_000
TAXI_ROOT_TEMPERATURE = 50.0
TAXI_COOLING = 0.999947
TAXI_REDUCED_COOLING = 0.999924


def desk_cooling(cooling: float, episodes: int = TAXI_EPISODES, desk_episodes: int = TAXI_DESK_EPISODES) -> float:
    """Per-episode rate reaching the same final temperature in fewer episodes."""
    return cooling ** (episodes / desk_episodes)


BANDIT_FIG3 = ExperimentConfig(
    name="bandit_fig3",
    domain="bandit",
    agent_shape="paper",
    learner=LearnerConfig(variant=LearnerVariant.FIXED_Q0, alpha=1.0),
    policy=PolicyBundle(root=EpsilonGreedy(epsilon=0.1), subtask=EpsilonGreedy(epsilon=0.1)),
    episodes=1000,
    seeds=list(range(10)),
    smoothing_window=10,
)

CLIFF_FIG6 = ExperimentConfig(
    name="cliff_fig6",
    domain="cliff",
    cliff=CliffConfig(width=100),
    agent_shape="paper",
    learner=LearnerConfig(variant=LearnerVariant.GTSDT, alpha=0.1, gamma=1.0),
    policy=PolicyBundle(root=EpsilonGreedy(epsilon=0.1), subtask=Boltzmann(temperature=0.5)),
    updating_mode=UpdatingMode.ALL_GOALS,
    episodes=20_000,
    seeds=list(range(10)),
    eval_episodes=1,
)

CLIFF_DESK = CLIFF_FIG6.model_copy(update={"name": "cliff_desk", "cliff": CliffConfig(width=20)})

TAXI_FIG9 = ExperimentConfig(
    name="taxi_fig9",
    domain="taxi",
    agent_shape="paper",
    learner=LearnerConfig(variant=LearnerVariant.GTSDT, alpha=0.1, gamma=1.0),
    policy=PolicyBundle(
        root=Boltzmann(temperature=TAXI_ROOT_TEMPERATURE, cooling=TAXI_COOLING),
        subtask=ForcedGreedy(),
    ),
    updating_mode=UpdatingMode.ACTIVE_PATH,
    commitment=CommitmentSchedule.constant(1.0),
    episodes=TAXI_EPISODES,
    seeds=list(range(20)),
)

TAXI_FIG9_REDUCED = TAXI_FIG9.model_copy(
    update={
        "name": "taxi_fig9_reduced",
        "policy": PolicyBundle(
            root=Boltzmann(temperature=TAXI_ROOT_TEMPERATURE, cooling=TAXI_REDUCED_COOLING),
            subtask=ForcedGreedy(),
        ),
        "commitment": CommitmentSchedule(start=1.0, end=0.0, episodes=TAXI_EPISODES),
    }
)

TAXI_FIG9_DESK = TAXI_FIG9.model_copy(
    update={
        "name": "taxi_fig9_desk",
        "episodes": TAXI_DESK_EPISODES,
        "policy": PolicyBundle(
            root=Boltzmann(temperature=TAXI_ROOT_TEMPERATURE, cooling=desk_cooling(TAXI_COOLING)),
            subtask=ForcedGreedy(),
        ),
    }
)

TAXI_FIG9_DESK_REDUCED = TAXI_FIG9.model_copy(
    update={
        "name": "taxi_fig9_desk_reduced",
        "episodes": TAXI_DESK_EPISODES,
        "policy": PolicyBundle(
            root=Boltzmann(temperature=TAXI_ROOT_TEMPERATURE, cooling=desk_cooling(TAXI_REDUCED_COOLING)),
            subtask=ForcedGreedy(),
        ),
        "commitment": CommitmentSchedule(start=1.0, end=0.0, episodes=TAXI_DESK_EPISODES),
    }
)

PRESETS: Dict[str, ExperimentConfig] = {
    cfg.name: cfg
    for cfg in (
        BANDIT_FIG3,
        CLIFF_FIG6,
        CLIFF_DESK,
        TAXI_FIG9,
        TAXI_FIG9_REDUCED,
        TAXI_FIG9_DESK,
        TAXI_FIG9_DESK_REDUCED,
    )
}


def preset(name: str) -> ExperimentConfig:
    """Look up a built-in configuration by name."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; expected one of {', '.join(sorted(PRESETS))}"
        ) from None

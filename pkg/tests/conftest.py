import numpy as np
import pytest

from ophrl.core.exploration import ForcedGreedy, PolicyBundle
from ophrl.core.hierarchy import Hierarchy, TaskDef
from ophrl.core.qstore import QStore
from ophrl.core.types import Primitive, TaskAction
from ophrl.envs import BanditEnvironment, ChainEnvironment, CliffEnvironment, make_hierarchy
from ophrl.envs.cliff import CliffConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture
def store() -> QStore:
    return QStore()


@pytest.fixture
def bandit() -> BanditEnvironment:
    return BanditEnvironment()


@pytest.fixture
def bandit_paper(bandit) -> Hierarchy:
    return make_hierarchy(bandit, "paper")


@pytest.fixture
def bandit_flat(bandit) -> Hierarchy:
    return make_hierarchy(bandit, "flat")


@pytest.fixture
def cliff10() -> CliffEnvironment:
    return CliffEnvironment(CliffConfig(width=10))


@pytest.fixture
def chain() -> ChainEnvironment:
    return ChainEnvironment()


@pytest.fixture
def greedy_first() -> PolicyBundle:
    policy = ForcedGreedy(tie_break="first")
    return PolicyBundle(root=policy, subtask=policy)


@pytest.fixture
def two_level() -> Hierarchy:
    """States 0..3; `walk` is admissible below 2, the root everywhere below 3."""
    moves = (Primitive("step"), Primitive("stay"))
    tasks = {
        "root": TaskDef(
            "root",
            admissible=lambda s: s < 3,
            actions=lambda s: (TaskAction("walk"), Primitive("stay")) if s < 2 else (Primitive("stay"),),
        ),
        "walk": TaskDef("walk", admissible=lambda s: s < 2, actions=lambda s: moves),
    }
    return Hierarchy(tasks, root="root", name="two-level")

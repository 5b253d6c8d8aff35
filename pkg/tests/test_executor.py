"""Tests for the polling executor: candidates, gating, commitment and updating modes."""

import numpy as np
import pytest

from ophrl.core.errors import EpisodeStructureError
from ophrl.core.executor import OPHRLExecutor, UpdatingMode, dispatch_updating_mode
from ophrl.core.exploration import (
    Boltzmann,
    CommitmentSchedule,
    EpsilonGreedy,
    ForcedGreedy,
    PolicyBundle,
)
from ophrl.core.learners import BackupKind, Learner, LearnerVariant, NaiveQ0, make_learner
from ophrl.core.qstore import LearningParams, QStore
from ophrl.core.types import Primitive, TaskAction, TerminalKind
from ophrl.envs import TaxiEnvironment, make_hierarchy
from ophrl.envs.bandit import START

A, B, C, N = Primitive("A"), Primitive("B"), Primitive("C"), Primitive("N")
SUB, GOAL, CLIFF = TaskAction("sub"), TaskAction("goal"), TaskAction("cliff")


class Recorder(Learner):
    """Collects every request without touching the store."""

    variant = LearnerVariant.FIXED_Q0

    def __init__(self, hierarchy) -> None:
        super().__init__(LearningParams(), hierarchy)
        self.seen = []

    def on_request(self, req, exploring_below, store) -> None:
        self.seen.append(req)


@pytest.fixture
def sub_prefers_c(bandit_paper) -> QStore:
    store = QStore()
    store.update(bandit_paper.root_task, START, SUB, 50.0, 1.0)
    store.update(bandit_paper.task("sub"), START, C, 100.0, 1.0)
    return store


def test_greedy_step_through_the_subtask_yields_two_terminal_candidates(
    bandit, bandit_paper, sub_prefers_c, greedy_first, rng
) -> None:
    executor = OPHRLExecutor(bandit_paper, bandit, sub_prefers_c, None, greedy_first)
    bandit.reset(rng)
    outcome = executor.step(rng)

    assert outcome.primitive == C
    assert outcome.raw_reward == 100.0
    assert outcome.terminal is TerminalKind.SUCCESS
    assert not outcome.exploring_in_subtask
    assert [(r.task, r.a, r.kind, r.r_prime) for r in outcome.candidates] == [
        ("sub", C, BackupKind.TERMINAL, 100.0),
        ("root", SUB, BackupKind.TERMINAL, 100.0),
    ]
    assert outcome.backup_requests == outcome.candidates


def test_exploring_subtask_gates_the_root_backup(bandit, bandit_paper, sub_prefers_c, rng) -> None:
    policies = PolicyBundle(root=ForcedGreedy(tie_break="first"), subtask=EpsilonGreedy(epsilon=1.0))
    executor = OPHRLExecutor(bandit_paper, bandit, sub_prefers_c, None, policies)
    for _ in range(200):
        bandit.reset(rng)
        outcome = executor.step(rng)
        if outcome.primitive == A:
            break
    else:
        pytest.fail("the subtask never explored A")

    assert outcome.exploring_in_subtask
    assert [r.task for r in outcome.backup_requests] == ["sub"]
    root_candidate = outcome.candidates[-1]
    assert root_candidate.task == "root"
    assert root_candidate.exploring_below
    assert root_candidate.gate_decisions == (("sub", START, A),)


def test_exploration_flag_matches_non_greedy_subtask_choices(bandit, bandit_paper, sub_prefers_c, rng) -> None:
    policy = EpsilonGreedy(epsilon=0.5)
    executor = OPHRLExecutor(bandit_paper, bandit, sub_prefers_c, None, PolicyBundle(root=policy, subtask=policy))
    seen = set()
    for _ in range(500):
        bandit.reset(rng)
        outcome = executor.step(rng)
        explored_below = len(outcome.decision_path) == 2 and outcome.primitive == A
        assert outcome.exploring_in_subtask == explored_below
        seen.add(outcome.primitive)
    assert seen == {A, B, C}


def test_every_bandit_episode_is_one_step(bandit, bandit_paper, rng) -> None:
    learner = make_learner(LearnerVariant.FIXED_Q0, LearningParams(alpha=1.0), bandit_paper)
    executor = OPHRLExecutor(bandit_paper, bandit, QStore(), learner, PolicyBundle())
    for episode in range(50):
        record = executor.run_episode(episode, rng)
        assert record.steps == 1
        assert record.episode_return in (1.0, 10.0, 100.0)
        assert record.terminal_kind is TerminalKind.SUCCESS


def test_episode_is_truncated_at_the_step_limit(cliff10, greedy_first, rng) -> None:
    hierarchy = make_hierarchy(cliff10, "flat")
    executor = OPHRLExecutor(hierarchy, cliff10, QStore(), None, greedy_first)
    record = executor.run_episode(0, rng, step_limit=5)
    assert record.steps == 5
    assert record.episode_return == -5.0
    assert record.terminal_kind is TerminalKind.NONE


def test_root_must_be_admissible(cliff10, greedy_first, rng) -> None:
    executor = OPHRLExecutor(make_hierarchy(cliff10, "paper"), cliff10, QStore(), None, greedy_first)
    cliff10.reset(rng)
    cliff10.state = cliff10.fallen
    with pytest.raises(EpisodeStructureError):
        executor.step(rng)


def _train(cliff_env, seed: int):
    hierarchy = make_hierarchy(cliff_env, "paper")
    store = QStore()
    learner = make_learner(LearnerVariant.GTSDT, LearningParams(alpha=0.1), hierarchy)
    executor = OPHRLExecutor(hierarchy, cliff_env, store, learner, PolicyBundle(), UpdatingMode.ALL_GOALS)
    rng = np.random.default_rng(seed)
    records = [executor.run_episode(e, rng, step_limit=200) for e in range(20)]
    return records, dict(store.items())


def test_runs_are_deterministic_given_the_seed(cliff10) -> None:
    assert _train(cliff10, 7) == _train(cliff10, 7)


class TestCommitment:
    @pytest.fixture
    def executor(self, cliff10, greedy_first) -> OPHRLExecutor:
        hierarchy = make_hierarchy(cliff10, "paper")
        store = QStore()
        store.update(hierarchy.root_task, 0, CLIFF, 5.0, 1.0)
        return OPHRLExecutor(hierarchy, cliff10, store, None, greedy_first)

    def _second_root_choice(self, executor, kappa, rng):
        executor.env.reset(rng)
        executor.commitment.kappa = kappa
        first = executor.step(rng)
        assert first.decision_path[0].action == CLIFF
        assert first.primitive == N
        # goal becomes greedy at the successor
        executor.store.update(executor.hierarchy.root_task, first.s_prime, GOAL, 5.0, 1.0)
        return executor.step(rng).decision_path[0].action

    def test_full_commitment_continues_the_remembered_subtask(self, executor, rng) -> None:
        assert self._second_root_choice(executor, 1.0, rng) == CLIFF

    def test_polling_reselects_every_step(self, executor, rng) -> None:
        assert self._second_root_choice(executor, 0.0, rng) == GOAL


def test_episode_record_carries_kappa_and_temperature(cliff10, rng) -> None:
    hierarchy = make_hierarchy(cliff10, "paper")
    policies = PolicyBundle(root=Boltzmann(temperature=2.0, cooling=0.5), subtask=EpsilonGreedy())
    executor = OPHRLExecutor(hierarchy, cliff10, QStore(), None, policies)
    schedule = CommitmentSchedule(start=1.0, end=0.0, episodes=100)
    first = executor.run_episode(25, rng, schedule, step_limit=3)
    second = executor.run_episode(26, rng, schedule, step_limit=3)
    assert first.kappa == 0.75
    assert (first.temperature, second.temperature) == (2.0, 1.0)


class TestUpdatingModes:
    def _requests(self, env, shape, mode, rng, greedy_first):
        hierarchy = make_hierarchy(env, shape)
        recorder = Recorder(hierarchy)
        executor = OPHRLExecutor(hierarchy, env, QStore(), recorder, greedy_first, mode)
        env.reset(rng)
        executor.step(rng)
        return recorder.seen

    def test_all_goals_adds_the_non_executing_subtask(self, cliff10, greedy_first, rng) -> None:
        active = self._requests(cliff10, "paper", UpdatingMode.ACTIVE_PATH, rng, greedy_first)
        everyone = self._requests(cliff10, "paper", UpdatingMode.ALL_GOALS, rng, greedy_first)
        assert [(r.task, r.kind) for r in active] == [
            ("goal", BackupKind.COMPLETION),
            ("root", BackupKind.CONTINUATION),
        ]
        assert everyone[:2] == active
        assert [(r.task, r.a, r.kind) for r in everyone[2:]] == [("cliff", N, BackupKind.COMPLETION)]

    def test_modes_coincide_for_a_flat_agent(self, cliff10) -> None:
        def episode(mode):
            hierarchy = make_hierarchy(cliff10, "flat")
            recorder = Recorder(hierarchy)
            policies = PolicyBundle(root=EpsilonGreedy(epsilon=0.3), subtask=EpsilonGreedy(epsilon=0.3))
            executor = OPHRLExecutor(hierarchy, cliff10, QStore(), recorder, policies, mode)
            executor.run_episode(0, np.random.default_rng(3), step_limit=50)
            return recorder.seen

        assert episode(UpdatingMode.ALL_GOALS) == episode(UpdatingMode.ACTIVE_PATH)

    def test_taxi_off_path_requests_extend_the_active_path(self, rng) -> None:
        env = TaxiEnvironment()
        hierarchy = make_hierarchy(env, "paper")
        policy = EpsilonGreedy(epsilon=0.3)
        executor = OPHRLExecutor(hierarchy, env, QStore(), None, PolicyBundle(root=policy, subtask=policy))
        env.reset(rng)
        extended = 0
        for _ in range(300):
            outcome = executor.step(rng)
            active = dispatch_updating_mode(UpdatingMode.ACTIVE_PATH, hierarchy, outcome)
            everyone = dispatch_updating_mode(UpdatingMode.ALL_GOALS, hierarchy, outcome)
            assert everyone[: len(active)] == active
            on_path = {d.task_id for d in outcome.decision_path}
            for req in everyone[len(active):]:
                assert req.task not in on_path
                assert req.a == outcome.primitive
                assert not req.gate_decisions
            extended += len(everyone) > len(active)
            if outcome.terminal is not TerminalKind.NONE:
                env.reset(rng)
        assert extended > 0


@pytest.mark.parametrize(
    "variant", [LearnerVariant.FIXED_Q0, LearnerVariant.TSDT, LearnerVariant.GTSDT]
)
def test_discovering_the_best_arm_reaches_the_root_backup(bandit, bandit_paper, variant, rng) -> None:
    store = QStore()
    store.update(bandit_paper.task("sub"), START, A, 1.0, 1.0)
    store.update(bandit_paper.root_task, START, SUB, 5.0, 1.0)
    learner = make_learner(variant, LearningParams(alpha=1.0), bandit_paper)
    policies = PolicyBundle(root=ForcedGreedy(tie_break="first"), subtask=EpsilonGreedy(epsilon=1.0))
    executor = OPHRLExecutor(bandit_paper, bandit, store, learner, policies)
    for _ in range(200):
        bandit.reset(rng)
        outcome = executor.step(rng)
        learner.on_episode_end()
        if outcome.primitive == C:
            break
    else:
        pytest.fail("the subtask never pulled C")

    assert not outcome.exploring_in_subtask
    assert outcome.decision_path[1].was_greedy
    assert store.get(bandit_paper.task("sub"), START, C) == 100.0
    assert store.get(bandit_paper.root_task, START, SUB) == 100.0


def _cliff_steps(executor, env, rng, episodes: int, step_limit: int = 200):
    for _ in range(episodes):
        env.reset(rng)
        for _ in range(step_limit):
            outcome = executor.step(rng)
            yield outcome
            if outcome.terminal is not TerminalKind.NONE:
                break
        if executor.learner is not None:
            executor.learner.on_episode_end()


def test_naive_and_fixed_agree_without_exploration(bandit, bandit_paper, greedy_first) -> None:
    dumps = []
    for variant in (LearnerVariant.NAIVE_Q0, LearnerVariant.FIXED_Q0):
        store = QStore()
        store.update(bandit_paper.root_task, START, SUB, 5.0, 1.0)
        learner = make_learner(variant, LearningParams(alpha=0.5), bandit_paper)
        executor = OPHRLExecutor(bandit_paper, bandit, store, learner, greedy_first)
        rng = np.random.default_rng(3)
        for episode in range(50):
            executor.run_episode(episode, rng)
        dumps.append(store.dump_lines())
    assert dumps[0] == dumps[1]


def test_the_gate_is_the_only_difference_between_naive_and_fixed(cliff10, greedy_first, rng) -> None:
    hierarchy = make_hierarchy(cliff10, "paper")
    params = LearningParams(alpha=0.5)
    store, shadow_store = QStore(), QStore()
    executor = OPHRLExecutor(hierarchy, cliff10, store, make_learner(LearnerVariant.FIXED_Q0, params, hierarchy), greedy_first)
    shadow = NaiveQ0(params, hierarchy)

    flagged = 0
    for outcome in _cliff_steps(executor, cliff10, rng, episodes=5):
        for req in outcome.backup_requests:
            shadow.on_request(req, False, shadow_store)
        flagged += len(outcome.candidates) - len(outcome.backup_requests)
        assert shadow_store.dump_lines() == store.dump_lines()
    assert flagged > 0


def test_osio_never_updates_on_flagged_requests(cliff10, rng) -> None:
    hierarchy = make_hierarchy(cliff10, "paper")
    store = QStore()
    updates = []
    store.listeners.append(lambda key, s, a, *_: updates.append((key, s, a)))
    learner = make_learner(LearnerVariant.FIXED_OSIO, LearningParams(alpha=0.5), hierarchy)
    policy = EpsilonGreedy(epsilon=0.3)
    executor = OPHRLExecutor(hierarchy, cliff10, store, learner, PolicyBundle(root=policy, subtask=policy))

    flagged = 0
    for outcome in _cliff_steps(executor, cliff10, rng, episodes=20):
        expected = [(hierarchy.task(r.task).share_key, r.s, r.a) for r in outcome.backup_requests]
        assert updates == expected
        updates.clear()
        flagged += sum(r.exploring_below for r in outcome.candidates)
    assert flagged > 0

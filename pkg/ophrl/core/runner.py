"""Multi-seed experiment runs, their aggregation and output files."""

import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from ophrl import settings
from ophrl.core.config import ExperimentConfig
from ophrl.core.errors import ExperimentError
from ophrl.core.executor import OPHRLExecutor
from ophrl.core.learners import make_learner
from ophrl.core.oracle import evaluate_greedy
from ophrl.core.qstore import QStore
from ophrl.core.records import concatenate_csv, write_csv
from ophrl.core.svg_writer import SVGWriter
from ophrl.envs import Environment, make_environment, make_hierarchy


class SeedResult(BaseModel):
    """Outcome of one run.

    Attributes:
        seed: Run seed
        final_mean_return: Mean return of the greedy policy after training
        final_success_rate: Fraction of greedy episodes ending in success
        auc: Area under the learning curve (sum of episode returns)
        returns: Online return of every episode
    """

    seed: int
    final_mean_return: float
    final_success_rate: float
    auc: float
    returns: List[float] = Field(default_factory=list, exclude=True)


class ExperimentSummary(BaseModel):
    name: str
    episodes: int
    smoothing_window: int
    runs: List[SeedResult]
    mean_curve: List[float]
    smoothed_curve: List[float]
    csv_path: str
    svg_path: str

    def by_seed(self) -> Dict[int, SeedResult]:
        return {run.seed: run for run in self.runs}


def make_domain(cfg: ExperimentConfig) -> Environment:
    params = {"width": cfg.cliff.width} if cfg.domain == "cliff" else {}
    return make_environment(cfg.domain, **params)


def run_seed(cfg: ExperimentConfig, seed: int, part_path: str | Path) -> SeedResult:
    """Train one agent on one seed, write its headerless CSV part and evaluate it greedily."""
    rng = np.random.default_rng(seed)
    env = make_domain(cfg)
    hierarchy = make_hierarchy(env, cfg.agent_shape)
    store = QStore(cfg.q_default)
    learner = make_learner(
        cfg.learner.variant,
        cfg.learner.params(),
        hierarchy,
        cfg.learner.tie_epsilon,
        cfg.learner.max_sweep_entries,
    )
    executor = OPHRLExecutor(
        hierarchy, env, store, learner, cfg.policy, cfg.updating_mode, cfg.learner.tie_epsilon
    )
    run_id = cfg.run_id(seed)
    logger.debug(f"{run_id}: {hierarchy.name} with {learner!r}")

    records = [
        executor.run_episode(episode, rng, cfg.commitment, cfg.step_limit, run_id, seed)
        for episode in range(cfg.episodes)
    ]
    write_csv(part_path, records, header=False)

    evaluation = evaluate_greedy(
        store, env, cfg.eval_episodes, rng, hierarchy, step_limit=cfg.eval_step_limit
    )
    returns = [record.episode_return for record in records]
    logger.info(
        f"{run_id} finished: greedy return {evaluation.mean_return:.2f}, "
        f"success rate {evaluation.success_rate:.2f}"
    )
    return SeedResult(
        seed=seed,
        final_mean_return=evaluation.mean_return,
        final_success_rate=evaluation.success_rate,
        auc=float(np.sum(returns)),
        returns=returns,
    )


def moving_average(values: Sequence[float], window: int) -> np.ndarray:
    """Trailing mean over at most `window` values ending at each index."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values
    sums = np.cumsum(np.concatenate(([0.0], values)))
    ends = np.arange(1, values.size + 1)
    starts = np.maximum(0, ends - window)
    return (sums[ends] - sums[starts]) / (ends - starts)


def ensure_writable(directory: Path) -> None:
    """Create `directory` and prove a file can be written there."""
    directory.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=directory, prefix=".probe-"):
        pass


def _run_all(cfg: ExperimentConfig, parts: Dict[int, Path]) -> Dict[int, SeedResult]:
    results: Dict[int, SeedResult] = {}
    workers = min(settings.OPHRL_THREADS, len(cfg.seeds))
    if workers <= 1:
        for seed in cfg.seeds:
            try:
                results[seed] = run_seed(cfg, seed, parts[seed])
            except Exception as exc:
                logger.exception(f"{cfg.run_id(seed)} failed")
                raise ExperimentError(seed, exc) from exc
        return results

    logger.debug(f"Running {len(cfg.seeds)} seeds on {workers} processes")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {seed: pool.submit(run_seed, cfg, seed, parts[seed]) for seed in cfg.seeds}
        for seed, future in futures.items():
            try:
                results[seed] = future.result()
            except Exception as exc:
                logger.error(f"{cfg.run_id(seed)} failed: {exc}")
                for pending in futures.values():
                    pending.cancel()
                raise ExperimentError(seed, exc) from exc
    return results


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Run every seed of `cfg` and write `<name>.csv`, `<name>.svg` and `<name>.summary.json`.

    Raises:
        OSError: when the output directory cannot be written; no run starts
        ConfigurationError: when the agent cannot be built for the domain
        ExperimentError: when any seed fails
    """
    output = Path(cfg.output_dir)
    ensure_writable(output)
    make_hierarchy(make_domain(cfg), cfg.agent_shape)
    logger.info(f"Starting experiment {cfg.name!r}: {len(cfg.seeds)} seed(s) x {cfg.episodes} episodes")

    parts_dir = output / f"{cfg.name}.parts"
    parts_dir.mkdir(exist_ok=True)
    parts = {seed: parts_dir / f"seed-{seed}.csv" for seed in cfg.seeds}
    try:
        results = _run_all(cfg, parts)
        csv_path = concatenate_csv(output / f"{cfg.name}.csv", [parts[seed] for seed in cfg.seeds])
    finally:
        shutil.rmtree(parts_dir, ignore_errors=True)
    logger.info(f"Wrote {csv_path}")

    runs = [results[seed] for seed in sorted(results)]
    mean_curve = np.mean([run.returns for run in runs], axis=0)
    smoothed = moving_average(mean_curve, cfg.smoothing_window)

    label = f"{cfg.learner.variant.value} ({cfg.agent_shape})"
    points = [(float(episode), float(value)) for episode, value in enumerate(smoothed)]
    svg_path = SVGWriter(output).write_chart_file(cfg.name, [(label, points)], title=cfg.name)
    logger.info(f"Wrote {svg_path}")

    summary = ExperimentSummary(
        name=cfg.name,
        episodes=cfg.episodes,
        smoothing_window=cfg.smoothing_window,
        runs=runs,
        mean_curve=[float(v) for v in mean_curve],
        smoothed_curve=[float(v) for v in smoothed],
        csv_path=str(csv_path),
        svg_path=str(svg_path),
    )
    summary_path = output / f"{cfg.name}.summary.json"
    summary_path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    logger.success(f"Experiment {cfg.name!r} complete: summary in {summary_path}")
    return summary

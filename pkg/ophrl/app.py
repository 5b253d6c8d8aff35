"""Experiment application: runs configs and presets, solves domains, validates agents."""

from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np
from loguru import logger

from ophrl.core.config import ExperimentConfig, apply_overrides, load_config, render_flat_config
from ophrl.core.diagnostics import PolicyCensus, census, render_census_table
from ophrl.core.learners import LearnerVariant
from ophrl.core.oracle import FlatMDP, OracleResult, evaluate_greedy, value_iteration
from ophrl.core.runner import ExperimentSummary, ensure_writable, make_domain, run_experiment
from ophrl.envs import make_environment, make_hierarchy
from ophrl.presets import preset

CENSUS_AGENTS = (
    ("naive_q0", LearnerVariant.NAIVE_Q0, "paper"),
    ("fixed_q0", LearnerVariant.FIXED_Q0, "paper"),
    ("fixed_osio", LearnerVariant.FIXED_OSIO, "paper"),
    ("gtsdt", LearnerVariant.GTSDT, "paper"),
    ("flat", LearnerVariant.FIXED_Q0, "flat"),
)


class ExperimentApp:
    """Front end behind the command line.

    Attributes:
        output_dir: Overrides every config's output directory when set
    """

    def __init__(self, output_dir: Optional[str] = None) -> None:
        logger.debug("Initializing ExperimentApp")
        self.output_dir = output_dir

    def _prepare(self, cfg: ExperimentConfig, overrides: Iterable[str]) -> ExperimentConfig:
        cfg = apply_overrides(cfg, overrides)
        if self.output_dir is not None:
            cfg = cfg.model_copy(update={"output_dir": self.output_dir})
        return cfg

    def run(self, cfg: ExperimentConfig) -> ExperimentSummary:
        """Run an experiment with a DEBUG log file next to its results."""
        output = Path(cfg.output_dir)
        ensure_writable(output)
        sink = logger.add(output / f"{cfg.name}.log", level="DEBUG", mode="w")
        try:
            (output / f"{cfg.name}.conf").write_text(render_flat_config(cfg), encoding="utf-8")
            return run_experiment(cfg)
        finally:
            logger.remove(sink)

    def run_config(self, path: str | Path, overrides: Iterable[str] = ()) -> ExperimentSummary:
        cfg = self._prepare(load_config(path), overrides)
        logger.info(f"Loaded config {path} ({cfg.name})")
        return self.run(cfg)

    def run_preset(self, name: str, overrides: Iterable[str] = ()) -> ExperimentSummary:
        cfg = self._prepare(preset(name), overrides)
        logger.info(f"Running preset {name}")
        return self.run(cfg)

    def validate(self, path: str | Path, overrides: Iterable[str] = ()) -> ExperimentConfig:
        """Load a config and build its agent; any problem raises ConfigurationError."""
        cfg = self._prepare(load_config(path), overrides)
        env = make_domain(cfg)
        hierarchy = make_hierarchy(env, cfg.agent_shape)
        logger.success(
            f"{path}: {cfg.name} is valid ({hierarchy.name}, {len(hierarchy.tasks)} task(s), "
            f"{len(cfg.seeds)} seed(s) x {cfg.episodes} episodes)"
        )
        return cfg

    def oracle(
        self,
        domain: str,
        width: Optional[int] = None,
        gamma: float = 1.0,
        dump: Optional[str | Path] = None,
    ) -> OracleResult:
        """Solve a domain by value iteration and report the optimal greedy return."""
        params = {"width": width} if domain == "cliff" and width is not None else {}
        env = make_environment(domain, **params)
        mdp = FlatMDP.from_environment(env)
        result = value_iteration(mdp, gamma=gamma)
        logger.info(f"{env.name}: {len(mdp.states)} states solved in {result.iterations} sweeps")

        expected = sum(p * result.value(s) for s, p in mdp.start_distribution.items())
        greedy = evaluate_greedy(result, env, 1 if len(mdp.start_distribution) == 1 else 100,
                                 np.random.default_rng(0))
        print(f"domain           {env.name}")
        print(f"states           {len(mdp.states)}")
        print(f"sweeps           {result.iterations}")
        print(f"residual         {result.residual:.3g}")
        print(f"expected V*      {expected:.6g}")
        print(f"greedy return    {greedy.mean_return:.6g}")
        print(f"success rate     {greedy.success_rate:.3f}")
        if dump is not None:
            path = result.dump(dump)
            logger.info(f"Wrote {path}")
        return result

    def diagnose_bandit(self, runs: int = 1000, episodes: int = 500, seed: int = 0) -> List[PolicyCensus]:
        """Print the census table of the bandit agents."""
        rng = np.random.default_rng(seed)
        rows = []
        for label, variant, shape in CENSUS_AGENTS:
            logger.info(f"Census: {label}")
            rows.append((label, census(variant, runs, episodes, rng, shape=shape)))
        print(render_census_table(rows))
        return [result for _, result in rows]

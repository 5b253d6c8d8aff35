"""Experiment configuration and its flat `dotted.key = value` file format."""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ophrl import settings
from ophrl.core.errors import ConfigurationError
from ophrl.core.executor import DEFAULT_STEP_LIMIT, UpdatingMode
from ophrl.core.exploration import CommitmentSchedule, PolicyBundle
from ophrl.core.learners import LearnerVariant
from ophrl.core.qstore import LearningParams
from ophrl.envs.cliff import CliffConfig


class LearnerConfig(BaseModel):
    """Learner variant and its parameters."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    variant: LearnerVariant = LearnerVariant.FIXED_Q0
    alpha: float = Field(0.1, gt=0.0, le=1.0)
    gamma: float = Field(1.0, ge=0.0, le=1.0)
    lam: float = Field(0.9, ge=0.0, le=1.0, alias="lambda")
    tie_epsilon: float = Field(0.0, ge=0.0)
    max_sweep_entries: Optional[int] = Field(None, gt=0)

    def params(self) -> LearningParams:
        return LearningParams(alpha=self.alpha, gamma=self.gamma, lam=self.lam)


class ExperimentConfig(BaseModel):
    """Everything one experiment needs: domain, agent, schedule and seed matrix.

    Attributes:
        name: Experiment name; prefixes run ids and output files
        domain: Benchmark domain
        cliff: Grid size, used when domain is the cliff
        agent_shape: Flat agent or the hierarchical one
        learner: Learner variant and parameters
        policy: Root and subtask selection policies
        updating_mode: active_path or all_goals
        commitment: Kappa schedule over episodes
        episodes: Episodes per seed
        seeds: One run per seed
        step_limit: Truncation bound per episode
        smoothing_window: Moving-average window of the aggregate curve
        eval_episodes: Greedy evaluation episodes after training
        eval_step_limit: Truncation bound per evaluation episode
        output_dir: Directory receiving CSV, SVG, summary and log
        q_default: Initial Q value
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "experiment"
    domain: Literal["bandit", "cliff", "taxi", "chain"] = "bandit"
    cliff: CliffConfig = Field(default_factory=CliffConfig)
    agent_shape: Literal["flat", "paper"] = "paper"
    learner: LearnerConfig = Field(default_factory=LearnerConfig)
    policy: PolicyBundle = Field(default_factory=PolicyBundle)
    updating_mode: UpdatingMode = UpdatingMode.ACTIVE_PATH
    commitment: CommitmentSchedule = Field(default_factory=CommitmentSchedule)
    episodes: int = Field(1000, ge=1)
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    step_limit: int = Field(DEFAULT_STEP_LIMIT, ge=1)
    smoothing_window: int = Field(100, ge=1)
    eval_episodes: int = Field(100, ge=1)
    eval_step_limit: int = Field(1000, ge=1)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    q_default: float = 0.0

    @field_validator("seeds", mode="before")
    @classmethod
    def _single_seed(cls, value: Any) -> Any:
        if isinstance(value, int):
            return [value]
        return value

    @field_validator("seeds")
    @classmethod
    def _distinct_seeds(cls, value: List[int]) -> List[int]:
        if len(set(value)) != len(value):
            raise ValueError(f"seeds must be distinct, got {value}")
        return value

    @field_validator("name")
    @classmethod
    def _plain_name(cls, value: str) -> str:
        if not value or any(c in value for c in "/\\,\"\r\n"):
            raise ValueError(f"name must be a non-empty plain file stem, got {value!r}")
        return value

    def run_id(self, seed: int) -> str:
        return f"{self.name}-s{seed}"


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Validate nested settings, turning pydantic errors into ConfigurationError."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid experiment config:\n{exc}") from exc


def parse_value(text: str) -> Any:
    """Interpret a config value as bool, int, float, comma list or string."""
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part.strip()]
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            pass
    return text


def fold_keys(pairs: Iterable[tuple[str, Any]]) -> Dict[str, Any]:
    """Turn (`a.b.c`, value) pairs into nested dicts; later pairs win."""
    tree: Dict[str, Any] = {}
    for key, value in pairs:
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError(f"key {key!r} nests under the scalar {part!r}")
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ConfigurationError(f"key {key!r} would replace a section")
        node[parts[-1]] = value
    return tree


def parse_assignment(line: str, where: str = "") -> tuple[str, Any]:
    key, sep, value = line.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigurationError(f"{where}expected 'key = value', got {line.strip()!r}")
    return key, parse_value(value)


def parse_flat_config(text: str, source: str = "<config>") -> Dict[str, Any]:
    """Parse flat config text into nested settings; `#` starts a comment."""
    pairs = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            pairs.append(parse_assignment(line, f"{source}:{number}: "))
    return fold_keys(pairs)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a flat config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    logger.debug(f"Loading experiment config from {path}")
    return build_config(parse_flat_config(text, str(path)))


def _merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def apply_overrides(cfg: ExperimentConfig, overrides: Iterable[str]) -> ExperimentConfig:
    """Apply `key=value` strings on top of a validated config."""
    overrides = list(overrides)
    if not overrides:
        return cfg
    extra = fold_keys(parse_assignment(item, "override: ") for item in overrides)
    logger.debug(f"Applying overrides: {', '.join(overrides)}")
    return build_config(_merge(cfg.model_dump(mode="json", by_alias=True), extra))


def _flatten(prefix: str, value: Any) -> Iterable[tuple[str, Any]]:
    if isinstance(value, dict):
        for key, child in value.items():
            yield from _flatten(f"{prefix}.{key}" if prefix else key, child)
    elif value is not None:
        yield prefix, value


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, list):
        return ", ".join(_render_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_flat_config(cfg: ExperimentConfig) -> str:
    """Flat text that load_config reads back into an equal config."""
    data = cfg.model_dump(mode="json", by_alias=True)
    lines = [f"{key} = {_render_value(value)}" for key, value in _flatten("", data)]
    return "\n".join(lines) + "\n"

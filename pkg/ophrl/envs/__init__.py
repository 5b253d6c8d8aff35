"""Benchmark domains and the agents built for them."""

from ophrl.core.errors import ConfigurationError
from ophrl.core.hierarchy import Hierarchy
from ophrl.envs.bandit import BanditEnvironment, make_bandit_hierarchy
from ophrl.envs.base import Environment, Transition
from ophrl.envs.chain import ChainConfig, ChainEnvironment, make_chain_hierarchy
from ophrl.envs.cliff import CliffConfig, CliffEnvironment, make_cliff_hierarchy
from ophrl.envs.taxi import TaxiEnvironment, make_taxi_hierarchy

DOMAINS = ("bandit", "cliff", "taxi", "chain")
SHAPES = ("flat", "paper")


def make_environment(domain: str, **params) -> Environment:
    """Build a domain by name; `width` applies to the cliff, `length` to the chain."""
    if domain == "bandit":
        return BanditEnvironment()
    if domain == "cliff":
        return CliffEnvironment(CliffConfig(**params))
    if domain == "taxi":
        return TaxiEnvironment()
    if domain == "chain":
        return ChainEnvironment(ChainConfig(**params))
    raise ConfigurationError(f"unknown domain {domain!r}; expected one of {', '.join(DOMAINS)}")


def make_hierarchy(env: Environment, shape: str = "paper") -> Hierarchy:
    """Build and validate the flat or hierarchical agent for `env`."""
    if isinstance(env, BanditEnvironment):
        hierarchy = make_bandit_hierarchy(shape)
    elif isinstance(env, CliffEnvironment):
        hierarchy = make_cliff_hierarchy(env, shape)
    elif isinstance(env, TaxiEnvironment):
        hierarchy = make_taxi_hierarchy(env, shape)
    elif isinstance(env, ChainEnvironment):
        if shape != "flat":
            raise ConfigurationError("the chain only has a flat agent")
        hierarchy = make_chain_hierarchy(env)
    else:
        raise ConfigurationError(f"no hierarchies registered for {type(env).__name__}")

    diagnostics = hierarchy.validate(env.reachable_states())
    if diagnostics:
        raise ConfigurationError(f"{hierarchy.name}: " + "; ".join(diagnostics))
    return hierarchy


__all__ = [
    "DOMAINS",
    "SHAPES",
    "BanditEnvironment",
    "ChainEnvironment",
    "CliffEnvironment",
    "Environment",
    "TaxiEnvironment",
    "Transition",
    "make_environment",
    "make_hierarchy",
]

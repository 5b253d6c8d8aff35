"""Environment interface shared by the benchmark domains."""

from abc import ABC, abstractmethod
from collections import deque
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from ophrl.core.errors import ContractViolation
from ophrl.core.types import StateId, TerminalKind


class Transition(NamedTuple):
    reward: float
    s_prime: StateId
    terminal: TerminalKind = TerminalKind.NONE


class Environment(ABC):
    """An episodic MDP with deterministic transitions and enumerable states.

    Subclasses implement the pure `transition` function and the start
    distribution; `reset`/`step` track the current state on top of them.

    Attributes:
        name: Domain name
        primitives: Primitive action ids, in a fixed order
        state: Current state, set by `reset`
    """

    name: str = "environment"
    primitives: Tuple[str, ...] = ()

    def __init__(self) -> None:
        self.state: StateId | None = None

    @abstractmethod
    def start_distribution(self) -> Dict[StateId, float]:
        """Start states with their probabilities."""

    @abstractmethod
    def transition(self, s: StateId, a: str) -> Transition:
        """Outcome of primitive `a` at the non-terminal state `s`."""

    @abstractmethod
    def is_terminal(self, s: StateId) -> bool:
        """Whether `s` is absorbing."""

    def reset(self, rng: np.random.Generator) -> StateId:
        starts = self.start_distribution()
        states = list(starts)
        if len(states) == 1:
            self.state = states[0]
        else:
            probs = np.fromiter(starts.values(), dtype=float, count=len(states))
            self.state = states[int(rng.choice(len(states), p=probs))]
        return self.state

    def step(self, a: str, rng: np.random.Generator | None = None) -> Transition:
        if self.state is None:
            raise ContractViolation(f"{self.name}: step before reset")
        if self.is_terminal(self.state):
            raise ContractViolation(f"{self.name}: step from terminal state {self.state}")
        outcome = self.transition(self.state, a)
        self.state = outcome.s_prime
        return outcome

    def check_primitive(self, a: str) -> None:
        if a not in self.primitives:
            raise ContractViolation(f"{self.name}: unknown primitive {a!r}")

    def reachable_states(self) -> List[StateId]:
        """Breadth-first closure of the start states under `transition`.

        Terminal states are included; their outgoing transitions are not.
        """
        seen = set(self.start_distribution())
        order = sorted(seen)
        frontier = deque(order)
        while frontier:
            s = frontier.popleft()
            if self.is_terminal(s):
                continue
            for a in self.primitives:
                s_prime = self.transition(s, a).s_prime
                if s_prime not in seen:
                    seen.add(s_prime)
                    order.append(s_prime)
                    frontier.append(s_prime)
        return order

    def enumerate(self) -> Dict[Tuple[StateId, str], Transition]:
        """Full transition table over reachable non-terminal states."""
        return {
            (s, a): self.transition(s, a)
            for s in self.reachable_states()
            if not self.is_terminal(s)
            for a in self.primitives
        }

    def describe(self, s: StateId) -> str:
        return str(s)

"""Environment contract: stateless stepping over explicit state vectors.

Environments never hold the simulation state between calls; ``step`` takes
the current state and returns the next one, so independent rollouts can
share a single instance across threads (one rollout per thread).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..core import Array


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment's spaces and stepping rate.

    ``wrap_dims`` lists the state indices with wrap-around topology; those
    are folded back into [lower, upper) after integration, all others are
    clamped to the box.
    """

    state_dim: int
    action_dim: int
    state_lower: Array
    state_upper: Array
    action_lower: Array
    action_upper: Array
    dt: float
    wrap_dims: frozenset[int] = frozenset()

    def __post_init__(self):
        for name in ("state_lower", "state_upper", "action_lower", "action_upper"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.state_lower.shape != (self.state_dim,) or self.state_upper.shape != (self.state_dim,):
            raise ValueError("state bounds must have shape (state_dim,)")
        if self.action_lower.shape != (self.action_dim,) or self.action_upper.shape != (self.action_dim,):
            raise ValueError("action bounds must have shape (action_dim,)")
        if not np.all(self.state_lower < self.state_upper):
            raise ValueError("state_lower must be elementwise below state_upper")
        if not np.all(self.action_lower < self.action_upper):
            raise ValueError("action_lower must be elementwise below action_upper")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if any(i < 0 or i >= self.state_dim for i in self.wrap_dims):
            raise ValueError("wrap_dims out of range")

    def clamp_action(self, a: Array) -> Array:
        return np.clip(np.asarray(a, dtype=float).ravel(), self.action_lower, self.action_upper)

    def apply_bounds(self, s: Array) -> Array:
        """Wrap the periodic dimensions, clamp the rest."""
        s = np.asarray(s, dtype=float).copy()
        for i in range(self.state_dim):
            lo, hi = self.state_lower[i], self.state_upper[i]
            if i in self.wrap_dims:
                s[i] = lo + (s[i] - lo) % (hi - lo)
            else:
                s[i] = min(max(s[i], lo), hi)
        return s

    def contains(self, s: Array, atol: float = 1e-9) -> bool:
        s = np.asarray(s, dtype=float)
        return bool(np.all(s >= self.state_lower - atol) and np.all(s <= self.state_upper + atol))


@dataclass(frozen=True)
class StepResult:
    s_next: Array
    r: float
    done: bool


def rk4_step(f, x: Array, a: Array, dt: float) -> Array:
    """One classical Runge-Kutta step of ``dx/dt = f(x, a)`` with a held constant."""
    k1 = f(x, a)
    k2 = f(x + 0.5 * dt * k1, a)
    k3 = f(x + 0.5 * dt * k2, a)
    k4 = f(x + dt * k3, a)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class Env(ABC):
    """Base class for the benchmark environments.

    Subclasses provide continuous-time ``dynamics``, a state ``reward``, an
    optional goal predicate, and may override ``_integrate`` when an exact
    discrete update exists.
    """

    id: str
    spec: EnvSpec

    @abstractmethod
    def reset(self, seed: int = 0) -> Array:
        """Deterministic initial state (the seed is accepted for API symmetry)."""

    @abstractmethod
    def dynamics(self, x: Array, a: Array) -> Array:
        """Continuous-time state derivative f(x, a)."""

    @abstractmethod
    def reward(self, s: Array) -> float:
        """State-dependent reward; action effort penalties live in step()."""

    def goal(self, s: Array) -> bool:
        """Goal predicate; sparse-goal environments terminate on it."""
        return False

    def analytic_jacobians(self, x: Array):
        """(df/dx, df/da) at (x, 0) where trivially available, else None."""
        return None

    def _integrate(self, s: Array, a: Array) -> Array:
        return rk4_step(self.dynamics, s, a, self.spec.dt)

    def _action_cost(self, a: Array) -> float:
        return 0.0

    def step(self, s: Array, a: Array) -> StepResult:
        """Advance one time step; out-of-box actions are clamped, never rejected."""
        s = np.asarray(s, dtype=float).ravel()
        a = self.spec.clamp_action(a)
        s_next = self.spec.apply_bounds(self._integrate(s, a))
        r = self.reward(s_next) + self._action_cost(a)
        return StepResult(s_next, r, self.goal(s_next))

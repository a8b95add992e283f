"""Continuous mountain car, started from the lowest-energy state.

State (x, v) with x in [-1.2, 0.6], v in [-0.07, 0.07], continuous thrust
a in [-1, 1]. The car sits on height profile sin(3x); thrust alone cannot
climb the hill, so reaching the goal at x >= 0.45 requires pumping energy.
Reaching the goal pays +100 and every step is charged 0.1*|a|^2 effort, so
a do-nothing rollout returns exactly zero.
"""

from __future__ import annotations

import numpy as np

from ..core import Array
from .base import Env, EnvSpec

POWER = 0.0015
GRAVITY = 0.0025
GOAL_POSITION = 0.45


class MountainCar(Env):
    id = "mountaincar"

    def __init__(self, params: dict[str, float] | None = None):
        params = params or {}
        self.spec = EnvSpec(
            state_dim=2,
            action_dim=1,
            state_lower=np.array([-1.2, -0.07]),
            state_upper=np.array([0.6, 0.07]),
            action_lower=np.array([-1.0]),
            action_upper=np.array([1.0]),
            dt=float(params.get("dt", 1.0)),
        )

    def reset(self, seed: int = 0) -> Array:
        # Valley bottom of sin(3x): x = -pi/6, zero velocity.
        return np.array([-np.pi / 6.0, 0.0])

    def dynamics(self, x: Array, a: Array) -> Array:
        return np.array([x[1], POWER * a[0] - GRAVITY * np.cos(3.0 * x[0])])

    def analytic_jacobians(self, x: Array):
        A = np.array([[0.0, 1.0], [3.0 * GRAVITY * np.sin(3.0 * x[0]), 0.0]])
        B = np.array([[0.0], [POWER]])
        return A, B

    def reward(self, s: Array) -> float:
        return 100.0 if s[0] >= GOAL_POSITION else 0.0

    def _action_cost(self, a: Array) -> float:
        return -0.1 * float(a @ a)

    def goal(self, s: Array) -> bool:
        return bool(s[0] >= GOAL_POSITION)

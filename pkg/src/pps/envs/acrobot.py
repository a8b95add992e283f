"""Two-link underactuated pendulum (acrobot) with a continuous elbow torque.

State (th1, th2, dth1, dth2). th1 is the angle of the first link measured
from the upright vertical, th2 the relative elbow angle; both wrap to
[-pi, pi). The agent starts hanging straight down, (pi, 0, 0, 0), the
lowest-energy configuration. Torque a in [-1, 1] acts on the elbow only.

Reward is sparse: 1 inside the goal region where the tip rises above the
pivot by more than one link length, i.e. cos(th1) + cos(th1 + th2) > 1,
and 0 elsewhere. The episode flag is set when the goal region is reached.
"""

from __future__ import annotations

import numpy as np

from ..core import Array
from .base import Env, EnvSpec

M1 = M2 = 1.0
L1 = 1.0
LC1 = LC2 = 0.5
I1 = I2 = 1.0
GRAVITY = 9.8
TIP_HEIGHT_GOAL = 1.0


class Acrobot(Env):
    id = "acrobot"

    def __init__(self, params: dict[str, float] | None = None):
        params = params or {}
        self.spec = EnvSpec(
            state_dim=4,
            action_dim=1,
            state_lower=np.array([-np.pi, -np.pi, -4.0 * np.pi, -9.0 * np.pi]),
            state_upper=np.array([np.pi, np.pi, 4.0 * np.pi, 9.0 * np.pi]),
            action_lower=np.array([-1.0]),
            action_upper=np.array([1.0]),
            dt=float(params.get("dt", 0.1)),
            wrap_dims=frozenset({0, 1}),
        )

    def reset(self, seed: int = 0) -> Array:
        return np.array([np.pi, 0.0, 0.0, 0.0])

    def dynamics(self, x: Array, a: Array) -> Array:
        # The manipulator equations below use the downward-vertical reference
        # for th1; our state measures it from upright, hence the pi shift.
        th1 = x[0] - np.pi
        th2, dth1, dth2 = x[1], x[2], x[3]
        tau = a[0]

        s2, c2 = np.sin(th2), np.cos(th2)
        d1 = M1 * LC1**2 + M2 * (L1**2 + LC2**2 + 2.0 * L1 * LC2 * c2) + I1 + I2
        d2 = M2 * (LC2**2 + L1 * LC2 * c2) + I2
        phi2 = M2 * LC2 * GRAVITY * np.cos(th1 + th2 - np.pi / 2.0)
        phi1 = (
            -M2 * L1 * LC2 * dth2**2 * s2
            - 2.0 * M2 * L1 * LC2 * dth2 * dth1 * s2
            + (M1 * LC1 + M2 * L1) * GRAVITY * np.cos(th1 - np.pi / 2.0)
            + phi2
        )
        ddth2 = (tau + (d2 / d1) * phi1 - M2 * L1 * LC2 * dth1**2 * s2 - phi2) / (
            M2 * LC2**2 + I2 - d2**2 / d1
        )
        ddth1 = -(d2 * ddth2 + phi1) / d1
        return np.array([dth1, dth2, ddth1, ddth2])

    def tip_height(self, s: Array) -> float:
        """Height of the second link's tip above the pivot, in link lengths."""
        return float(np.cos(s[0]) + np.cos(s[0] + s[1]))

    def reward(self, s: Array) -> float:
        return 1.0 if self.goal(s) else 0.0

    def goal(self, s: Array) -> bool:
        return self.tip_height(s) > TIP_HEIGHT_GOAL

"""Torque-controlled two-link planar arm with a task-space reward.

State (q1, q2, dq1, dq2); both joints carry hard position limits (no
wrap-around) and the links are modelled as point masses at the link ends.
Reward is 1 - tanh(distance of the end effector to a fixed goal point).

The default geometry deliberately blocks the near inverse-kinematics branch
of the goal point with the elbow limit, so the arm must swing the long way
around (initially moving away from the goal) to collect the top reward.
All parameters are read from the key-value config (see defaults.cfg).
"""

from __future__ import annotations

import numpy as np

from ..core import Array
from .base import Env, EnvSpec

_REQUIRED = (
    "link1_length",
    "link2_length",
    "link1_mass",
    "link2_mass",
    "gravity",
    "q1_min",
    "q1_max",
    "q2_min",
    "q2_max",
    "velocity_limit",
    "torque_limit",
    "q1_init",
    "q2_init",
    "goal_x",
    "goal_y",
)


class PlanarArm(Env):
    id = "planararm"

    def __init__(self, params: dict[str, float]):
        missing = [k for k in _REQUIRED if k not in params]
        if missing:
            raise ValueError(f"planararm config is missing {missing}")
        self.l1 = params["link1_length"]
        self.l2 = params["link2_length"]
        self.m1 = params["link1_mass"]
        self.m2 = params["link2_mass"]
        self.g = params["gravity"]
        self.goal_point = np.array([params["goal_x"], params["goal_y"]])
        self._q_init = np.array([params["q1_init"], params["q2_init"], 0.0, 0.0])
        v = params["velocity_limit"]
        t = params["torque_limit"]
        self.spec = EnvSpec(
            state_dim=4,
            action_dim=2,
            state_lower=np.array([params["q1_min"], params["q2_min"], -v, -v]),
            state_upper=np.array([params["q1_max"], params["q2_max"], v, v]),
            action_lower=np.array([-t, -t]),
            action_upper=np.array([t, t]),
            dt=float(params.get("dt", 0.02)),
        )
        if not self.spec.contains(self._q_init):
            raise ValueError("initial joint configuration violates the joint limits")

    def reset(self, seed: int = 0) -> Array:
        return self._q_init.copy()

    def mass_matrix(self, q: Array) -> Array:
        c2 = np.cos(q[1])
        m11 = (self.m1 + self.m2) * self.l1**2 + self.m2 * self.l2**2 + 2.0 * self.m2 * self.l1 * self.l2 * c2
        m12 = self.m2 * self.l2**2 + self.m2 * self.l1 * self.l2 * c2
        m22 = self.m2 * self.l2**2
        return np.array([[m11, m12], [m12, m22]])

    def gravity_torque(self, q: Array) -> Array:
        g1 = (self.m1 + self.m2) * self.g * self.l1 * np.cos(q[0]) + self.m2 * self.g * self.l2 * np.cos(q[0] + q[1])
        g2 = self.m2 * self.g * self.l2 * np.cos(q[0] + q[1])
        return np.array([g1, g2])

    def dynamics(self, x: Array, a: Array) -> Array:
        q, dq = x[:2], x[2:]
        h = self.m2 * self.l1 * self.l2 * np.sin(q[1])
        coriolis = np.array([-h * (2.0 * dq[0] * dq[1] + dq[1] ** 2), h * dq[0] ** 2])
        ddq = np.linalg.solve(self.mass_matrix(q), a - coriolis - self.gravity_torque(q))
        return np.concatenate([dq, ddq])

    def end_effector(self, q: Array) -> Array:
        return np.array(
            [
                self.l1 * np.cos(q[0]) + self.l2 * np.cos(q[0] + q[1]),
                self.l1 * np.sin(q[0]) + self.l2 * np.sin(q[0] + q[1]),
            ]
        )

    def reward(self, s: Array) -> float:
        dist = np.linalg.norm(self.end_effector(s[:2]) - self.goal_point)
        return float(1.0 - np.tanh(dist))

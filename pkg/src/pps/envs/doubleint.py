"""One-dimensional force-controlled point mass with wrap-around position.

State (x, v) with x in [-10, 10] (periodic) and v in [-2.5, 2.5]; force
u in [-1, 1]. Two goal locations pay shaped rewards:

    r = max(1 - tanh|X - G1|, 2 * (1 - tanh|X - G2|))

with G1 = (-2.5, 0), G2 = (6.0, 0) and |.| the Euclidean norm over the
(wrapped position error, velocity error) pair. The agent starts between the
goals, closer to the low-reward one.
"""

from __future__ import annotations

import numpy as np

from ..core import Array
from .base import Env, EnvSpec

G1 = np.array([-2.5, 0.0])
G2 = np.array([6.0, 0.0])


class DoubleIntegrator(Env):
    id = "doubleint"

    def __init__(self, params: dict[str, float] | None = None):
        params = params or {}
        self.spec = EnvSpec(
            state_dim=2,
            action_dim=1,
            state_lower=np.array([-10.0, -2.5]),
            state_upper=np.array([10.0, 2.5]),
            action_lower=np.array([-1.0]),
            action_upper=np.array([1.0]),
            dt=float(params.get("dt", 0.05)),
            wrap_dims=frozenset({0}),
        )

    def reset(self, seed: int = 0) -> Array:
        return np.zeros(2)

    def dynamics(self, x: Array, a: Array) -> Array:
        return np.array([x[1], a[0]])

    def analytic_jacobians(self, x: Array):
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        B = np.array([[0.0], [1.0]])
        return A, B

    def _integrate(self, s: Array, a: Array) -> Array:
        # Exact zero-order-hold update of the linear system.
        dt = self.spec.dt
        return np.array([s[0] + s[1] * dt + 0.5 * a[0] * dt * dt, s[1] + a[0] * dt])

    def _wrapped_pos_error(self, x: float, gx: float) -> float:
        period = self.spec.state_upper[0] - self.spec.state_lower[0]
        return (x - gx + period / 2.0) % period - period / 2.0

    def reward(self, s: Array) -> float:
        d1 = np.hypot(self._wrapped_pos_error(s[0], G1[0]), s[1] - G1[1])
        d2 = np.hypot(self._wrapped_pos_error(s[0], G2[0]), s[1] - G2[1])
        return float(max(1.0 - np.tanh(d1), 2.0 * (1.0 - np.tanh(d2))))

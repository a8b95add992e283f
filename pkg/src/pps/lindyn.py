"""Affine linearization of environment dynamics and zero-order-hold discretization.

Around a target state x_r (and zero nominal action) the continuous dynamics
are approximated by

    dx/dt = A x + B a + c,       c = f(x_r, 0) - A x_r,

which the augmented (affine) matrices absorb:

    A_aff = [[A, c], [0, 0]],    B_aff = [[B], [0]],

the zero bottom row of A_aff encoding that the appended homogeneous
coordinate has zero derivative. Discretization is exact zero-order hold via
the block matrix exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import Array

FD_REL_STEP = 1e-5
FD_ABS_FLOOR = 1e-7


@dataclass(frozen=True)
class LinearizedDynamics:
    A: Array
    B: Array
    c: Array
    A_affine: Array
    B_affine: Array
    linearization_point: Array

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def action_dim(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class DiscreteDynamics:
    G_affine: Array
    H_affine: Array
    dt: float


def fd_jacobians(env, x: Array, rel_step: float = FD_REL_STEP, abs_floor: float = FD_ABS_FLOOR):
    """Central-difference Jacobians (df/dx, df/da) of env.dynamics at (x, 0)."""
    x = np.asarray(x, dtype=float)
    d, m = env.spec.state_dim, env.spec.action_dim
    a0 = np.zeros(m)
    A = np.empty((d, d))
    B = np.empty((d, m))
    for i in range(d):
        h = max(rel_step * abs(x[i]), abs_floor)
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        A[:, i] = (env.dynamics(xp, a0) - env.dynamics(xm, a0)) / (2.0 * h)
    for j in range(m):
        h = abs_floor
        ap, am = a0.copy(), a0.copy()
        ap[j] += h
        am[j] -= h
        B[:, j] = (env.dynamics(x, ap) - env.dynamics(x, am)) / (2.0 * h)
    return A, B


def linearize(env, x_r: Array) -> LinearizedDynamics:
    """Affine model of env.dynamics around (x_r, a=0).

    Uses the environment's analytic Jacobians when it provides them, central
    finite differences otherwise. Raises on non-finite derivatives (the
    dynamics blow up at x_r).
    """
    x_r = np.asarray(x_r, dtype=float).ravel()
    jac = env.analytic_jacobians(x_r)
    A, B = jac if jac is not None else fd_jacobians(env, x_r)
    f0 = env.dynamics(x_r, np.zeros(env.spec.action_dim))
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B)) and np.all(np.isfinite(f0))):
        raise ValueError(f"non-finite derivative while linearizing at {x_r}")
    c = f0 - A @ x_r

    d, m = A.shape[0], B.shape[1]
    A_aff = np.zeros((d + 1, d + 1))
    A_aff[:d, :d] = A
    A_aff[:d, d] = c
    B_aff = np.vstack([B, np.zeros((1, m))])
    return LinearizedDynamics(A=A, B=B, c=c, A_affine=A_aff, B_affine=B_aff, linearization_point=x_r)


def discretize(lin: LinearizedDynamics, dt: float) -> DiscreteDynamics:
    """Zero-order-hold discretization of the affine model over one step of dt.

    G_aff = exp(A_aff dt) and H_aff = (integral of exp(A_aff t) dt) B_aff,
    both read off the exponential of the augmented block matrix
    [[A_aff, B_aff], [0, 0]].
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = lin.A_affine.shape[0]
    m = lin.B_affine.shape[1]
    blk = np.zeros((n + m, n + m))
    blk[:n, :n] = lin.A_affine
    blk[:n, n:] = lin.B_affine
    E = expm(blk * dt)
    G = E[:n, :n].copy()
    H = E[:n, n:].copy()
    # The homogeneous row is (0,...,0,1) by structure; pin it exactly.
    G[-1, :] = 0.0
    G[-1, -1] = 1.0
    H[-1, :] = 0.0
    return DiscreteDynamics(G_affine=G, H_affine=H, dt=float(dt))

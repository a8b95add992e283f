"""Affine-quadratic-regulator distance: minimum time-plus-energy between states.

Under the locally affine model dx/dt = A x + B a + c, the cost of reaching
x_r from x0 in time T decomposes into the horizon itself plus the minimum
control energy that cancels the free drift:

    J(T) = T + 1/2 d(x0bar, T)^T G(T)^{-1} d(x0bar, T)

where x0bar = x0 - x_r, d(x0bar, T) = e^{AT} x0bar + int_0^T e^{A(T-tau)} c dtau
is the openloop drift, and G(T) is the R-weighted controllability Gramian

    dG/dt = A G + G A^T + B R^{-1} B^T,   G(0) = 0.

J is minimized over a geometric grid of candidate horizons; the best (J*, T*)
serves as the tree distance metric and nearest-node selector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, expm

from .core import Array
from .lindyn import LinearizedDynamics

if TYPE_CHECKING:
    from .planner import Tree, TreeNode

# Relative Tikhonov weight applied when a Gramian is numerically singular.
REGULARIZATION = 1e-9


@dataclass(frozen=True)
class AqrConfig:
    """Distance-metric parameters.

    R weights the control energy; candidate horizons form a geometric grid
    of t_grid points on (t_min, t_max], with t_min defaulting to t_max/100.
    ode_steps controls the Runge-Kutta resolution of the Gramian integration
    per candidate horizon.
    """

    R: Array
    t_max: float
    t_grid: int = 32
    ode_steps: int = 64
    t_min: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float))
        if self.R.ndim != 2 or self.R.shape[0] != self.R.shape[1]:
            raise ValueError("R must be square")
        if not np.allclose(self.R, self.R.T, atol=1e-12):
            raise ValueError("R must be symmetric")
        try:
            cho_factor(self.R)
        except np.linalg.LinAlgError as exc:
            raise ValueError("R must be positive definite") from exc
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.t_grid < 2:
            raise ValueError("t_grid must be at least 2")
        if self.t_min is not None and not 0 < self.t_min < self.t_max:
            raise ValueError("t_min must lie in (0, t_max)")

    def horizons(self) -> Array:
        lo = self.t_min if self.t_min is not None else self.t_max / 100.0
        return np.geomspace(lo, self.t_max, self.t_grid)

    @classmethod
    def default_for(cls, spec, h: int) -> "AqrConfig":
        """Defaults tied to the steering horizon: t_max = 10 * dt * h."""
        return cls(R=np.eye(spec.action_dim), t_max=10.0 * spec.dt * h)


@dataclass(frozen=True)
class AqrResult:
    cost: float
    horizon: float


def _energy_matrix(lin: LinearizedDynamics, R: Array) -> Array:
    """B R^{-1} B^T, symmetrized."""
    c, low = cho_factor(np.asarray(R, dtype=float))
    S = lin.B @ cho_solve((c, low), lin.B.T)
    return 0.5 * (S + S.T)


def _gramian_rhs(A: Array, S: Array, G: Array) -> Array:
    return A @ G + G @ A.T + S


def _advance_gramian(G: Array, A: Array, S: Array, span: float, steps: int) -> Array:
    """RK4-integrate the Gramian ODE forward over `span` in `steps` steps."""
    h = span / steps
    for _ in range(steps):
        k1 = _gramian_rhs(A, S, G)
        k2 = _gramian_rhs(A, S, G + 0.5 * h * k1)
        k3 = _gramian_rhs(A, S, G + 0.5 * h * k2)
        k4 = _gramian_rhs(A, S, G + h * k3)
        G = G + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return G


def gramian(lin: LinearizedDynamics, R: Array, T: float, steps: int = 64) -> Array:
    """Weighted controllability Gramian G(T) of the linearized model."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    d = lin.state_dim
    if T == 0:
        return np.zeros((d, d))
    G = _advance_gramian(np.zeros((d, d)), lin.A, _energy_matrix(lin, R), T, steps)
    return 0.5 * (G + G.T)


def drift(lin: LinearizedDynamics, x0_bar: Array, T: float) -> Array:
    """Openloop drift e^{AT} x0bar + int_0^T e^{A(T-tau)} c dtau.

    Both terms come out of one exponential of the augmented matrix
    [[A, c], [0, 0]] (which is exactly A_affine).
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    d = lin.state_dim
    E = expm(lin.A_affine * T)
    return E[:d, :d] @ np.asarray(x0_bar, dtype=float) + E[:d, d]


def _factor_spd(G: Array):
    """Cholesky of G, Tikhonov-regularized when near-singular; None if hopeless."""
    d = G.shape[0]
    lam = REGULARIZATION * np.trace(G) / d
    if not np.isfinite(lam) or lam <= 0:
        lam = REGULARIZATION
    for shift in (0.0, lam, 1e6 * lam):
        try:
            return cho_factor(G + shift * np.eye(d))
        except (np.linalg.LinAlgError, ValueError):
            # ValueError: non-finite entries (an exploded integration).
            continue
    return None


# Horizon tables depend only on the linearization and the config, not on the
# evaluated states, and are expensive (Gramian integration + exponentials);
# a small FIFO cache makes repeated queries against the same model (any LTI
# environment, repeated nearest() calls) close to free.
_TABLE_CACHE: dict[bytes, list] = {}
_TABLE_CACHE_MAX = 64


def _grid_tables(lin: LinearizedDynamics, cfg: AqrConfig) -> list:
    """Per-horizon (T, e^{AT}, drift offset, Cholesky of regularized G)."""
    key = b"|".join(
        [
            lin.A_affine.tobytes(),
            lin.B.tobytes(),
            cfg.R.tobytes(),
            np.array([cfg.t_max, cfg.t_min or -1.0, cfg.t_grid, cfg.ode_steps]).tobytes(),
        ]
    )
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit

    d = lin.state_dim
    A, S = lin.A, _energy_matrix(lin, R=cfg.R)
    tables = []
    G = np.zeros((d, d))
    t_prev = 0.0
    for T in cfg.horizons():
        span = T - t_prev
        # Match the per-horizon RK4 resolution of gramian(): local step <= T/ode_steps.
        steps = max(2, math.ceil(span / (T / cfg.ode_steps)))
        with np.errstate(over="ignore", invalid="ignore"):
            G = _advance_gramian(G, A, S, span, steps)
            G = 0.5 * (G + G.T)
            t_prev = T
            try:
                E = expm(lin.A_affine * T)
            except (ValueError, np.linalg.LinAlgError):
                # The exponential overflowed: this horizon is unusable.
                tables.append((T, None, None, None))
                continue
            if not np.all(np.isfinite(E)):
                tables.append((T, None, None, None))
                continue
            tables.append((T, E[:d, :d].copy(), E[:d, d].copy(), _factor_spd(G)))

    if len(_TABLE_CACHE) >= _TABLE_CACHE_MAX:
        _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
    _TABLE_CACHE[key] = tables
    return tables


def _grid_costs(lin: LinearizedDynamics, X0bar: Array, cfg: AqrConfig) -> tuple[Array, Array]:
    """Minimum grid cost and its horizon for each row of X0bar.

    Shares one incremental Gramian integration across all candidate horizons
    and evaluates every row (tree node) against each horizon vectorized.
    """
    Ts = cfg.horizons()
    best = np.full(X0bar.shape[0], math.inf)
    best_T = np.full(X0bar.shape[0], Ts[-1])
    for T, Ed, offset, factor in _grid_tables(lin, cfg):
        if factor is None:
            continue
        D = X0bar @ Ed.T + offset
        Z = cho_solve(factor, D.T)
        quad = 0.5 * np.maximum(np.einsum("ij,ji->i", D, Z), 0.0)
        J = T + quad
        improved = J < best
        best[improved] = J[improved]
        best_T[improved] = T
    return best, best_T


def aqr_distance(lin: LinearizedDynamics, x0: Array, x_r: Array, cfg: AqrConfig) -> AqrResult:
    """Minimum time-plus-energy cost from x0 to x_r and its horizon.

    Returns cost +inf (sentinel: unreachable under the local model) if every
    candidate Gramian is singular beyond regularization.
    """
    x0bar = np.asarray(x0, dtype=float) - np.asarray(x_r, dtype=float)
    costs, horizons = _grid_costs(lin, x0bar[None, :], cfg)
    return AqrResult(cost=float(costs[0]), horizon=float(horizons[0]))


def nearest(tree: "Tree", x_r: Array, cfg: AqrConfig, lin: LinearizedDynamics) -> "TreeNode":
    """Tree node with minimal AQR cost to x_r; ties break to the lowest id.

    `lin` must be the linearization around x_r; it is computed once by the
    caller and shared across all node evaluations.
    """
    nodes: Sequence["TreeNode"] = tree.nodes
    if not nodes:
        raise ValueError("nearest() on an empty tree")
    X = np.stack([n.state for n in nodes]) - np.asarray(x_r, dtype=float)
    costs, _ = _grid_costs(lin, X, cfg)
    return nodes[int(np.argmin(costs))]

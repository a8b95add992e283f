"""Shrinking-horizon linear-MPC steering toward a target state.

Each call plans over the remaining horizon L on the affine discrete model
(z_{k+1} = G z_k + H a_k), executes only the first action on the real
environment, then re-plans with L-1. The planning problem is the condensed
QP over the action sequence

    minimize    (z_L - z_r)^T Q_L (z_L - z_r)
                + sum_{k<L} (z_k - z_r)^T Q (z_k - z_r)
                + sum_k a_k^T R a_k
    subject to  z_{k+1} = G z_k + H a_k
                x_min <= z_k <= x_max   (real coordinates; softened)
                a_min <= a_k <= a_max   (hard)

State bounds are softened with nonnegative slack variables s >= violation
carrying a quadratic penalty of 1e6 per unit, which keeps the problem
solvable when the linearized prediction cannot honor the box (routine once
the model is extrapolated far from its linearization point). The slacks are
eliminated analytically (their optimum is exactly max(0, violation)), so
the solver only ever works in the action space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Array, Trajectory, Transition, to_affine
from .lindyn import DiscreteDynamics
from .qp import QpInfeasibleError, QpSolverError, solve_qp_ineq

# Quadratic penalty per unit of state-bound violation.
SLACK_WEIGHT = 1e6
# Hard mode escalates the penalty here before declaring infeasibility.
SLACK_WEIGHT_HARD = 1e12
# Residual violation above this, after escalation, means the hard problem
# admits no action sequence.
INFEASIBLE_TOL = 1e-5


@dataclass(frozen=True)
class MpcWeights:
    """Stage/terminal/action weights and the default horizon.

    The terminal weight must dominate the stage weight (Q_L - 100 Q must be
    positive semidefinite) so the plan commits to arriving rather than
    loitering.
    """

    Q: Array
    Q_L: Array
    R: Array
    h: int = 20

    def __post_init__(self):
        for name in ("Q", "Q_L", "R"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.h < 1:
            raise ValueError("horizon must be at least 1")
        for name in ("Q", "Q_L", "R"):
            M = getattr(self, name)
            if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.allclose(M, M.T, atol=1e-12):
                raise ValueError(f"{name} must be a symmetric square matrix")
        if np.linalg.eigvalsh(self.Q).min() < -1e-12:
            raise ValueError("Q must be positive semidefinite")
        if np.linalg.eigvalsh(self.R).min() <= 0:
            raise ValueError("R must be positive definite")
        gap = np.linalg.eigvalsh(self.Q_L - 100.0 * self.Q).min()
        if gap < -1e-9 * max(1.0, np.linalg.norm(self.Q_L)):
            raise ValueError("Q_L must dominate Q (Q_L - 100 Q not PSD)")

    @classmethod
    def default_for(cls, spec, h: int = 20) -> "MpcWeights":
        """Span-normalized diagonal weights, zero on the affine coordinate.

        Each real coordinate is weighted by (span_min / span_i)^2 so that a
        full-range error costs the same in every dimension regardless of its
        units; otherwise the wide dimensions (positions) dominate the
        terminal cost and the narrow ones (velocities) are never tracked.
        """
        span = spec.state_upper - spec.state_lower
        base = np.diag(np.append((span.min() / span) ** 2, 0.0))
        return cls(Q=1e-3 * base, Q_L=1e3 * base, R=1e-2 * np.eye(spec.action_dim), h=h)


@dataclass
class SteerOutcome:
    reached: Array
    trajectory: Trajectory
    feasible_steps: int
    failed: bool


@dataclass
class _Condensed:
    """Per-(model, weights, L) matrices of the condensed problem.

    Predicted states are z = F z0 + Gamma a; the cost over stacked actions
    is 0.5 a^T P a + q^T a with q = WG^T (F z0 - z_r-stack). `rows` selects
    the real coordinates of the stacked states, Gsel = Gamma[rows].
    """

    F: Array
    Gamma: Array
    WG: Array
    P: Array
    rows: Array
    Gsel: Array


# The condensed matrices depend only on (G, H, weights, L); for an LTI
# environment the discrete model never changes, so cache them.
_COND_CACHE: dict[bytes, _Condensed] = {}
_COND_CACHE_MAX = 256


def _condensed(G: Array, H: Array, L: int, w: MpcWeights) -> _Condensed:
    key = b"|".join(
        [G.tobytes(), H.tobytes(), w.Q.tobytes(), w.Q_L.tobytes(), w.R.tobytes(), str(L).encode()]
    )
    hit = _COND_CACHE.get(key)
    if hit is not None:
        return hit

    n, m = G.shape[0], H.shape[1]
    pw = [np.eye(n)]
    for _ in range(L):
        pw.append(G @ pw[-1])
    F = np.vstack(pw[1:])
    Gamma = np.zeros((L * n, L * m))
    GH = [p @ H for p in pw[:L]]
    for k in range(1, L + 1):
        for j in range(k):
            Gamma[(k - 1) * n : k * n, j * m : (j + 1) * m] = GH[k - 1 - j]

    WG = np.empty_like(Gamma)
    for k in range(1, L + 1):
        Wk = w.Q_L if k == L else w.Q
        rows = slice((k - 1) * n, k * n)
        WG[rows] = Wk @ Gamma[rows]
    P = Gamma.T @ WG + np.kron(np.eye(L), w.R)
    # Tiny Tikhonov term: keeps factorizations meaningful when an unstable
    # model makes P astronomically ill-conditioned; a no-op otherwise.
    P = P + (1e-13 * np.trace(P) / P.shape[0]) * np.eye(P.shape[0])
    rows_idx = np.array([k * n + i for k in range(L) for i in range(n - 1)])
    cond = _Condensed(F=F, Gamma=Gamma, WG=WG, P=P, rows=rows_idx, Gsel=Gamma[rows_idx])

    if len(_COND_CACHE) >= _COND_CACHE_MAX:
        _COND_CACHE.pop(next(iter(_COND_CACHE)))
    _COND_CACHE[key] = cond
    return cond


def _box_rows(a: Array, a_lo: Array, a_hi: Array, nb: int) -> list[int]:
    """Working-set seed: box rows the point already sits on."""
    return list(np.flatnonzero(a >= a_hi - 1e-12)) + [
        nb + int(i) for i in np.flatnonzero(a <= a_lo + 1e-12)
    ]


def _solve_soft(P, q, Gsel, base, x_lo, x_hi, C_box, b_box, a_lo, a_hi, start, weight, max_rounds=40):
    """Minimize 0.5 a^T P a + q^T a + 0.5 w |max(0, violation)|^2 over the box.

    Pattern iteration: freeze the set of violated state rows, solve the
    resulting box QP exactly, then re-derive the pattern; a safeguarded
    exact line search between iterates forces monotone descent, so the
    finitely many patterns cannot cycle. Returns (actions, max violation).
    """
    nb = P.shape[0]

    def violations(a):
        pred = base + Gsel @ a
        return np.maximum(pred - x_hi, 0.0), np.maximum(x_lo - pred, 0.0)

    def phi(a):
        v_hi, v_lo = violations(a)
        return 0.5 * a @ (P @ a) + q @ a + 0.5 * weight * (v_hi @ v_hi + v_lo @ v_lo)

    # Clipping is exact projection onto the feasible set (a box), so it is
    # the cheap way to keep iterates feasible against rounding noise.
    a = np.clip(start, a_lo, a_hi)
    for _ in range(max_rounds):
        pred = base + Gsel @ a
        hi = pred > x_hi
        lo = pred < x_lo
        blocks = []
        offsets = []
        if hi.any():
            blocks.append(Gsel[hi])
            offsets.append((base - x_hi)[hi])
        if lo.any():
            blocks.append(-Gsel[lo])
            offsets.append((x_lo - base)[lo])
        if blocks:
            Gv = np.vstack(blocks)
            rv = np.concatenate(offsets)
            P2 = P + weight * Gv.T @ Gv
            q2 = q + weight * Gv.T @ rv
        else:
            P2, q2 = P, q
        sol = solve_qp_ineq(P2, q2, C_box, b_box, a, working0=_box_rows(a, a_lo, a_hi, nb))
        a_new = np.clip(sol.x, a_lo, a_hi)
        step = a_new - a
        if np.linalg.norm(step, ord=np.inf) <= 1e-11 * (1.0 + np.linalg.norm(a, ord=np.inf)):
            v_hi, v_lo = violations(a_new)
            return a_new, float(max(v_hi.max(initial=0.0), v_lo.max(initial=0.0)))
        pred_new = base + Gsel @ a_new
        if np.array_equal(pred_new > x_hi, hi) and np.array_equal(pred_new < x_lo, lo):
            v_hi, v_lo = violations(a_new)
            return a_new, float(max(v_hi.max(initial=0.0), v_lo.max(initial=0.0)))
        # The pattern moved: take the exact minimizer along the segment
        # (phi is convex and piecewise quadratic, so bisect its slope).
        if phi(a_new) < phi(a):
            a = a_new
            continue
        t_lo_, t_hi_ = 0.0, 1.0
        for _ in range(50):
            t = 0.5 * (t_lo_ + t_hi_)
            at = a + t * step
            v_hi, v_lo = violations(at)
            grad = P @ at + q + weight * (Gsel.T @ v_hi - Gsel.T @ v_lo)
            if grad @ step > 0:
                t_hi_ = t
            else:
                t_lo_ = t
        a = np.clip(a + t_lo_ * step, a_lo, a_hi)
    v_hi, v_lo = violations(a)
    return a, float(max(v_hi.max(initial=0.0), v_lo.max(initial=0.0)))


def solve_qp(
    x0_affine: Array,
    x_r_affine: Array,
    L: int,
    G_affine: Array,
    H_affine: Array,
    weights: MpcWeights,
    spec,
    soft_state: bool = True,
    warm_start: Array | None = None,
) -> Array:
    """Optimal action sequence a_0..a_{L-1} for the condensed MPC problem.

    With soft_state=False, a violation that survives penalty escalation
    raises QpInfeasibleError: the hard state constraints admit no action
    sequence.
    """
    if L < 1:
        raise ValueError("horizon must be at least 1")
    z0 = np.asarray(x0_affine, dtype=float).ravel()
    z_r = np.asarray(x_r_affine, dtype=float).ravel()
    n, m = G_affine.shape[0], H_affine.shape[1]
    cond = _condensed(G_affine, H_affine, L, weights)
    P, Gsel = cond.P, cond.Gsel
    e = cond.F @ z0 - np.tile(z_r, L)
    q = cond.WG.T @ e

    a_lo = np.tile(spec.action_lower, L)
    a_hi = np.tile(spec.action_upper, L)
    x_lo = np.tile(spec.state_lower, L)
    x_hi = np.tile(spec.state_upper, L)
    base = (cond.F @ z0)[cond.rows]
    state_tol = 1e-9 * (1.0 + np.abs(np.concatenate([x_lo, x_hi])).max())

    def states_ok(a_flat: Array) -> bool:
        x = base + Gsel @ a_flat
        return bool(np.all(x <= x_hi + state_tol) and np.all(x >= x_lo - state_tol))

    # Unconstrained minimizer; cheapest exit when no bound is active.
    a_flat = np.linalg.solve(P, -q)
    if np.all(a_flat <= a_hi + 1e-12) and np.all(a_flat >= a_lo - 1e-12) and states_ok(a_flat):
        return np.clip(a_flat, a_lo, a_hi).reshape(L, m)

    # Action box only; the warm start also seeds the working set with the
    # bounds it already sits on (the previous solve's active set, shifted).
    nb = L * m
    C_box = np.vstack([np.eye(nb), -np.eye(nb)])
    b_box = np.concatenate([a_hi, -a_lo])
    start = np.clip(warm_start.ravel() if warm_start is not None else np.zeros(nb), a_lo, a_hi)
    sol = solve_qp_ineq(P, q, C_box, b_box, start, working0=_box_rows(start, a_lo, a_hi, nb))
    if states_ok(sol.x):
        return np.clip(sol.x, a_lo, a_hi).reshape(L, m)

    # State bounds active: soft-penalty problem in the action space.
    a_soft, viol = _solve_soft(P, q, Gsel, base, x_lo, x_hi, C_box, b_box, a_lo, a_hi, sol.x, SLACK_WEIGHT)
    if not soft_state and viol > INFEASIBLE_TOL:
        a_soft, viol = _solve_soft(
            P, q, Gsel, base, x_lo, x_hi, C_box, b_box, a_lo, a_hi, a_soft, SLACK_WEIGHT_HARD
        )
        if viol > INFEASIBLE_TOL:
            raise QpInfeasibleError(f"state constraints violated by {viol:.3e} at best")
    return np.clip(a_soft, a_lo, a_hi).reshape(L, m)


def steer(env, v: Array, x_r: Array, h: int, dd: DiscreteDynamics, weights: MpcWeights) -> SteerOutcome:
    """Drive the environment from v toward x_r over at most h steps.

    Solves the horizon-L QP and executes its first action for L = h..1; if a
    QP cannot be solved at all the loop stops early and the outcome is
    marked failed. The trajectory contains the transitions actually executed
    and ``reached`` is the final real state.
    """
    spec = env.spec
    s = np.asarray(v, dtype=float).ravel()
    z_r = to_affine(x_r)
    transitions: list[Transition] = []
    failed = False
    warm: Array | None = None
    for L in range(h, 0, -1):
        try:
            acts = solve_qp(
                to_affine(s), z_r, L, dd.G_affine, dd.H_affine, weights, spec,
                soft_state=True, warm_start=warm,
            )
        except (QpInfeasibleError, QpSolverError, np.linalg.LinAlgError):
            failed = True
            break
        a0 = np.clip(acts[0], spec.action_lower, spec.action_upper)
        res = env.step(s, a0)
        transitions.append(Transition(s=s, a=a0, r=res.r, s_next=res.s_next, done=res.done))
        s = res.s_next
        warm = acts[1:] if L > 1 else None
    return SteerOutcome(
        reached=s,
        trajectory=Trajectory(tuple(transitions)),
        feasible_steps=len(transitions),
        failed=failed,
    )

"""Dense primal active-set solver for small strictly convex QPs.

    minimize    0.5 x^T P x + q^T x
    subject to  C x <= b

P must be positive definite and the starting point feasible; both hold by
construction for the condensed MPC problems this backs. The working-set
iteration solves one dense KKT system per step and terminates at an exact
KKT point; the relative KKT residual is verified before returning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Array


class QpError(Exception):
    """Base class for QP failures."""


class QpInfeasibleError(QpError):
    """The hard-constrained problem admits no feasible point."""


class QpSolverError(QpError):
    """The iteration diverged or exceeded its budget."""


@dataclass
class QpSolution:
    x: Array
    duals: Array
    iterations: int
    kkt_residual: float


def kkt_residual(P: Array, q: Array, C: Array, b: Array, x: Array, duals: Array, relative: bool = False) -> float:
    """Max of stationarity, primal/dual feasibility, and complementarity errors.

    With relative=True the stationarity and complementarity terms are scaled
    by the magnitude of the quantities entering them, which is the meaningful
    measure for badly scaled objectives.
    """
    grad_parts = [P @ x, q]
    if C.size:
        grad_parts.append(C.T @ duals)
    r_stat = float(np.linalg.norm(sum(grad_parts), ord=np.inf))
    slack = C @ x - b if C.size else np.zeros(0)
    r_prim = max(0.0, float(slack.max())) if slack.size else 0.0
    r_dual = max(0.0, -float(duals.min())) if duals.size else 0.0
    r_comp = float(np.abs(duals * slack).max()) if slack.size else 0.0
    if relative:
        g_scale = 1.0 + max(np.linalg.norm(p, ord=np.inf) for p in grad_parts)
        r_stat /= g_scale
        if slack.size:
            r_comp /= 1.0 + float(np.abs(duals).max()) * (1.0 + float(np.abs(slack).max()))
    return max(r_stat, r_prim, r_dual, r_comp)


def _solve_working_set(P: Array, q: Array, C: Array, b: Array, working: list[int]):
    """Minimizer of the QP with the working-set rows as equalities, plus duals."""
    n = P.shape[0]
    if not working:
        return np.linalg.solve(P, -q), np.zeros(0)
    Cw = C[working]
    k = len(working)
    kkt = np.zeros((n + k, n + k))
    kkt[:n, :n] = P
    kkt[:n, n:] = Cw.T
    kkt[n:, :n] = Cw
    rhs = np.concatenate([-q, b[working]])
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:n], sol[n:]


def solve_qp_ineq(
    P: Array,
    q: Array,
    C: Array,
    b: Array,
    x0: Array,
    working0: list[int] | None = None,
    max_iter: int | None = None,
    feas_tol: float = 1e-9,
) -> QpSolution:
    """Primal active-set iteration from the feasible point x0.

    working0 optionally seeds the working set (e.g. from a previous, similar
    solve); rows not actually active at x0 are dropped before use.
    """
    x = np.asarray(x0, dtype=float).copy()
    n_con = C.shape[0]
    scale = 1.0 + (np.abs(b).max() if n_con else 0.0)
    if n_con and (C @ x - b).max() > feas_tol * scale:
        raise ValueError("starting point is infeasible")
    if max_iter is None:
        max_iter = 50 + 5 * (P.shape[0] + n_con)

    working: list[int] = []
    if working0:
        gap = b - C @ x
        working = [i for i in working0 if abs(gap[i]) <= feas_tol * scale]

    for it in range(1, max_iter + 1):
        x_eq, lam_w = _solve_working_set(P, q, C, b, working)
        p = x_eq - x
        if not np.all(np.isfinite(p)):
            raise QpSolverError("non-finite step in working-set solve")
        if np.linalg.norm(p, ord=np.inf) <= 1e-11 * (1.0 + np.linalg.norm(x, ord=np.inf)):
            if not working or lam_w.min() >= -1e-9:
                duals = np.zeros(n_con)
                if working:
                    duals[working] = np.maximum(lam_w, 0.0)
                res = kkt_residual(P, q, C, b, x_eq, duals, relative=True)
                if not np.isfinite(res) or res > 1e-6:
                    raise QpSolverError(f"relative KKT residual {res:.3e} exceeds tolerance")
                return QpSolution(x=x_eq, duals=duals, iterations=it, kkt_residual=res)
            # Drop the most negative multiplier and re-solve.
            working.pop(int(np.argmin(lam_w)))
            continue

        # Step toward the equality-constrained minimizer, stopping at the
        # first blocking constraint outside the working set.
        alpha = 1.0
        blocker = -1
        if n_con:
            Cp = C @ p
            gap = np.maximum(b - C @ x, 0.0)
            mask = np.ones(n_con, dtype=bool)
            mask[working] = False
            mask &= Cp > 1e-12 * scale
            if mask.any():
                idx = np.flatnonzero(mask)
                ratios = gap[idx] / Cp[idx]
                j = int(np.argmin(ratios))
                if ratios[j] < alpha:
                    alpha = float(ratios[j])
                    blocker = int(idx[j])
        x = x + alpha * p
        if blocker >= 0:
            working.append(blocker)
    raise QpSolverError(f"active-set iteration exceeded {max_iter} iterations")

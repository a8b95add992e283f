"""State-space coverage: fraction of uniform bins visited by a state set.

The per-dimension bin count follows the five-points-per-bin rule

    divisions = ceil((N / 5) ** (1 / d)),

so divisions**d can exceed N in higher dimensions; the nonempty-bin count
is then scaled by max(total_bins / N, 1), which caps coverage at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Array, Transition
from .envs.base import EnvSpec


@dataclass(frozen=True)
class CoverageReport:
    n_samples: int
    state_dim: int
    divisions: int
    total_bins: int
    nonempty: int
    coverage: float

    def as_record(self) -> str:
        """Flat key=value text serialization."""
        return "\n".join(
            [
                f"n_samples={self.n_samples}",
                f"state_dim={self.state_dim}",
                f"divisions={self.divisions}",
                f"total_bins={self.total_bins}",
                f"nonempty={self.nonempty}",
                f"coverage={self.coverage!r}",
            ]
        )


def divisions_for(n_samples: int, state_dim: int) -> int:
    """Per-dimension bin count for n_samples points in state_dim dimensions."""
    if n_samples <= 0:
        return 1
    v = (n_samples / 5.0) ** (1.0 / state_dim)
    # Snap near-integers before ceiling so exact powers stay exact.
    if abs(v - round(v)) < 1e-9:
        v = round(v)
    return max(1, math.ceil(v))


def bin_indices(states: Array, spec: EnvSpec, divisions: int) -> Array:
    """Flat bin index per state; outliers are clamped into the boundary bins.

    Bin edges split [lower, upper] per dimension into equal intervals, the
    upper edge inclusive in the last bin.
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    span = spec.state_upper - spec.state_lower
    rel = (states - spec.state_lower) / span
    cells = np.clip((rel * divisions).astype(int), 0, divisions - 1)
    return np.ravel_multi_index(cells.T, (divisions,) * spec.state_dim)


def coverage(states: Sequence[Array] | Array, spec: EnvSpec) -> CoverageReport:
    """Scaled nonempty-bin coverage of a state set."""
    states = np.asarray(states, dtype=float)
    if states.size == 0:
        return CoverageReport(
            n_samples=0, state_dim=spec.state_dim, divisions=1, total_bins=1, nonempty=0, coverage=0.0
        )
    n = states.shape[0]
    divisions = divisions_for(n, spec.state_dim)
    total = divisions**spec.state_dim
    nonempty = int(np.unique(bin_indices(states, spec, divisions)).size)
    cov = nonempty * max(total / n, 1.0) / total
    if cov > 1.0 + 1e-12:
        raise AssertionError(f"coverage {cov} escaped [0, 1]")
    return CoverageReport(
        n_samples=n,
        state_dim=spec.state_dim,
        divisions=divisions,
        total_bins=total,
        nonempty=nonempty,
        coverage=float(min(cov, 1.0)),
    )


def visited_states(transitions: Iterable[Transition]) -> Array:
    """All states occupied by a run: every s plus the final s_next."""
    transitions = list(transitions)
    if not transitions:
        return np.zeros((0, 0))
    rows = [t.s for t in transitions]
    rows.append(transitions[-1].s_next)
    return np.stack(rows)

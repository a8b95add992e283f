"""Shared domain types for the exploration and data-generation stack.

States and actions are plain float64 numpy arrays. The affine variant of a
state appends a constant 1 so that bias terms can be absorbed into augmented
system matrices; the two conversions below are the only sanctioned way to
move between the variants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

# Tolerance on the homogeneous coordinate when stripping an affine state.
AFFINE_TOL = 1e-12


def to_affine(s: Array) -> Array:
    """Return ``[s; 1]``, the homogeneous (affine) variant of a state."""
    s = np.asarray(s, dtype=float).ravel()
    if not np.all(np.isfinite(s)):
        raise ValueError("state contains non-finite entries")
    return np.concatenate([s, [1.0]])


def from_affine(x: Array) -> Array:
    """Strip the homogeneous coordinate of ``x = [s; 1]``.

    Rejects vectors whose last entry has drifted from 1 by more than
    AFFINE_TOL: that signals corrupted affine algebra upstream, not a
    recoverable condition.
    """
    x = np.asarray(x, dtype=float).ravel()
    if abs(x[-1] - 1.0) > AFFINE_TOL:
        raise ValueError(f"homogeneous coordinate is {x[-1]!r}, expected 1")
    return x[:-1].copy()


@dataclass(frozen=True)
class Transition:
    """A single environment interaction (s, a, r, s', done)."""

    s: Array
    a: Array
    r: float
    s_next: Array
    done: bool


@dataclass(frozen=True)
class Trajectory:
    """An ordered run of transitions produced by consecutive steps.

    Contiguity invariant: the s' of each transition equals (exactly) the s
    of the next one.
    """

    transitions: tuple[Transition, ...] = ()

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self):
        return iter(self.transitions)

    def __bool__(self) -> bool:
        return bool(self.transitions)

    @property
    def final_state(self) -> Array | None:
        return self.transitions[-1].s_next if self.transitions else None

    def validate(self) -> None:
        """Raise ValueError on the first contiguity break."""
        for k in range(len(self.transitions) - 1):
            a, b = self.transitions[k], self.transitions[k + 1]
            if not np.array_equal(a.s_next, b.s):
                raise ValueError(f"trajectory broken between entries {k} and {k + 1}")


@dataclass
class ReplayBuffer:
    """The accumulated interaction set of one exploration run."""

    env_id: str
    seed: int
    transitions: list[Transition] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.transitions)

    def extend(self, trajectory: Trajectory) -> None:
        self.transitions.extend(trajectory.transitions)

    @property
    def state_dim(self) -> int:
        if not self.transitions:
            raise ValueError("empty buffer has no state dimension")
        return self.transitions[0].s.shape[0]

    @property
    def action_dim(self) -> int:
        if not self.transitions:
            raise ValueError("empty buffer has no action dimension")
        return self.transitions[0].a.shape[0]

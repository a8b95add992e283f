"""pps: kinodynamic-RRT exploration and replay-buffer generation.

A sampling-based planner (AQR-RRT) explores a simulated environment by
steering it toward uniformly sampled target states with shrinking-horizon
model-predictive control, recording every executed transition. The
resulting fixed replay buffer, its state-space coverage, and a small wire
protocol for remote evaluation form the interface to downstream offline
policy learning.
"""

from .analysis import CoverageReport, coverage, visited_states
from .aqr import AqrConfig, AqrResult, aqr_distance, drift, gramian, nearest
from .core import (
    ReplayBuffer,
    Trajectory,
    Transition,
    from_affine,
    to_affine,
)
from .datio import BufferSummary, read_buffer, serve_env, write_buffer
from .envs import ENV_IDS, Env, EnvSpec, make_env
from .lindyn import DiscreteDynamics, LinearizedDynamics, discretize, fd_jacobians, linearize
from .planner import ExploreConfig, Tree, TreeNode, explore, extend_tree, random_rollout, sample_state
from .steer import MpcWeights, SteerOutcome, solve_qp, steer

__version__ = "0.1.0"

__all__ = [
    "AqrConfig",
    "AqrResult",
    "BufferSummary",
    "CoverageReport",
    "DiscreteDynamics",
    "Env",
    "EnvSpec",
    "ENV_IDS",
    "ExploreConfig",
    "LinearizedDynamics",
    "MpcWeights",
    "ReplayBuffer",
    "SteerOutcome",
    "Trajectory",
    "Transition",
    "Tree",
    "TreeNode",
    "aqr_distance",
    "coverage",
    "discretize",
    "drift",
    "explore",
    "extend_tree",
    "fd_jacobians",
    "from_affine",
    "gramian",
    "linearize",
    "make_env",
    "nearest",
    "random_rollout",
    "read_buffer",
    "sample_state",
    "serve_env",
    "solve_qp",
    "steer",
    "to_affine",
    "visited_states",
    "write_buffer",
]

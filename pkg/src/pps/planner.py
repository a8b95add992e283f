"""AQR-RRT exploration: grow a tree of reached states, harvest every transition.

The loop is deliberately simple: sample a uniform target state, pick the
tree node with the smallest AQR cost to it, steer the real environment from
that node toward the target for up to h steps, store the reached state as a
new node, and append the executed transitions to the replay buffer. There
is no rewiring and no goal bias; the product is the interaction data, not a
path.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .aqr import AqrConfig, nearest
from .core import Array, ReplayBuffer, Trajectory, Transition
from .envs.base import Env, EnvSpec
from .lindyn import discretize, linearize
from .steer import MpcWeights, steer


@dataclass
class TreeNode:
    """A reached state plus the trajectory of the edge from its parent."""

    id: int
    state: Array
    parent: int | None
    edge: Trajectory


@dataclass
class Tree:
    nodes: list[TreeNode]

    @classmethod
    def rooted(cls, s0: Array) -> "Tree":
        return cls(nodes=[TreeNode(id=0, state=np.asarray(s0, dtype=float), parent=None, edge=Trajectory())])

    def add(self, state: Array, parent: int, edge: Trajectory) -> TreeNode:
        node = TreeNode(id=len(self.nodes), state=np.asarray(state, dtype=float), parent=parent, edge=edge)
        self.nodes.append(node)
        return node

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class ExploreConfig:
    """Exploration run parameters.

    budget counts total environment interactions; the loop runs
    ceil(budget / h) extensions and the buffer is truncated to the budget
    exactly. aqr and weights default per environment when left None.
    """

    budget: int
    h: int = 20
    seed: int = 0
    aqr: AqrConfig | None = None
    weights: MpcWeights | None = None

    def resolved(self, spec: EnvSpec) -> "ExploreConfig":
        aqr = self.aqr if self.aqr is not None else AqrConfig.default_for(spec, self.h)
        weights = self.weights if self.weights is not None else MpcWeights.default_for(spec, self.h)
        return replace(self, aqr=aqr, weights=weights)


def sample_state(rng: np.random.Generator, spec: EnvSpec) -> Array:
    """Uniform sample of the state box."""
    return rng.uniform(spec.state_lower, spec.state_upper)


def extend_tree(env: Env, tree: Tree, x_r: Array, cfg: ExploreConfig) -> tuple[TreeNode | None, Trajectory]:
    """One tree extension toward x_r.

    Partial (failed) steers with a nonempty trajectory still store the
    reached state as a node; an empty trajectory stores nothing and returns
    (None, empty).
    """
    cfg = cfg.resolved(env.spec)
    lin = linearize(env, x_r)
    v = nearest(tree, x_r, cfg.aqr, lin)
    dd = discretize(lin, env.spec.dt)
    outcome = steer(env, v.state, x_r, cfg.h, dd, cfg.weights)
    if not outcome.trajectory:
        return None, outcome.trajectory
    node = tree.add(outcome.reached, v.id, outcome.trajectory)
    return node, outcome.trajectory


def explore(env: Env, cfg: ExploreConfig) -> tuple[Tree, ReplayBuffer]:
    """Run the exploration loop until the interaction budget is filled.

    Reproducible: the same seed yields bitwise-identical buffers. The final
    trajectory may overshoot the budget by less than h; the buffer is
    truncated to exactly cfg.budget (the tree keeps the full edge).
    """
    cfg = cfg.resolved(env.spec)
    rng = np.random.default_rng(cfg.seed)
    tree = Tree.rooted(env.reset(cfg.seed))
    buffer = ReplayBuffer(env_id=env.id, seed=cfg.seed)
    while len(buffer) < cfg.budget:
        x_r = sample_state(rng, env.spec)
        _, trajectory = extend_tree(env, tree, x_r, cfg)
        buffer.extend(trajectory)
    del buffer.transitions[cfg.budget :]
    return tree, buffer


def random_rollout(env: Env, budget: int, seed: int = 0, episode_steps: int = 500) -> ReplayBuffer:
    """Undirected-exploration baseline: uniform random actions, episodic.

    Episodes restart from the initial state every `episode_steps` steps and
    on termination, matching how undirected learning agents interact with
    these benchmarks.
    """
    rng = np.random.default_rng(seed)
    s = env.reset(seed)
    k = 0
    buffer = ReplayBuffer(env_id=env.id, seed=seed)
    for _ in range(budget):
        a = rng.uniform(env.spec.action_lower, env.spec.action_upper)
        res = env.step(s, a)
        buffer.transitions.append(Transition(s=s, a=a, r=res.r, s_next=res.s_next, done=res.done))
        s = res.s_next
        k += 1
        if res.done or k >= episode_steps:
            s = env.reset(seed)
            k = 0
    return buffer

"""Offline training loop: a fixed dataset in, a policy and learning curve out.

The replay buffer is fixed: no experience is added or removed during the
entire run; the environment is touched only by evaluation rollouts through
the wire-protocol client.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from .data import Dataset
from .envclient import EnvClient
from .sac import SacAgent


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 200_000
    alpha: float = 0.1  # fixed entropy coefficient, never auto-tuned
    batch_size: int = 256
    gamma: float = 0.99
    tau: float = 0.005
    lr: float = 3e-4
    hidden: int = 64
    eval_interval: int = 10_000
    eval_episodes: int = 5
    episode_length: int = 200
    seed: int = 0


@dataclass(frozen=True)
class EvalPoint:
    step: int
    median_return: float
    q25: float
    q75: float

    @property
    def iqr(self) -> float:
        return self.q75 - self.q25


@dataclass
class TrainResult:
    agent: SacAgent
    curve: list[EvalPoint] = field(default_factory=list)


def evaluate(agent: SacAgent, client: EnvClient, episodes: int, episode_length: int, seed: int = 0):
    """Median return and quartiles of deterministic-policy rollouts.

    Each episode starts from reset and runs episode_length steps or until
    the environment reports done; returns are undiscounted sums of the raw
    environment rewards.
    """
    returns = []
    for episode in range(episodes):
        s = client.reset(seed + episode)
        total = 0.0
        for _ in range(episode_length):
            a = agent.actor.act_deterministic(torch.tensor(s, dtype=torch.float32).unsqueeze(0))
            s, r, done = client.step(a.squeeze(0).numpy())
            total += r
            if done:
                break
        returns.append(total)
    q25, med, q75 = np.percentile(returns, [25, 50, 75])
    return float(med), float(q25), float(q75), returns


def train(dataset: Dataset, cfg: TrainConfig, client: EnvClient | None = None) -> TrainResult:
    """Run cfg.steps SAC gradient steps on the fixed dataset.

    When a client is provided, the policy is evaluated every eval_interval
    steps (and once more after the last step); without one, no environment
    interaction happens at all.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    # Tiny networks lose badly to thread-sync overhead on CPU.
    torch.set_num_threads(1)
    torch.manual_seed(cfg.seed)
    generator = torch.Generator().manual_seed(cfg.seed)
    agent = SacAgent(
        dataset.state_dim,
        dataset.action_dim,
        *(_action_bounds(dataset, client)),
        alpha=cfg.alpha,
        gamma=cfg.gamma,
        tau=cfg.tau,
        lr=cfg.lr,
        hidden=cfg.hidden,
    )
    result = TrainResult(agent=agent)

    def run_eval(step):
        if client is None:
            return
        med, q25, q75, _ = evaluate(agent, client, cfg.eval_episodes, cfg.episode_length, seed=cfg.seed)
        result.curve.append(EvalPoint(step=step, median_return=med, q25=q25, q75=q75))

    for step in range(1, cfg.steps + 1):
        agent.update(dataset.sample(cfg.batch_size, generator))
        if cfg.eval_interval and step % cfg.eval_interval == 0:
            run_eval(step)
    if cfg.steps == 0 or not cfg.eval_interval or cfg.steps % cfg.eval_interval != 0:
        run_eval(cfg.steps)
    return result


def _action_bounds(dataset: Dataset, client: EnvClient | None):
    """Action box from the served spec when available, else from the data."""
    if client is not None:
        spec = client.spec()
        return np.asarray(spec["action_lower"]), np.asarray(spec["action_upper"])
    lo = dataset.a.min(dim=0).values.numpy()
    hi = dataset.a.max(dim=0).values.numpy()
    pad = 1e-6 + 0.0 * lo
    return lo - pad, hi + pad


def write_curve(path: str, curve: list[EvalPoint]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,median,q25,q75\n")
        for point in curve:
            fh.write(f"{point.step},{point.median_return!r},{point.q25!r},{point.q75!r}\n")

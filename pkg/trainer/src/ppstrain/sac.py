"""Soft actor-critic pieces: squashed-Gaussian actor, twin critics, one update.

The entropy coefficient is a fixed constant (no auto-tuning): tuning it
against a fixed buffer was unstable, so the whole stack treats alpha as a
hyperparameter. Actor hidden layers use tanh activations; the critics use
ReLU.

The twin critics (and their targets) are stored as stacked parameters with
a leading dimension of 2 and evaluated with batched matmuls; on CPU this
halves the per-update op count, which dominates the runtime at these tiny
network sizes.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class Actor(nn.Module):
    """Tanh-squashed Gaussian policy scaled to the action box."""

    def __init__(self, state_dim: int, action_dim: int, action_low, action_high, hidden: int = 64):
        super().__init__()
        self.body = nn.Sequential(
            nn.Linear(state_dim, hidden), nn.Tanh(),
            nn.Linear(hidden, hidden), nn.Tanh(),
        )
        self.mean_head = nn.Linear(hidden, action_dim)
        self.log_std_head = nn.Linear(hidden, action_dim)
        low = torch.as_tensor(action_low, dtype=torch.float32)
        high = torch.as_tensor(action_high, dtype=torch.float32)
        self.register_buffer("scale", (high - low) / 2.0)
        self.register_buffer("bias", (high + low) / 2.0)

    def forward(self, s: torch.Tensor):
        z = self.body(s)
        mean = self.mean_head(z)
        log_std = torch.clamp(self.log_std_head(z), LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std

    def sample(self, s: torch.Tensor):
        """Reparameterized action and its log-probability under the squash."""
        mean, log_std = self(s)
        std = log_std.exp()
        noise = torch.randn_like(mean)
        u = mean + std * noise
        tanh_u = torch.tanh(u)
        a = tanh_u * self.scale + self.bias
        # log N(u; mean, std) with the tanh-squash change of variables.
        log_prob = -0.5 * noise.pow(2) - log_std - LOG_SQRT_2PI
        log_prob = log_prob - torch.log(self.scale * (1.0 - tanh_u.pow(2)) + 1e-6)
        return a, log_prob.sum(dim=-1, keepdim=True)

    @torch.no_grad()
    def act_deterministic(self, s: torch.Tensor) -> torch.Tensor:
        mean, _ = self(s)
        return torch.tanh(mean) * self.scale + self.bias


class TwinCritic(nn.Module):
    """Two independent Q networks evaluated in one batched-matmul pass."""

    def __init__(self, state_dim: int, action_dim: int, hidden: int = 64):
        super().__init__()
        in_dim = state_dim + action_dim
        def stack(fan_in, fan_out):
            # nn.Linear default init, applied independently per twin.
            bound = 1.0 / math.sqrt(fan_in)
            w = torch.empty(2, fan_in, fan_out).uniform_(-bound, bound)
            b = torch.empty(2, 1, fan_out).uniform_(-bound, bound)
            return nn.Parameter(w), nn.Parameter(b)

        self.w1, self.b1 = stack(in_dim, hidden)
        self.w2, self.b2 = stack(hidden, hidden)
        self.w3, self.b3 = stack(hidden, 1)

    def forward(self, s: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        """Q values with shape (2, batch, 1)."""
        x = torch.cat([s, a], dim=-1).unsqueeze(0).expand(2, -1, -1)
        h = torch.relu(torch.baddbmm(self.b1, x, self.w1))
        h = torch.relu(torch.baddbmm(self.b2, h, self.w2))
        return torch.baddbmm(self.b3, h, self.w3)

    def min_q(self, s: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        return self(s, a).min(dim=0).values


class Critic(nn.Module):
    """Single Q network (kept for probing/tests; training uses TwinCritic)."""

    def __init__(self, state_dim: int, action_dim: int, hidden: int = 64):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(state_dim + action_dim, hidden), nn.ReLU(),
            nn.Linear(hidden, hidden), nn.ReLU(),
            nn.Linear(hidden, 1),
        )

    def forward(self, s: torch.Tensor, a: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([s, a], dim=-1))


class SacAgent:
    """Twin-critic SAC with a fixed entropy coefficient."""

    def __init__(
        self,
        state_dim: int,
        action_dim: int,
        action_low,
        action_high,
        alpha: float = 0.1,
        gamma: float = 0.99,
        tau: float = 0.005,
        lr: float = 3e-4,
        hidden: int = 64,
    ):
        self.alpha = alpha
        self.gamma = gamma
        self.tau = tau
        self.actor = Actor(state_dim, action_dim, action_low, action_high, hidden)
        self.critic = TwinCritic(state_dim, action_dim, hidden)
        self.critic_target = TwinCritic(state_dim, action_dim, hidden)
        self.critic_target.load_state_dict(self.critic.state_dict())
        for p in self.critic_target.parameters():
            p.requires_grad_(False)
        self.actor_opt = torch.optim.Adam(self.actor.parameters(), lr=lr, foreach=True)
        self.critic_opt = torch.optim.Adam(self.critic.parameters(), lr=lr, foreach=True)
        self._live = list(self.critic.parameters())
        self._target = list(self.critic_target.parameters())

    def update(self, batch) -> dict:
        s, a, r, s_next, done = batch
        r = r.unsqueeze(-1)
        done = done.unsqueeze(-1)

        with torch.no_grad():
            a_next, logp_next = self.actor.sample(s_next)
            q_next = self.critic_target.min_q(s_next, a_next)
            target = r + self.gamma * (1.0 - done) * (q_next - self.alpha * logp_next)

        q_both = self.critic(s, a)
        critic_loss = (q_both - target.unsqueeze(0)).pow(2).mean(dim=(1, 2)).sum()
        self.critic_opt.zero_grad(set_to_none=True)
        critic_loss.backward()
        self.critic_opt.step()

        a_pi, logp_pi = self.actor.sample(s)
        q_pi = self.critic.min_q(s, a_pi)
        actor_loss = (self.alpha * logp_pi - q_pi).mean()
        self.actor_opt.zero_grad(set_to_none=True)
        actor_loss.backward()
        self.actor_opt.step()

        with torch.no_grad():
            torch._foreach_mul_(self._target, 1.0 - self.tau)
            torch._foreach_add_(self._target, self._live, alpha=self.tau)

        return {"critic_loss": float(critic_loss.detach()), "actor_loss": float(actor_loss.detach())}

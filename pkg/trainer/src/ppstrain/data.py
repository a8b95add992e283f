"""Fixed-dataset loading from pps-buffer v1 files.

The file format is the producer's external interface: a `# pps-buffer v1`
magic line, key=value header lines (env, d, m, count, seed, reward_mean,
reward_std), a blank line, then one CSV row per transition
(s..., a..., r, s'..., done). Rewards are stored raw; this loader applies
the header's normalization, r <- (r - mean) / std, once at load time.
The dataset is immutable afterwards: training must never write to it.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
import torch

MAGIC = "# pps-buffer v1"


@dataclass(frozen=True)
class Dataset:
    env_id: str
    seed: int
    reward_mean: float
    reward_std: float
    s: torch.Tensor
    a: torch.Tensor
    r: torch.Tensor  # normalized
    s_next: torch.Tensor
    done: torch.Tensor

    def __len__(self) -> int:
        return self.s.shape[0]

    @property
    def state_dim(self) -> int:
        return self.s.shape[1]

    @property
    def action_dim(self) -> int:
        return self.a.shape[1]

    def sample(self, batch_size: int, generator: torch.Generator):
        idx = torch.randint(len(self), (batch_size,), generator=generator)
        return self.s[idx], self.a[idx], self.r[idx], self.s_next[idx], self.done[idx]

    def content_hash(self) -> str:
        """Fingerprint of every tensor byte; training must not change it."""
        digest = hashlib.sha256()
        for t in (self.s, self.a, self.r, self.s_next, self.done):
            digest.update(t.numpy().tobytes())
        return digest.hexdigest()


def load_buffer(path: str, expect_dims: tuple[int, int] | None = None) -> Dataset:
    """Parse a pps-buffer v1 file and normalize its rewards.

    Raises ValueError on a bad magic line, missing header keys, malformed
    rows, a row-count mismatch, or (when expect_dims is given) a dimension
    mismatch. A degenerate reward_std of 0 maps every reward to 0 with a
    warning.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"{path}: unsupported format (expected '{MAGIC}')")
    header: dict[str, str] = {}
    body_at = len(lines)
    for i, line in enumerate(lines[1:], start=1):
        if line == "":
            body_at = i + 1
            break
        key, _, value = line.partition("=")
        header[key] = value
    for key in ("env", "d", "m", "count", "seed", "reward_mean", "reward_std"):
        if key not in header:
            raise ValueError(f"{path}: header is missing '{key}'")
    d, m = int(header["d"]), int(header["m"])
    count = int(header["count"])
    if expect_dims is not None and count and (d, m) != expect_dims:
        raise ValueError(f"{path}: dimensions ({d}, {m}) do not match expected {expect_dims}")

    rows = [line for line in lines[body_at:] if line != ""]
    if len(rows) != count:
        raise ValueError(f"{path}: header promises {count} rows, found {len(rows)}")
    width = 2 * d + m + 2
    data = np.zeros((count, width))
    for i, row in enumerate(rows):
        parts = row.split(",")
        if len(parts) != width:
            raise ValueError(f"{path}: malformed row {i + 1}")
        data[i] = [float(p) for p in parts]

    mean = float(header["reward_mean"])
    std = float(header["reward_std"])
    raw_r = data[:, d + m]
    if std == 0.0:
        if count:
            warnings.warn(f"{path}: degenerate reward_std=0, all rewards mapped to 0")
        r = np.zeros_like(raw_r)
    else:
        r = (raw_r - mean) / std

    as_t = lambda x: torch.tensor(x, dtype=torch.float32)
    return Dataset(
        env_id=header["env"],
        seed=int(header["seed"]),
        reward_mean=mean,
        reward_std=std,
        s=as_t(data[:, :d]),
        a=as_t(data[:, d : d + m]),
        r=as_t(r),
        s_next=as_t(data[:, d + m + 1 : 2 * d + m + 1]),
        done=as_t(data[:, -1]),
    )

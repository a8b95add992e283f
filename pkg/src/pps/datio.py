"""Replay-buffer persistence and the environment wire protocol.

Buffer file format (text, full round-trip precision)::

    # pps-buffer v1
    env=doubleint
    d=2
    m=1
    count=3
    seed=0
    reward_mean=0.5
    reward_std=0.25

    s0,...,s{d-1},a0,...,a{m-1},r,sp0,...,sp{d-1},done

with one CSV row per transition and done in {0, 1}. Rewards are stored raw;
the header carries their mean and population standard deviation so a
consumer can normalize on load. reward_std=0 flags degenerate statistics.

Wire protocol: newline-delimited JSON objects, one request per line and one
response per line, over stdio or a local TCP socket. Requests carry a
"type" of reset/step/spec/close; malformed input yields an error response
and the connection stays usable.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import dataclass

import numpy as np

from .core import ReplayBuffer, Transition
from .envs.base import Env

MAGIC = "# pps-buffer v1"


@dataclass(frozen=True)
class BufferSummary:
    env_id: str
    state_dim: int
    action_dim: int
    count: int
    seed: int
    reward_mean: float
    reward_std: float

    @property
    def degenerate(self) -> bool:
        return self.reward_std == 0.0


def _fmt(x: float) -> str:
    return repr(float(x))


def write_buffer(buffer: ReplayBuffer, path: str) -> BufferSummary:
    """Write a buffer to `path`; returns the header summary.

    Raises ValueError on inconsistent transition dimensions. An empty buffer
    produces a header-only file with degenerate statistics.
    """
    if buffer.transitions:
        d = buffer.state_dim
        m = buffer.action_dim
        for i, t in enumerate(buffer.transitions):
            if t.s.shape != (d,) or t.s_next.shape != (d,) or t.a.shape != (m,):
                raise ValueError(f"transition {i} has inconsistent dimensions")
        rewards = np.array([t.r for t in buffer.transitions])
        mean = float(rewards.mean())
        std = float(rewards.std())  # population std: D is a fixed finite set
    else:
        d = m = 0
        mean = std = 0.0
    summary = BufferSummary(
        env_id=buffer.env_id, state_dim=d, action_dim=m,
        count=len(buffer.transitions), seed=buffer.seed,
        reward_mean=mean, reward_std=std,
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MAGIC + "\n")
        fh.write(f"env={summary.env_id}\n")
        fh.write(f"d={summary.state_dim}\n")
        fh.write(f"m={summary.action_dim}\n")
        fh.write(f"count={summary.count}\n")
        fh.write(f"seed={summary.seed}\n")
        fh.write(f"reward_mean={_fmt(summary.reward_mean)}\n")
        fh.write(f"reward_std={_fmt(summary.reward_std)}\n")
        fh.write("\n")
        for t in buffer.transitions:
            fields = (
                [_fmt(v) for v in t.s]
                + [_fmt(v) for v in t.a]
                + [_fmt(t.r)]
                + [_fmt(v) for v in t.s_next]
                + [str(int(t.done))]
            )
            fh.write(",".join(fields) + "\n")
    return summary


def read_buffer(path: str) -> tuple[ReplayBuffer, BufferSummary]:
    """Exact inverse of write_buffer.

    Raises ValueError on an unsupported version, a malformed row (named by
    number), or truncation (named by the last good row).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"{path}: not a pps-buffer v1 file")
    header: dict[str, str] = {}
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        if line == "":
            body_at = i + 1
            break
        key, _, value = line.partition("=")
        header[key] = value
    required = ("env", "d", "m", "count", "seed", "reward_mean", "reward_std")
    missing = [k for k in required if k not in header]
    if missing:
        raise ValueError(f"{path}: header is missing {missing}")
    d = int(header["d"])
    m = int(header["m"])
    count = int(header["count"])
    summary = BufferSummary(
        env_id=header["env"], state_dim=d, action_dim=m, count=count,
        seed=int(header["seed"]),
        reward_mean=float(header["reward_mean"]), reward_std=float(header["reward_std"]),
    )
    buffer = ReplayBuffer(env_id=summary.env_id, seed=summary.seed)
    rows = lines[body_at:] if body_at is not None else []
    width = 2 * d + m + 2
    for row_no, row in enumerate(rows, start=1):
        if row == "":
            continue
        parts = row.split(",")
        if len(parts) != width or parts[-1] not in ("0", "1"):
            raise ValueError(f"{path}: malformed row {row_no}")
        try:
            vals = [float(p) for p in parts[:-1]]
        except ValueError as exc:
            raise ValueError(f"{path}: malformed row {row_no}") from exc
        buffer.transitions.append(
            Transition(
                s=np.array(vals[:d]),
                a=np.array(vals[d : d + m]),
                r=vals[d + m],
                s_next=np.array(vals[d + m + 1 :]),
                done=parts[-1] == "1",
            )
        )
    if len(buffer.transitions) != count:
        raise ValueError(
            f"{path}: expected {count} rows, last good row was {len(buffer.transitions)}"
        )
    return buffer, summary


def _spec_payload(env: Env) -> dict:
    spec = env.spec
    return {
        "type": "spec",
        "d": spec.state_dim,
        "m": spec.action_dim,
        "state_lower": list(spec.state_lower),
        "state_upper": list(spec.state_upper),
        "action_lower": list(spec.action_lower),
        "action_upper": list(spec.action_upper),
        "dt": spec.dt,
    }


def _handle(env: Env, state, line: str):
    """Returns (response dict, new held state, closing flag)."""
    try:
        req = json.loads(line)
        if not isinstance(req, dict):
            raise ValueError("request must be an object")
        kind = req.get("type")
        if kind == "reset":
            state = env.reset(int(req.get("seed", 0)))
            return {"type": "state", "s": list(state)}, state, False
        if kind == "step":
            if state is None:
                raise ValueError("step before reset")
            res = env.step(state, np.asarray(req["action"], dtype=float))
            return (
                {"type": "step_result", "s_next": list(res.s_next), "r": res.r, "done": res.done},
                res.s_next,
                False,
            )
        if kind == "spec":
            return _spec_payload(env), state, False
        if kind == "close":
            return {"type": "ack"}, state, True
        raise ValueError(f"unknown request type {kind!r}")
    except Exception as exc:  # malformed input must not kill the connection
        return {"type": "error", "message": str(exc)}, state, False


def serve_env(env: Env, rfile, wfile) -> None:
    """Serve one connection's request stream until close or EOF."""
    state = None
    for line in rfile:
        line = line.strip()
        if not line:
            continue
        response, state, closing = _handle(env, state, line)
        wfile.write(json.dumps(response) + "\n")
        wfile.flush()
        if closing:
            return


def serve_stdio(env: Env) -> None:
    serve_env(env, sys.stdin, sys.stdout)


def serve_tcp(env: Env, port: int, announce=print) -> None:
    """Bind a local TCP socket, announce the port, and serve one connection."""
    with socket.create_server(("127.0.0.1", port)) as srv:
        announce(f"port={srv.getsockname()[1]}")
        conn, _ = srv.accept()
        with conn, conn.makefile("r") as rfile, conn.makefile("w") as wfile:
            serve_env(env, rfile, wfile)

"""Client for the newline-delimited-JSON environment protocol.

Talks to a served environment either by spawning the server command as a
subprocess (stdio transport) or by connecting to a local TCP port. Every
request gets exactly one response; protocol errors surface as EnvProtocolError.
The client counts its `step` calls so callers can prove how many environment
interactions an experiment consumed.
"""

from __future__ import annotations

import json
import shlex
import socket
import subprocess

import numpy as np


class EnvProtocolError(RuntimeError):
    pass


class EnvClient:
    def __init__(self, rfile, wfile, closer=None):
        self._rfile = rfile
        self._wfile = wfile
        self._closer = closer
        self.step_calls = 0
        self._spec = None

    @classmethod
    def spawn(cls, command: str | list[str]) -> "EnvClient":
        """Start the server command and talk to it over its stdio."""
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1)

        def closer():
            proc.stdin.close()
            proc.wait(timeout=30)

        return cls(proc.stdout, proc.stdin, closer)

    @classmethod
    def connect(cls, host: str, port: int) -> "EnvClient":
        conn = socket.create_connection((host, port))
        rfile = conn.makefile("r")
        wfile = conn.makefile("w")

        def closer():
            rfile.close()
            wfile.close()
            conn.close()

        return cls(rfile, wfile, closer)

    def _request(self, payload: dict) -> dict:
        self._wfile.write(json.dumps(payload) + "\n")
        self._wfile.flush()
        line = self._rfile.readline()
        if not line:
            raise EnvProtocolError("server closed the connection")
        response = json.loads(line)
        if response.get("type") == "error":
            raise EnvProtocolError(response.get("message", "unknown server error"))
        return response

    def spec(self) -> dict:
        if self._spec is None:
            response = self._request({"type": "spec"})
            if response.get("type") != "spec":
                raise EnvProtocolError(f"expected spec, got {response}")
            self._spec = response
        return self._spec

    def reset(self, seed: int = 0) -> np.ndarray:
        response = self._request({"type": "reset", "seed": seed})
        if response.get("type") != "state":
            raise EnvProtocolError(f"expected state, got {response}")
        return np.asarray(response["s"], dtype=float)

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        self.step_calls += 1
        response = self._request({"type": "step", "action": np.asarray(action, dtype=float).tolist()})
        if response.get("type") != "step_result":
            raise EnvProtocolError(f"expected step_result, got {response}")
        return np.asarray(response["s_next"], dtype=float), float(response["r"]), bool(response["done"])

    def close(self) -> None:
        try:
            self._request({"type": "close"})
        finally:
            if self._closer is not None:
                self._closer()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

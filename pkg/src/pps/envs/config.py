"""Plain-text key-value configuration for the environments.

Schema: one ``<env>.<key> = <float>`` assignment per line; blank lines and
``#`` comments are ignored. Keys must match a known environment parameter
(see defaults.cfg for the full set). User configs are merged over the
shipped defaults, user values winning.
"""

from __future__ import annotations

import importlib.resources


def parse_config_text(text: str) -> dict[str, float]:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if "." not in key:
            raise ValueError(f"config line {lineno}: keys must look like '<env>.<name>'")
        try:
            values[key] = float(value.strip())
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: non-numeric value {value.strip()!r}") from exc
    return values


def load_config(path: str) -> dict[str, float]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def default_config() -> dict[str, float]:
    text = importlib.resources.files("pps.envs").joinpath("defaults.cfg").read_text()
    return parse_config_text(text)


def env_params(env_id: str, config: dict[str, float] | None = None) -> dict[str, float]:
    """Parameters for one environment: shipped defaults overlaid with ``config``."""
    merged = default_config()
    unknown = sorted(set(config or {}) - set(merged))
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    merged.update(config or {})
    prefix = env_id + "."
    return {k[len(prefix):]: v for k, v in merged.items() if k.startswith(prefix)}

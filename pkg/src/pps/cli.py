"""Command-line frontend: explore, coverage, serve.

Exit codes: 0 success, 2 usage error, 3 runtime error. All outputs are
deterministic given flags and seeds, so reruns reproduce files byte for
byte.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import coverage, visited_states
from .datio import read_buffer, serve_stdio, serve_tcp, write_buffer
from .envs import ENV_IDS, load_config, make_env
from .planner import ExploreConfig, explore


@dataclass
class RunManifest:
    env_id: str
    seeds: list[int]
    budget: int
    horizon: int
    out_dir: str
    buffer_paths: dict[int, str]
    coverage_paths: dict[int, str]


def _parse_seeds(text: str) -> list[int]:
    """Either a count ('10' -> seeds 0..9) or an explicit list ('0,3,7')."""
    if "," in text:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    n = int(text)
    return list(range(n))


def _load_config_arg(path: str | None) -> dict[str, float] | None:
    path = path or os.environ.get("PPS_CONFIG")
    return load_config(path) if path else None


def cmd_explore(args) -> int:
    config = _load_config_arg(args.config)
    seeds = _parse_seeds(args.seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    manifest = RunManifest(
        env_id=args.env, seeds=seeds, budget=args.budget, horizon=args.horizon,
        out_dir=str(out), buffer_paths={}, coverage_paths={},
    )
    covs = {}
    for seed in seeds:
        env = make_env(args.env, config)
        _, buffer = explore(env, ExploreConfig(budget=args.budget, h=args.horizon, seed=seed))
        buffer_path = out / f"{args.env}-seed{seed}.buffer"
        write_buffer(buffer, str(buffer_path))
        report = coverage(visited_states(buffer.transitions), env.spec)
        cov_path = out / f"coverage-seed{seed}.txt"
        cov_path.write_text(f"env={args.env}\nseed={seed}\n" + report.as_record() + "\n")
        manifest.buffer_paths[seed] = str(buffer_path)
        manifest.coverage_paths[seed] = str(cov_path)
        covs[seed] = report.coverage
        print(f"seed={seed} transitions={len(buffer)} coverage={report.coverage:.4f}")

    values = np.array([covs[s] for s in seeds])
    q25, med, q75 = (float(v) for v in np.percentile(values, [25, 50, 75]))
    (out / "coverage.csv").write_text(
        "seed,coverage\n" + "".join(f"{s},{covs[s]!r}\n" for s in seeds)
    )
    (out / "summary.txt").write_text(
        f"env={args.env}\n"
        f"seeds={','.join(str(s) for s in seeds)}\n"
        f"budget={args.budget}\n"
        f"horizon={args.horizon}\n"
        f"coverage_median={med!r}\n"
        f"coverage_q25={q25!r}\n"
        f"coverage_q75={q75!r}\n"
        f"coverage_iqr={q75 - q25!r}\n"
    )
    (out / "manifest.txt").write_text(
        f"env={args.env}\n"
        f"budget={args.budget}\n"
        f"horizon={args.horizon}\n"
        f"seeds={','.join(str(s) for s in seeds)}\n"
        + "".join(f"buffer_{s}={manifest.buffer_paths[s]}\n" for s in seeds)
        + "".join(f"coverage_{s}={manifest.coverage_paths[s]}\n" for s in seeds)
    )
    print(f"coverage_median={med:.4f} iqr={q75 - q25:.4f}")
    return 0


def cmd_coverage(args) -> int:
    buffer, summary = read_buffer(args.buffer)
    config = _load_config_arg(args.config)
    env = make_env(summary.env_id, config)
    report = coverage(visited_states(buffer.transitions), env.spec)
    print(f"env={summary.env_id}")
    print(report.as_record())
    return 0


def cmd_serve(args) -> int:
    config = _load_config_arg(args.config)
    env = make_env(args.env, config)
    if args.tcp is not None:
        serve_tcp(env, args.tcp)
    else:
        serve_stdio(env)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explore", help="run exploration, export buffers + coverage")
    p.add_argument("--env", required=True, choices=ENV_IDS)
    p.add_argument("--seeds", default="1", help="seed count or comma-separated list")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("coverage", help="coverage report of a stored buffer")
    p.add_argument("buffer")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("serve", help="serve an environment over stdio or TCP")
    p.add_argument("--env", required=True, choices=ENV_IDS)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--stdio", action="store_true", default=True)
    group.add_argument("--tcp", type=int, default=None, metavar="PORT")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command line: train a policy offline from a buffer file, write the curve.

The environment used for evaluation rollouts is reached through the wire
protocol; pass the full server command (spawned as a subprocess) or a TCP
endpoint.
"""

from __future__ import annotations

import argparse
import sys

from .data import load_buffer
from .envclient import EnvClient
from .train import TrainConfig, train, write_curve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppstrain", description=__doc__)
    parser.add_argument("--buffer", required=True, help="pps-buffer v1 file")
    parser.add_argument("--out", required=True, help="learning-curve CSV path")
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--alpha", type=float, default=0.1)
    parser.add_argument("--eval-interval", type=int, default=10_000)
    parser.add_argument("--eval-episodes", type=int, default=5)
    parser.add_argument("--episode-length", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--env-cmd", help="server command to spawn, e.g. 'python3 -m pps serve --env doubleint --stdio'")
    group.add_argument("--tcp", metavar="HOST:PORT", help="connect to a running server")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        dataset = load_buffer(args.buffer)
        cfg = TrainConfig(
            steps=args.steps,
            alpha=args.alpha,
            batch_size=args.batch_size,
            eval_interval=args.eval_interval,
            eval_episodes=args.eval_episodes,
            episode_length=args.episode_length,
            seed=args.seed,
        )
        if args.env_cmd:
            client = EnvClient.spawn(args.env_cmd)
        else:
            host, _, port = args.tcp.partition(":")
            client = EnvClient.connect(host, int(port))
        with client:
            result = train(dataset, cfg, client)
        write_curve(args.out, result.curve)
        if result.curve:
            final = result.curve[-1]
            print(f"final step={final.step} median_return={final.median_return:.3f} iqr={final.iqr:.3f}")
        return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

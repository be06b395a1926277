"""Command-line entry point.

    quadnn train   --data <container> --beta 0.2 --epochs 30 --seed 0 --out runs/a \
                   [--lr 1e-3] [--batch-size 16] [--base-channels 64]
    quadnn predict --data <container> --checkpoint runs/a/checkpoint.pt --out pred/a
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .container import ContainerError
from .network import NetworkSpec
from .training import (
    TrainConfig,
    load_checkpoint,
    predict,
    summarize_history,
    train,
)


def cmd_train(args) -> int:
    cfg = TrainConfig(
        learning_rate=args.lr,
        momentum=args.momentum,
        epochs=args.epochs,
        batch_size=args.batch_size,
        beta=args.beta,
        seed=args.seed,
    )
    spec = NetworkSpec(base_channels=args.base_channels)
    _, history = train(args.data, cfg, spec, out_dir=args.out)
    summary = summarize_history(history)
    (Path(args.out) / "summary.json").write_text(json.dumps(summary, indent=1))
    print(
        f"trained {cfg.epochs} epochs: loss {summary['first_loss']:.6f} -> "
        f"{summary['final_loss']:.6f}; checkpoint in {args.out}"
    )
    return 0


def cmd_predict(args) -> int:
    model = load_checkpoint(args.checkpoint)
    predictions = predict(model, args.data, out_dir=args.out)
    print(f"wrote {predictions.shape[0]} predictions to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadnn")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train on an ispds-1 container")
    tr.add_argument("--data", required=True)
    tr.add_argument("--beta", type=float, default=0.2)
    tr.add_argument("--epochs", type=int, default=30)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--out", required=True)
    tr.add_argument("--lr", type=float, default=5e-6)
    tr.add_argument("--momentum", type=float, default=0.99)
    tr.add_argument("--batch-size", type=int, default=16, dest="batch_size")
    tr.add_argument("--base-channels", type=int, default=64, dest="base_channels")
    tr.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="predict contrasts for a container")
    pr.add_argument("--data", required=True)
    pr.add_argument("--checkpoint", required=True)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())

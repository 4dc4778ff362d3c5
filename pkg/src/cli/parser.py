"""Argument parser for the ``paxkit`` command line."""

from __future__ import annotations

import argparse
from typing import Any

from matching.average_precision import PROTOCOLS
from training.inference import DECODERS
from utils.logger.config import LogLevel
from verify import SUITES

GLOBAL_OPTIONS = ("command", "log_dir", "log_stdout", "log_level", "log_json")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _class_list(text: str) -> list[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    if not names:
        raise argparse.ArgumentTypeError("expected a comma-separated list of class names")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paxkit", description="Point-axis oriented object detection toolkit.")
    parser.add_argument("--log-dir", default=None, help="base log directory (default: $PAXKIT_LOG_DIR or ./logs)")
    parser.add_argument("--log-stdout", action="store_true", help="mirror log records to stdout")
    parser.add_argument("--log-level", default="info", choices=[m.name.lower() for m in LogLevel])
    parser.add_argument("--log-json", action="store_true", help="write the run log as JSON lines (.jsonl)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    synth = sub.add_parser("synth", help="generate seeded synthetic scenes")
    synth.add_argument("--out", required=True)
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--n-images", type=int, default=8)
    synth.add_argument("--max-objects", type=_positive_int, default=4)
    synth.add_argument("--height", type=_positive_int, default=64)
    synth.add_argument("--width", type=_positive_int, default=64)
    synth.add_argument("--split", choices=["train", "val"], default="train")
    synth.add_argument("--classes", type=_class_list, default=None, help="comma-separated class names")

    train = sub.add_parser("train", help="train the detector on a scene directory")
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--config", default=None, help="flat YAML run config (default: packaged default.yaml)")
    train.add_argument("--val-data", default=None)
    train.add_argument("--epochs", type=int, default=None)
    train.add_argument("--threads", type=_positive_int, default=None)

    evaluate = sub.add_parser("eval", help="score a checkpoint with rotated-box AP")
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--data", required=True)
    evaluate.add_argument("--iou", type=float, default=0.5)
    evaluate.add_argument("--protocol", choices=PROTOCOLS, default="voc12")
    evaluate.add_argument("--out", default=None)
    evaluate.add_argument("--threads", type=_positive_int, default=1)
    evaluate.add_argument("--decoder", choices=DECODERS, default="point_axis")

    check = sub.add_parser("verify", help="run the oracle suites")
    check.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    check.add_argument("--quick", action="store_true", help="reduced trial counts")
    check.add_argument("--seed", type=int, default=None)

    demo = sub.add_parser("axis-demo", help="print the axis label of one direction")
    demo.add_argument("--theta", type=float, required=True, help="direction in degrees")
    demo.add_argument("--n-bins", type=int, default=360)
    demo.add_argument("--sigma", type=float, default=6.0)
    demo.add_argument("--csv", dest="csv_path", default=None)
    return parser


def command_kwargs(args: argparse.Namespace) -> dict[str, Any]:
    """Namespace minus the global options, ready to pass to the command."""

    return {k: v for k, v in vars(args).items() if k not in GLOBAL_OPTIONS}

"""Score a checkpoint on a scene directory with rotated-box AP."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

import msgspec

from data.scene_dir import load_scene_dir
from detector.checkpoint import load_model
from matching.average_precision import PROTOCOLS, average_precision, format_ap_table
from matching.dump import read_detections, write_detections
from model.records import APResult
from training.inference import DECODERS, detect_all, ground_truth_records
from utils.errors import CheckpointMismatch, UsageError
from utils.logger.logger import Logger
from utils.model_parser import model_parser

DETECTIONS = "detections.txt"
REPORT_TEXT = "ap.txt"
REPORT_JSON = "ap.json"


def metric_name(iou_threshold: float) -> str:
    """``0.5`` -> ``mAP50``, ``0.75`` -> ``mAP75``."""

    return f"mAP{round(iou_threshold * 100)}"


def report_payload(result: APResult) -> dict[str, Any]:
    payload = model_parser(result)
    payload[metric_name(result.iou_threshold)] = result.mean_ap
    return payload


async def run(
    *,
    checkpoint: Optional[str],
    data: Optional[str],
    iou: float = 0.5,
    protocol: str = "voc12",
    out: Optional[str] = None,
    threads: int = 1,
    decoder: str = "point_axis",
    logger: Logger,
) -> APResult:
    """Detect on every scene, write the dump, re-read it and report AP as text and JSON.

    The reported numbers are computed from the dump as written, so re-scoring
    the dump later reproduces them exactly.

    :param checkpoint: Checkpoint written by ``train``.
    :param data: Scene directory to evaluate on.
    :param iou: Rotated IoU threshold.
    :param protocol: ``voc07``, ``voc12`` or ``coco101``.
    :param out: Output directory; the checkpoint's directory when omitted.
    :param threads: Detection workers.
    :param decoder: ``point_axis`` or the ``min_area`` baseline.
    :param logger: Logger injected by the command runner.
    :raises CheckpointMismatch: If the checkpoint is unreadable or its classes do not fit the data.
    """

    if not checkpoint or not data:
        raise UsageError("eval requires --checkpoint and --data")
    if protocol not in PROTOCOLS:
        raise UsageError(f"unknown protocol '{protocol}', expected one of {', '.join(PROTOCOLS)}")
    if decoder not in DECODERS:
        raise UsageError(f"unknown decoder '{decoder}', expected one of {', '.join(DECODERS)}")
    if not 0.0 < iou <= 1.0:
        raise UsageError(f"--iou must lie in (0, 1], got {iou}")
    if threads < 1:
        raise UsageError(f"--threads must be >= 1, got {threads}")

    model, run_cfg = load_model(checkpoint)
    scene_set = load_scene_dir(data)
    classes = scene_set.classes
    if len(classes) != run_cfg.model.n_classes:
        raise CheckpointMismatch(
            f"checkpoint predicts {run_cfg.model.n_classes} classes, {data} has {len(classes)}"
        )

    out_dir = Path(out) if out else Path(checkpoint).parent
    logger.info(f"detecting on {len(scene_set.scenes)} scenes with {threads} thread(s), decoder={decoder}")
    detections = detect_all(model, scene_set.scenes, classes, threads=threads, decoder=decoder)
    dump = write_detections(out_dir / DETECTIONS, detections)
    logger.info(f"wrote {len(detections)} detections to {dump}")

    result = average_precision(read_detections(dump), ground_truth_records(scene_set.scenes), iou, protocol)
    table = format_ap_table(result)
    (out_dir / REPORT_TEXT).write_text(table + "\n", encoding="utf-8")
    encoded = msgspec.json.encode(report_payload(result))
    (out_dir / REPORT_JSON).write_bytes(msgspec.json.format(encoded, indent=2) + b"\n")
    logger.info(f"{metric_name(iou)}={result.mean_ap:.4f} ({protocol})")
    print(table)
    return result

"""Rotated-box average precision under the VOC07, VOC12 and COCO-101 protocols.

Detections of one class are ranked by ``(score desc, image id, input index)``
and matched greedily against the ground truth of their image: the detection
takes the ground truth it overlaps most; it is a true positive when that
overlap reaches the threshold and the ground truth is still free. Difficult
ground truth neither counts toward recall nor penalises the detection that
hits it.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from geometry.boxes import rotated_iou_matrix
from model.records import APResult, DetectionRecord, GroundTruthRecord
from utils.errors import UnknownProtocol

PROTOCOLS = ("voc07", "voc12", "coco101")


def _precision_envelope(recall: np.ndarray, precision: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    return mrec, mpre


def _sampled_ap(recall: np.ndarray, precision: np.ndarray, n_points: int) -> float:
    ap = 0.0
    for t in np.linspace(0.0, 1.0, n_points):
        reached = recall >= t - 1e-12
        ap += float(np.max(precision[reached])) if np.any(reached) else 0.0
    return ap / n_points


def pr_curve_ap(recall: np.ndarray, precision: np.ndarray, protocol: str) -> float:
    """Area under a precision-recall curve.

    :param recall: Cumulative recall per ranked detection.
    :param precision: Cumulative precision per ranked detection.
    :param protocol: ``voc07`` (11-point), ``voc12`` (all points) or ``coco101`` (101-point).
    :raises UnknownProtocol: For any other protocol name.
    """

    if protocol not in PROTOCOLS:
        raise UnknownProtocol(f"unknown AP protocol '{protocol}', expected one of {', '.join(PROTOCOLS)}")
    if recall.size == 0:
        return 0.0
    if protocol == "voc07":
        return _sampled_ap(recall, precision, 11)
    mrec, mpre = _precision_envelope(recall, precision)
    if protocol == "coco101":
        return _sampled_ap(mrec[1:-1], mpre[1:-1], 101)
    steps = np.where(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


def _greedy_match(
    detections: list[tuple[int, DetectionRecord]],
    ground_truth: list[GroundTruthRecord],
    iou_threshold: float,
) -> list[tuple[int, Optional[bool]]]:
    by_image: dict[str, list[GroundTruthRecord]] = defaultdict(list)
    for gt in ground_truth:
        by_image[gt.image_id].append(gt)

    ranked = sorted(detections, key=lambda item: (-item[1].score, item[1].image_id, item[0]))
    overlaps = {
        image_id: rotated_iou_matrix([d.box for _, d in ranked if d.image_id == image_id], [gt.box for gt in gts])
        for image_id, gts in by_image.items()
    }
    row_of: dict[str, int] = defaultdict(int)
    taken = {image_id: np.zeros(len(gts), dtype=bool) for image_id, gts in by_image.items()}

    outcome: list[tuple[int, Optional[bool]]] = []
    for index, det in ranked:
        gts = by_image.get(det.image_id)
        if not gts:
            outcome.append((index, False))
            continue
        row = overlaps[det.image_id][row_of[det.image_id]]
        row_of[det.image_id] += 1
        best = int(np.argmax(row))
        if row[best] < iou_threshold:
            outcome.append((index, False))
        elif gts[best].difficult:
            outcome.append((index, None))
        elif taken[det.image_id][best]:
            outcome.append((index, False))
        else:
            taken[det.image_id][best] = True
            outcome.append((index, True))
    return outcome


def classify_detections(
    detections: Sequence[DetectionRecord], ground_truth: Sequence[GroundTruthRecord], iou_threshold: float = 0.5
) -> list[Optional[bool]]:
    """Per detection, in input order: ``True`` (TP), ``False`` (FP) or ``None`` (hit a difficult GT)."""

    flags: list[Optional[bool]] = [None] * len(detections)
    by_class: dict[str, list[tuple[int, DetectionRecord]]] = defaultdict(list)
    for index, det in enumerate(detections):
        by_class[det.category].append((index, det))
    for category, dets in by_class.items():
        gts = [gt for gt in ground_truth if gt.category == category]
        for index, flag in _greedy_match(dets, gts, iou_threshold):
            flags[index] = flag
    return flags


def _class_ap(
    detections: list[tuple[int, DetectionRecord]],
    ground_truth: list[GroundTruthRecord],
    iou_threshold: float,
    protocol: str,
) -> tuple[float, int]:
    n_positive = sum(1 for gt in ground_truth if not gt.difficult)
    if n_positive == 0:
        return 0.0, 0
    flags = [flag for _, flag in _greedy_match(detections, ground_truth, iou_threshold) if flag is not None]
    tp = np.asarray(flags, dtype=np.float64)
    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(1.0 - tp)
    recall = tp_cum / n_positive
    precision = tp_cum / np.maximum(tp_cum + fp_cum, np.finfo(np.float64).eps)
    return pr_curve_ap(recall, precision, protocol), n_positive


def average_precision(
    detections: Sequence[DetectionRecord],
    ground_truth: Sequence[GroundTruthRecord],
    iou_threshold: float = 0.5,
    protocol: str = "voc12",
) -> APResult:
    """Per-class AP and their mean over classes with non-difficult ground truth.

    :param detections: Detections in any order; input position breaks score ties.
    :param ground_truth: Ground-truth boxes of every evaluated image.
    :param iou_threshold: Minimum rotated IoU for a true positive.
    :param protocol: ``voc07``, ``voc12`` or ``coco101``.
    :return: AP per class present in either list; mAP over classes with positives.
    :raises UnknownProtocol: For an unrecognised protocol.
    """

    if protocol not in PROTOCOLS:
        raise UnknownProtocol(f"unknown AP protocol '{protocol}', expected one of {', '.join(PROTOCOLS)}")
    dets_by_class: dict[str, list[tuple[int, DetectionRecord]]] = defaultdict(list)
    for index, det in enumerate(detections):
        dets_by_class[det.category].append((index, det))
    gts_by_class: dict[str, list[GroundTruthRecord]] = defaultdict(list)
    for gt in ground_truth:
        gts_by_class[gt.category].append(gt)

    per_class: dict[str, float] = {}
    n_ground_truth: dict[str, int] = {}
    for category in sorted(set(dets_by_class) | set(gts_by_class)):
        ap, n_positive = _class_ap(dets_by_class[category], gts_by_class[category], iou_threshold, protocol)
        per_class[category] = ap
        n_ground_truth[category] = n_positive

    scored = [per_class[c] for c, n in n_ground_truth.items() if n > 0]
    mean_ap = float(np.mean(scored)) if scored else 0.0
    return APResult(
        per_class=per_class,
        mean_ap=mean_ap,
        protocol=protocol,
        iou_threshold=iou_threshold,
        n_ground_truth=n_ground_truth,
        n_detections=len(detections),
    )


def ap_table(result: APResult) -> pd.DataFrame:
    """Per-class AP as a frame with a trailing ``mAP`` row."""

    frame = pd.DataFrame(
        {
            "class": list(result.per_class),
            "n_gt": [result.n_ground_truth.get(c, 0) for c in result.per_class],
            "AP": list(result.per_class.values()),
        }
    )
    summary = pd.DataFrame({"class": ["mAP"], "n_gt": [sum(result.n_ground_truth.values())], "AP": [result.mean_ap]})
    return pd.concat([frame, summary], ignore_index=True)


def format_ap_table(result: APResult) -> str:
    header = f"protocol={result.protocol} iou={result.iou_threshold:g} detections={result.n_detections}"
    return header + "\n" + ap_table(result).to_string(index=False, float_format=lambda v: f"{v:.4f}")

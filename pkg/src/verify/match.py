"""Matching oracles: Hungarian against permutation brute force, AP fixtures and false-positive monotonicity."""

from __future__ import annotations

import itertools

import numpy as np

import matching
from model.geometry import OrientedBox
from model.records import DetectionRecord, GroundTruthRecord, PropertyResult
from verify.common import DEFAULT_SEED, check, result, suite_rng

NAMESPACE = 4
EXACT_TOLERANCE = 1e-9
AP_TOLERANCE = 1e-6


def brute_force_assignment(costs: np.ndarray) -> float:
    """Minimum total cost over every injective assignment of the smaller side."""

    if costs.shape[0] > costs.shape[1]:
        costs = costs.T
    rows, cols = costs.shape
    perms = np.array(list(itertools.permutations(range(cols), rows)))
    return float(costs[np.arange(rows), perms].sum(axis=1).min())


def hungarian_property(trials: int, max_size: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(trials):
        rows, cols = rng.integers(1, max_size + 1, size=2)
        costs = rng.uniform(0.0, 10.0, size=(rows, cols))
        if rng.uniform() < 0.3:
            costs = np.round(costs)
        pairs = matching.hungarian(costs)
        total = float(sum(costs[r, c] for r, c in pairs))
        short = abs(len(pairs) - min(rows, cols))
        used_twice = len({r for r, _ in pairs}) != len(pairs) or len({c for _, c in pairs}) != len(pairs)
        errors.append(max(abs(total - brute_force_assignment(costs)), float(short), float(used_twice)))
    return result("hungarian_vs_brute_force", errors, EXACT_TOLERANCE, detail=f"matrices up to {max_size}x{max_size}")


def hungarian_fixture() -> PropertyResult:
    costs = np.array([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])
    return check("hungarian_3x3_fixture", matching.hungarian(costs) == [(0, 1), (1, 0), (2, 2)])


def _square(cx: float, cy: float, side: float = 4.0) -> OrientedBox:
    return OrientedBox(cx, cy, side, side, 0.0)


def ap_fixtures() -> list[PropertyResult]:
    gts = [
        GroundTruthRecord("img", "plane", _square(10.0, 10.0)),
        GroundTruthRecord("img", "plane", _square(30.0, 30.0)),
    ]
    dets = [
        DetectionRecord("img", "plane", 0.9, _square(10.0, 10.0)),
        DetectionRecord("img", "plane", 0.8, _square(50.0, 50.0)),
        DetectionRecord("img", "plane", 0.7, _square(30.0, 30.0)),
    ]
    hand = matching.average_precision(dets, gts, 0.5, "voc12").mean_ap
    perfect = [DetectionRecord(gt.image_id, gt.category, 1.0, gt.box) for gt in gts]
    return [
        result("ap_hand_fixture_voc12", [abs(hand - 5.0 / 6.0)], AP_TOLERANCE),
        check("ap_perfect_is_one", all(matching.average_precision(perfect, gts, 0.5, p).mean_ap == 1.0 for p in matching.PROTOCOLS)),
        check("ap_empty_is_zero", all(matching.average_precision([], gts, 0.5, p).mean_ap == 0.0 for p in matching.PROTOCOLS)),
    ]


def random_evaluation_set(rng: np.random.Generator) -> tuple[list[DetectionRecord], list[GroundTruthRecord]]:
    """A few images of two classes with jittered hits, duplicates, strays and difficult objects."""

    gts: list[GroundTruthRecord] = []
    dets: list[DetectionRecord] = []
    for image in range(3):
        image_id = f"img{image}"
        for category in ("plane", "ship"):
            for _ in range(int(rng.integers(0, 4))):
                box = OrientedBox(
                    cx=rng.uniform(10.0, 90.0),
                    cy=rng.uniform(10.0, 90.0),
                    w=rng.uniform(4.0, 12.0),
                    h=rng.uniform(4.0, 12.0),
                    theta=rng.uniform(0.0, np.pi / 2.0),
                )
                gts.append(GroundTruthRecord(image_id, category, box, int(rng.uniform() < 0.2)))
                for _ in range(int(rng.integers(0, 3))):
                    jitter = rng.normal(scale=1.0, size=3)
                    hit = OrientedBox(box.cx + jitter[0], box.cy + jitter[1], box.w, box.h, box.theta + 0.05 * abs(jitter[2]))
                    dets.append(DetectionRecord(image_id, category, round(float(rng.uniform()), 2), hit))
            for _ in range(int(rng.integers(0, 3))):
                stray = OrientedBox(rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0), 6.0, 6.0, rng.uniform(0.0, np.pi / 2.0))
                dets.append(DetectionRecord(image_id, category, round(float(rng.uniform()), 2), stray))
    order = rng.permutation(len(dets))
    return [dets[i] for i in order], gts


def ap_monotonicity_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    """Dropping one false positive never lowers AP under any protocol."""

    errors = []
    for _ in range(trials):
        dets, gts = random_evaluation_set(rng)
        false_positives = [i for i, flag in enumerate(matching.classify_detections(dets, gts, 0.5)) if flag is False]
        if not false_positives:
            continue
        drop = int(rng.choice(false_positives))
        kept = dets[:drop] + dets[drop + 1 :]
        for protocol in matching.PROTOCOLS:
            before = matching.average_precision(dets, gts, 0.5, protocol).mean_ap
            after = matching.average_precision(kept, gts, 0.5, protocol).mean_ap
            errors.append(max(before - after - 1e-12, 0.0))
    return result("ap_false_positive_monotonicity", errors, 0.0, detail="AP drop after removing a false positive")


def run(quick: bool = False, seed: int = DEFAULT_SEED) -> list[PropertyResult]:
    rng = suite_rng(seed, NAMESPACE)
    trials, max_size, ap_trials = (100, 5, 20) if quick else (1000, 7, 200)
    return [
        hungarian_property(trials, max_size, rng),
        hungarian_fixture(),
        *ap_fixtures(),
        ap_monotonicity_property(ap_trials, rng),
    ]

"""Shared helpers for the oracle suites."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from model.records import PropertyResult

DEFAULT_SEED = 20240


def suite_rng(seed: int, namespace: int) -> np.random.Generator:
    """Independent generator per suite so suites can run alone or together with the same draws."""

    return np.random.default_rng(np.random.SeedSequence([seed, namespace]))


def result(name: str, errors: Iterable[float], tolerance: float, detail: str = "") -> PropertyResult:
    """Fold per-trial errors into a :class:`PropertyResult`.

    A NaN error counts as a failure.
    """

    values = [float(e) for e in errors]
    worst = max(values, default=0.0)
    if any(math.isnan(v) for v in values):
        worst = math.nan
    passed = not math.isnan(worst) and worst <= tolerance
    return PropertyResult(name=name, passed=passed, worst_error=worst, tolerance=tolerance, trials=len(values), detail=detail)


def check(name: str, ok: bool, detail: str = "") -> PropertyResult:
    """Single boolean fixture as a property with zero tolerance."""

    return PropertyResult(name=name, passed=bool(ok), worst_error=0.0 if ok else 1.0, tolerance=0.0, trials=1, detail=detail)

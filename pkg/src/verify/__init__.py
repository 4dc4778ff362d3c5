"""Oracle suites behind ``paxkit verify``.

Each suite returns :class:`PropertyResult` records; nothing here raises on a
failing property, callers decide via :func:`failing`.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

from model.records import PropertyResult
from utils.errors import UsageError
from verify import codec, geom, grad, match
from verify.common import DEFAULT_SEED

QUICK_GRAD_TRIALS = 5


def _grad(quick: bool, seed: int) -> list[PropertyResult]:
    return grad.run(trials=QUICK_GRAD_TRIALS if quick else 100, seed=seed)


SUITES: dict[str, Callable[[bool, int], list[PropertyResult]]] = {
    "grad": _grad,
    "geom": lambda quick, seed: geom.run(quick=quick, seed=seed),
    "codec": lambda quick, seed: codec.run(quick=quick, seed=seed),
    "match": lambda quick, seed: match.run(quick=quick, seed=seed),
}


def resolve_suites(name: str) -> list[str]:
    """``all`` expands to every suite in a fixed order."""

    if name == "all":
        return list(SUITES)
    if name not in SUITES:
        raise UsageError(f"unknown suite '{name}', expected one of {', '.join([*SUITES, 'all'])}")
    return [name]


def run_suites(names: Iterable[str], quick: bool = False, seed: int = DEFAULT_SEED) -> dict[str, list[PropertyResult]]:
    return {name: SUITES[name](quick, seed) for name in names}


def failing(report: dict[str, list[PropertyResult]]) -> list[str]:
    return [r.name for results in report.values() for r in results if not r.passed]


def _fmt(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.3e}"


def format_report(report: dict[str, list[PropertyResult]]) -> str:
    """One line per property and a closing summary line."""

    lines = []
    for suite, results in report.items():
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            line = f"{status} {suite}.{r.name} worst={_fmt(r.worst_error)} tol={r.tolerance:.1e} trials={r.trials}"
            lines.append(f"{line} {r.detail}".rstrip())
    total = sum(len(results) for results in report.values())
    failed = len(failing(report))
    summary = f"{total - failed}/{total} properties passed"
    if "grad" in report:
        grad_errors = [r.worst_error for r in report["grad"]]
        summary += f", max gradient error {_fmt(max(grad_errors, default=0.0))}"
    lines.append(summary)
    return "\n".join(lines)


__all__ = ["SUITES", "failing", "format_report", "resolve_suites", "run_suites"]

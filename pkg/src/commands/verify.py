"""Run the oracle suites and print a pass/fail report."""

from __future__ import annotations

from typing import Optional

import verify
from configs.env_config import Env
from model.records import PropertyResult
from utils.errors import VerificationFailed
from utils.logger.logger import Logger
from utils.misc import Stopwatch
from verify.common import DEFAULT_SEED


async def run(
    *,
    suite: str = "all",
    quick: bool = False,
    seed: Optional[int] = None,
    logger: Logger,
) -> dict[str, list[PropertyResult]]:
    """Run ``suite`` (or every suite for ``all``) and print one line per property.

    :param suite: ``grad``, ``geom``, ``codec``, ``match`` or ``all``.
    :param quick: Smaller trial counts for smoke runs.
    :param seed: Root seed; ``PAXKIT_SEED`` or the built-in default when omitted.
    :param logger: Logger injected by the command runner.
    :raises UsageError: For an unknown suite name.
    :raises VerificationFailed: If any property fails; the report is printed first.
    """

    names = verify.resolve_suites(suite)
    if seed is None:
        seed = Env.seed()
    if seed is None:
        seed = DEFAULT_SEED

    report = {}
    for name in names:
        watch = Stopwatch()
        logger.info(f"suite {name} started (quick={quick}, seed={seed})")
        report.update(verify.run_suites([name], quick=quick, seed=seed))
        logger.info(f"suite {name} finished in {watch.elapsed_ms:.0f} ms")
    print(verify.format_report(report))

    failed = verify.failing(report)
    if failed:
        logger.error(f"{len(failed)} properties failed: {', '.join(failed)}")
        raise VerificationFailed(failed)
    return report

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from utils.errors import NonFiniteCost


def hungarian(costs) -> list[tuple[int, int]]:
    """Minimum-total-cost assignment of ``min(rows, cols)`` pairs.

    :param costs: ``(rows, cols)`` finite cost matrix (rows are predictions).
    :return: ``(row, col)`` pairs sorted by row.
    :raises NonFiniteCost: If any entry is NaN or infinite.
    """

    matrix = np.asarray(costs, dtype=np.float64)
    if matrix.ndim != 2:
        raise NonFiniteCost(f"cost matrix must be 2-D, got shape {matrix.shape}")
    if matrix.size == 0:
        return []
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteCost("cost matrix contains NaN or infinite entries")
    rows, cols = linear_sum_assignment(matrix)
    return [(int(r), int(c)) for r, c in zip(rows, cols)]

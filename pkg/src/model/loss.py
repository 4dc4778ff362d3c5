from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class LossOutput:
    """Scalar loss value with same-shape gradients for each differentiable input.

    ``gradients`` is keyed by input name (``points``, ``axis_logits``,
    ``class_logits`` ...); ``terms`` holds named partial values for reporting.
    """

    value: float
    gradients: dict[str, np.ndarray] = field(default_factory=dict)
    terms: dict[str, float] = field(default_factory=dict)

"""Training loop for the desk-scale detector.

Epoch 0 is an evaluation-only pass over the training scenes (no update); its
loss is the plain forward+loss average. Epochs ``1..epochs`` shuffle the scenes
with a seed-derived generator, step AdamW once per batch and write one metrics
line per epoch.
"""

from __future__ import annotations

import asyncio
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from detector.oriented_detr import OrientedDETR
from detector.optim import AdamW, clip_grad_norm, learning_rate
from model.config import RunConfig
from model.records import EpochMetrics, SyntheticScene
from nn.tensor import no_grad
from training.criterion import TERMS, SceneTargets, SetCriterion, prepare_targets
from training.inference import evaluate
from utils.errors import NonFiniteLoss
from utils.logger.logger import Logger
from utils.metrics import MetricsWriter
from utils.misc import Stopwatch

SHUFFLE_NAMESPACE = 2


@dataclass
class TrainResult:
    model: OrientedDETR
    history: list[EpochMetrics] = field(default_factory=list)

    @property
    def final(self) -> EpochMetrics:
        return self.history[-1]


class Trainer:
    """Fits an :class:`OrientedDETR` to a fixed list of scenes.

    :param run_cfg: Full run configuration.
    :param scenes: Training scenes.
    :param classes: Category names; index ``i`` is class id ``i``.
    :param logger: Injected command logger.
    :param val_scenes: Optional validation scenes for ``val_mAP50``.
    :param metrics: Optional writer receiving one :class:`EpochMetrics` per epoch.
    """

    def __init__(
        self,
        run_cfg: RunConfig,
        scenes: Sequence[SyntheticScene],
        classes: Sequence[str],
        logger: Logger,
        val_scenes: Optional[Sequence[SyntheticScene]] = None,
        metrics: Optional[MetricsWriter] = None,
    ):
        self.cfg = run_cfg
        self.scenes = list(scenes)
        self.classes = tuple(classes)
        self.val_scenes = list(val_scenes or [])
        self.logger = logger
        self.metrics = metrics
        self.model = OrientedDETR(run_cfg.model, run_cfg.codec, seed=run_cfg.train.seed)
        self.criterion = SetCriterion(run_cfg.loss)
        self.optimizer = AdamW(self.model.parameters(), run_cfg.optimizer)
        self.rng = np.random.default_rng(np.random.SeedSequence([run_cfg.train.seed, SHUFFLE_NAMESPACE]))
        self.targets = [self._targets(scene) for scene in self.scenes]
        self.step = 0

    def _targets(self, scene: SyntheticScene) -> SceneTargets:
        scale = float(max(scene.image.shape[0], scene.image.shape[1]))
        return prepare_targets(scene, self.classes, self.cfg.codec, scale)

    def evaluation_loss(self) -> tuple[float, dict[str, float]]:
        """Mean loss and terms over the training scenes without updating anything."""

        total, terms = 0.0, dict.fromkeys(TERMS, 0.0)
        with no_grad():
            for scene, targets in zip(self.scenes, self.targets):
                out = self.criterion(self.model(scene.image), targets)
                total += out.value
                for key in TERMS:
                    terms[key] += out.terms[key]
        n = max(1, len(self.scenes))
        return total / n, {k: v / n for k, v in terms.items()}

    def train_epoch(self, epoch: int) -> tuple[float, dict[str, float]]:
        """One pass over shuffled batches; returns the mean pre-update loss and terms.

        :raises NonFiniteLoss: If a batch loss is NaN or infinite.
        """

        lr = learning_rate(self.cfg.optimizer, epoch - 1)
        order = self.rng.permutation(len(self.scenes))
        batch_size = self.cfg.train.batch_size
        total, terms = 0.0, dict.fromkeys(TERMS, 0.0)
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            self.optimizer.zero_grad()
            batch_value = 0.0
            for i in batch:
                out = self.criterion(self.model(self.scenes[i].image), self.targets[i])
                batch_value += out.value
                for key in TERMS:
                    terms[key] += out.terms[key]
                (out.loss * (1.0 / len(batch))).backward()
            self.step += 1
            if not math.isfinite(batch_value):
                raise NonFiniteLoss(self.step, batch_value)
            total += batch_value
            clip_grad_norm(self.optimizer.params, self.cfg.optimizer.grad_clip)
            self.optimizer.step(lr)
        n = max(1, len(self.scenes))
        return total / n, {k: v / n for k, v in terms.items()}

    def _should_eval(self, epoch: int) -> bool:
        return epoch == 0 or epoch == self.cfg.train.epochs or epoch % self.cfg.train.eval_every == 0

    def _record(self, epoch: int, loss: float, terms: dict[str, float], watch: Stopwatch) -> EpochMetrics:
        map50 = map75 = val50 = None
        if self._should_eval(epoch):
            threads = self.cfg.train.threads
            results = evaluate(self.model, self.scenes, self.classes, (0.5, 0.75), threads=threads)
            map50, map75 = results[0.5].mean_ap, results[0.75].mean_ap
            if self.val_scenes:
                val50 = evaluate(self.model, self.val_scenes, self.classes, (0.5,), threads=threads)[0.5].mean_ap
        record = EpochMetrics(
            epoch=epoch,
            loss=loss,
            loss_proj=terms["proj"],
            loss_ca=terms["ca"],
            loss_cls=terms["cls"],
            loss_enc=terms["enc"],
            mAP50=map50,
            mAP75=map75,
            val_mAP50=val50,
            wall_ms=watch.elapsed_ms,
        )
        if self.metrics is not None:
            self.metrics.write(record)
        return record

    async def fit(self) -> TrainResult:
        result = TrainResult(model=self.model)
        watch = Stopwatch()
        loss, terms = self.evaluation_loss()
        result.history.append(self._record(0, loss, terms, watch))
        self.logger.info(f"epoch 0 (no update) loss={loss:.6f} mAP50={result.final.mAP50}")
        for epoch in range(1, self.cfg.train.epochs + 1):
            watch.reset()
            loss, terms = self.train_epoch(epoch)
            record = self._record(epoch, loss, terms, watch)
            result.history.append(record)
            summary = " ".join(f"{k}={v:.4f}" for k, v in terms.items())
            if record.mAP50 is not None:
                summary += f" mAP50={record.mAP50:.4f} mAP75={record.mAP75:.4f}"
            self.logger.info(f"epoch {epoch}/{self.cfg.train.epochs} loss={loss:.6f} {summary}")
            await asyncio.sleep(0)
        return result

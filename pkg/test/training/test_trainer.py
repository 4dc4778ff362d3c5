import dataclasses

import numpy as np
import pytest

from configs.run_config import load_run_config, with_overrides
from data import generate_synthetic
from detector.frame import ImageFrame
from detector.oriented_detr import OrientedDETR
from model.config import AttentionConfig, AxisCodecConfig, LossConfig, ModelConfig, OptimizerConfig, RunConfig, TrainConfig
from model.geometry import OrientedBox
from model.records import SceneParams, SyntheticScene
from training.criterion import SetCriterion, cell_targets, prepare_targets
from training.inference import DECODERS, detect, detect_all, evaluate, ground_truth_records
from training.trainer import Trainer
from utils.errors import IndexOutOfRange
from utils.metrics import MetricsWriter, read_metrics

PARAMS = SceneParams(n_images=3, height=32, width=32, max_objects=2, size_range=(8.0, 14.0))
CLASSES = PARAMS.classes


def tiny_run(epochs: int = 2, **loss) -> RunConfig:
    return RunConfig(
        model=ModelConfig(
            K=5, N=4, dim=8, n_layers=2, n_classes=3, patch_size=4, ffn_dim=16,
            attention=AttentionConfig(dim=8, n_heads=2, n_sample_points=2),
        ),
        loss=LossConfig(codec=AxisCodecConfig(n_bins=16, sigma=1.0), **loss),
        optimizer=OptimizerConfig(lr=1e-2, decay_epochs=(2,)),
        train=TrainConfig(seed=1, epochs=epochs, batch_size=2, eval_every=1),
    )


@pytest.fixture(scope="module")
def scenes():
    return generate_synthetic(4, PARAMS)


async def test_fit_writes_one_metrics_line_per_epoch(tmp_path, scenes, dummy_logger):
    metrics = MetricsWriter(tmp_path / "metrics.jsonl")
    result = await Trainer(tiny_run(), scenes, CLASSES, dummy_logger, val_scenes=scenes[:1], metrics=metrics).fit()
    assert [m.epoch for m in result.history] == [0, 1, 2]
    rows = read_metrics(tmp_path / "metrics.jsonl")
    assert [r["epoch"] for r in rows] == [0, 1, 2]
    assert all(r["mAP50"] is not None and r["val_mAP50"] is not None for r in rows)
    assert all(np.isfinite(r["loss"]) for r in rows)
    assert dummy_logger.messages("info")[0].startswith("epoch 0 (no update)")
    assert result.final is result.history[-1]


async def test_epoch_zero_is_the_untrained_loss(scenes, dummy_logger):
    result = await Trainer(tiny_run(epochs=1), scenes, CLASSES, dummy_logger).fit()
    fresh_loss, fresh_terms = Trainer(tiny_run(epochs=1), scenes, CLASSES, dummy_logger).evaluation_loss()
    assert result.history[0].loss == pytest.approx(fresh_loss)
    assert result.history[0].loss_enc == pytest.approx(fresh_terms["enc"])


async def test_training_is_reproducible(scenes, dummy_logger):
    a = await Trainer(tiny_run(), scenes, CLASSES, dummy_logger).fit()
    b = await Trainer(tiny_run(), scenes, CLASSES, dummy_logger).fit()
    assert [m.loss for m in a.history] == [m.loss for m in b.history]
    for (name, p), (_, q) in zip(a.model.named_parameters(), b.model.named_parameters()):
        assert np.array_equal(p.data, q.data), name


async def test_training_moves_the_parameters(scenes, dummy_logger):
    trainer = Trainer(tiny_run(epochs=1), scenes, CLASSES, dummy_logger)
    before = {name: p.data.copy() for name, p in trainer.model.named_parameters()}
    await trainer.fit()
    assert any(not np.array_equal(before[name], p.data) for name, p in trainer.model.named_parameters())


@pytest.mark.parametrize("loss", [{"aux_loss": False}, {"variant": "with_penalty"}, {"enc_weight": 0.0}])
def test_criterion_variants_give_finite_loss(scenes, loss):
    cfg = tiny_run(**loss)
    model = OrientedDETR(cfg.model, cfg.codec, seed=0)
    targets = prepare_targets(scenes[0], CLASSES, cfg.codec, 32.0)
    out = SetCriterion(cfg.loss)(model(scenes[0].image), targets)
    assert np.isfinite(out.value)
    out.loss.backward()
    assert any(p.grad is not None for p in model.parameters())
    if not loss.get("enc_weight", 1.0):
        assert out.terms["enc"] == 0.0


def test_empty_scene_is_all_background():
    cfg = tiny_run()
    empty = SyntheticScene(image=np.zeros((32, 32, 3)), annotations=[], seed=0, scene_id="empty")
    model = OrientedDETR(cfg.model, cfg.codec, seed=0)
    out = SetCriterion(cfg.loss)(model(empty.image), prepare_targets(empty, CLASSES, cfg.codec, 32.0))
    assert out.terms["proj"] == 0.0 and out.terms["ca"] == 0.0
    assert out.terms["cls"] > 0.0


def test_prepare_targets_rejects_unknown_categories(scenes):
    with pytest.raises(IndexOutOfRange):
        prepare_targets(scenes[0], ("tank",), AxisCodecConfig(n_bins=16), 32.0)


def test_prepare_targets_normalises_by_scale(scenes):
    targets = prepare_targets(scenes[0], CLASSES, AxisCodecConfig(n_bins=16), 32.0)
    assert len(targets.targets) == len(scenes[0].annotations)
    for target, box in zip(targets.targets, targets.boxes):
        assert target.center == pytest.approx([box.cx / 32.0, box.cy / 32.0])


def test_cell_targets():
    frame = ImageFrame(16, 16, 4, 4, 4)
    labels = cell_targets(frame, [OrientedBox(4.0, 4.0, 8.0, 8.0, 0.0)])
    assert labels.reshape(4, 4)[:2, :2].tolist() == [[0, 0], [0, 0]]
    assert (labels == 0).sum() == 4


@pytest.mark.parametrize("decoder", DECODERS)
def test_detect_one_record_per_query(scenes, decoder):
    cfg = tiny_run()
    model = OrientedDETR(cfg.model, cfg.codec, seed=0)
    dets = detect(model, scenes[0], CLASSES, decoder)
    assert len(dets) <= cfg.model.N
    assert all(d.image_id == scenes[0].scene_id and d.category in CLASSES and 0.0 < d.score < 1.0 for d in dets)


def test_threads_do_not_change_detections(scenes):
    cfg = tiny_run()
    model = OrientedDETR(cfg.model, cfg.codec, seed=0)
    one = detect_all(model, scenes, CLASSES, threads=1)
    many = detect_all(model, scenes, CLASSES, threads=3)
    assert [(d.image_id, d.score, d.box) for d in one] == [(d.image_id, d.score, d.box) for d in many]


def test_evaluate_keys_by_threshold(scenes):
    cfg = tiny_run()
    model = OrientedDETR(cfg.model, cfg.codec, seed=0)
    results = evaluate(model, scenes, CLASSES, (0.5, 0.75))
    assert set(results) == {0.5, 0.75}
    assert all(0.0 <= r.mean_ap <= 1.0 for r in results.values())
    assert len(ground_truth_records(scenes)) == sum(len(s.annotations) for s in scenes)


SWITCHES = {
    "full": {},
    "no_group_sa": {"use_group_self_attention": False},
    "no_decoupled_ca": {"use_decoupled_cross_attention": False},
    "object_queries": {"use_point_queries": False, "use_group_self_attention": False, "use_decoupled_cross_attention": False},
}


@pytest.fixture(scope="module")
def default_scenes():
    return generate_synthetic(0, SceneParams())


@pytest.mark.slow
async def test_default_config_overfits_eight_scenes(default_scenes, dummy_logger):
    cfg = load_run_config(use_env=False)
    result = await Trainer(cfg, default_scenes, SceneParams().classes, dummy_logger).fit()
    evaluated = [m for m in result.history if m.mAP50 is not None]
    assert all(np.isfinite(m.loss) for m in result.history)
    assert max(m.mAP50 for m in evaluated) >= 0.9
    assert max(m.mAP75 for m in evaluated) >= 0.5


@pytest.mark.slow
async def test_every_switch_setting_trains_and_point_queries_lead(default_scenes, dummy_logger):
    base = with_overrides(load_run_config(use_env=False), epochs=5, eval_every=5)
    losses = {}
    for name, switches in SWITCHES.items():
        cfg = dataclasses.replace(base, model=dataclasses.replace(base.model, **switches))
        result = await Trainer(cfg, default_scenes, SceneParams().classes, dummy_logger).fit()
        assert all(np.isfinite(m.loss) for m in result.history), name
        losses[name] = result.final.loss
    assert losses["full"] <= losses["object_queries"]

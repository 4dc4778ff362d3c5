"""Desk-scale Oriented DETR: patch features, top-N object queries, point queries, decoder, heads."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from detector.backbone import EncoderLayer, PatchEmbedding
from detector.decoder import ObjectDecoderLayer, PointsDecoderLayer
from detector.frame import ImageFrame
from detector.head import HeadOutput, ObjectPointsHead, PointSetHead
from detector.queries import CellScoreHead, ObjectToPointConverter, top_cells
from model.config import AxisCodecConfig, ModelConfig
from model.prediction import PointSetPrediction
from nn.encoding import position_embedding_2d
from nn.module import Module
from nn.tensor import Tensor, no_grad, take


@dataclass
class ForwardOutput:
    """Everything one forward pass produces for the loss and for inference."""

    layers: list[HeadOutput]
    cell_scores: Tensor
    selected: np.ndarray
    frame: ImageFrame
    references: list[np.ndarray] = field(default_factory=list)


class OrientedDETR(Module):
    """Point-axis detector.

    With point queries, each selected cell becomes K point queries that the
    decoder refines. The first layer offsets the converter positions with
    gradient; after every layer the references move to that layer's predicted
    points (detached) and positional embeddings are recomputed.
    Without point queries, object queries regress K points directly.
    """

    def __init__(self, cfg: ModelConfig, codec: AxisCodecConfig, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.cfg = cfg
        self.codec = codec
        self.backbone = PatchEmbedding(cfg, rng)
        self.encoder = [EncoderLayer(cfg, rng) for _ in range(cfg.encoder_layers)]
        self.score_head = CellScoreHead(cfg.dim, rng)
        if cfg.use_point_queries:
            self.converter = ObjectToPointConverter(cfg, rng)
            self.layers = [PointsDecoderLayer(cfg, rng) for _ in range(cfg.n_layers)]
            self.heads = [PointSetHead(cfg, codec.n_bins, rng) for _ in range(cfg.n_layers)]
        else:
            self.layers = [ObjectDecoderLayer(cfg, rng) for _ in range(cfg.n_layers)]
            self.heads = [ObjectPointsHead(cfg, codec.n_bins, rng) for _ in range(cfg.n_layers)]

    def features(self, image: np.ndarray) -> tuple[Tensor, ImageFrame]:
        fmap = self.backbone(image)
        for layer in self.encoder:
            fmap = layer(fmap)
        h_img, w_img = np.asarray(image).shape[:2]
        frame = ImageFrame(int(h_img), int(w_img), fmap.shape[0], fmap.shape[1], self.cfg.patch_size)
        return fmap, frame

    def forward(self, image: np.ndarray) -> ForwardOutput:
        """
        :param image: ``(H, W, in_channels)`` array.
        :return: :class:`ForwardOutput` with one :class:`HeadOutput` per decoder layer.
        :raises TooSmallInput: If the image is smaller than a patch.
        :raises NotEnoughCells: If the map has fewer than N cells.
        """

        fmap, frame = self.features(image)
        h, w, dim = fmap.shape
        tokens = fmap.reshape(h * w, dim)
        scores = self.score_head(tokens)
        selected = top_cells(scores.data, self.cfg.N)
        content = take(tokens, selected, axis=0)
        cell_refs = frame.cell_centers()[selected]
        if self.cfg.use_point_queries:
            return self._forward_points(content, cell_refs, fmap, frame, scores, selected)
        return self._forward_objects(content, cell_refs, fmap, frame, scores, selected)

    def _forward_points(self, content, cell_refs, fmap, frame, scores, selected) -> ForwardOutput:
        n, k = self.cfg.N, self.cfg.K
        positions, pos = self.converter(content, cell_refs)
        refs: Union[Tensor, np.ndarray] = positions
        x = content.reshape(n, 1, self.cfg.dim) + np.zeros((n, k, self.cfg.dim))
        outputs, references = [], []
        for layer, head in zip(self.layers, self.heads):
            ref_values = refs.data.copy() if isinstance(refs, Tensor) else refs
            references.append(ref_values)
            x = layer(x, pos, frame.to_map(ref_values), fmap)
            out = head(x, refs, pos)
            outputs.append(out)
            refs = out.points.data.copy()
            pos = Tensor(position_embedding_2d(refs, self.cfg.dim).data)
        return ForwardOutput(outputs, scores, selected, frame, references)

    def _forward_objects(self, content, cell_refs, fmap, frame, scores, selected) -> ForwardOutput:
        k = self.cfg.K
        refs = cell_refs.copy()
        x = content
        outputs, references = [], []
        for layer, head in zip(self.layers, self.heads):
            point_refs = np.repeat(refs[:, None, :], k, axis=1)
            references.append(point_refs)
            pos = Tensor(position_embedding_2d(refs, self.cfg.dim).data)
            x = layer(x, pos, frame.to_map(refs), fmap)
            out = head(x, point_refs)
            outputs.append(out)
            refs = out.points.data[:, k - 1].copy()
        return ForwardOutput(outputs, scores, selected, frame, references)

    def predict(self, image: np.ndarray) -> list[list[PointSetPrediction]]:
        """Per-layer predictions (normalised coordinates) without recording a graph."""

        with no_grad():
            out = self.forward(image)
        return [layer_predictions(layer) for layer in out.layers]


def layer_predictions(layer: HeadOutput) -> list[PointSetPrediction]:
    points = layer.points.data
    axis: Optional[np.ndarray] = layer.axis_logits.data if layer.axis_logits is not None else None
    classes = layer.class_logits.data
    return [
        PointSetPrediction(points[i], axis[i] if axis is not None else None, classes[i])
        for i in range(points.shape[0])
    ]

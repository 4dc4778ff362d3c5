from detector.checkpoint import HEADER, load_model, read_checkpoint, save_checkpoint
from detector.frame import ImageFrame
from detector.oriented_detr import ForwardOutput, OrientedDETR, layer_predictions
from detector.optim import AdamW, clip_grad_norm, learning_rate
from detector.queries import ObjectToPointConverter, select_object_queries, top_cells

__all__ = [
    "HEADER",
    "AdamW",
    "ForwardOutput",
    "ImageFrame",
    "ObjectToPointConverter",
    "OrientedDETR",
    "clip_grad_norm",
    "layer_predictions",
    "learning_rate",
    "load_model",
    "read_checkpoint",
    "save_checkpoint",
    "select_object_queries",
    "top_cells",
]

from losses.cross_axis import cross_axis_loss
from losses.focal import BACKGROUND, classification_loss
from losses.point_axis import point_axis_loss
from losses.projection import edge_projections, max_projection_loss, max_projection_variant

__all__ = [
    "BACKGROUND",
    "classification_loss",
    "cross_axis_loss",
    "edge_projections",
    "max_projection_loss",
    "max_projection_variant",
    "point_axis_loss",
]

from geometry.boxes import (
    canonical_box,
    min_area_rect,
    obb_to_polygon,
    obb_to_quad,
    quad_to_obb,
    rotated_iou,
    rotated_iou_matrix,
)
from geometry.point_axis import (
    box_to_point_axis_target,
    decode_min_area,
    decode_point_axis,
    point_axis_corners,
    quad_to_point_axis_target,
)
from geometry.polygon import convex_area, convex_clip, polygon_area

__all__ = [
    "box_to_point_axis_target",
    "canonical_box",
    "convex_area",
    "convex_clip",
    "decode_min_area",
    "decode_point_axis",
    "min_area_rect",
    "obb_to_polygon",
    "obb_to_quad",
    "point_axis_corners",
    "polygon_area",
    "quad_to_obb",
    "quad_to_point_axis_target",
    "rotated_iou",
    "rotated_iou_matrix",
]

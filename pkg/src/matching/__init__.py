from matching.average_precision import (
    PROTOCOLS,
    ap_table,
    average_precision,
    classify_detections,
    format_ap_table,
    pr_curve_ap,
)
from matching.cost import cost_matrix, matching_cost
from matching.dump import parse_detections, read_detections, write_detections
from matching.hungarian import hungarian

__all__ = [
    "PROTOCOLS",
    "ap_table",
    "average_precision",
    "classify_detections",
    "cost_matrix",
    "format_ap_table",
    "hungarian",
    "matching_cost",
    "parse_detections",
    "pr_curve_ap",
    "read_detections",
    "write_detections",
]

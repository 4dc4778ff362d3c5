from training.criterion import SceneTargets, SetCriterion, cell_targets, prepare_targets
from training.inference import detect, detect_all, evaluate, ground_truth_records
from training.trainer import TrainResult, Trainer

__all__ = [
    "SceneTargets",
    "SetCriterion",
    "TrainResult",
    "Trainer",
    "cell_targets",
    "detect",
    "detect_all",
    "evaluate",
    "ground_truth_records",
    "prepare_targets",
]

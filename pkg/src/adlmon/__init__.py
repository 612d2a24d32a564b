"""Activity modelling, behaviour recognition and emergency detection for ADL sensor data."""
from .activity_model import (
    ActivityInstance,
    AtomicActivity,
    ComplexActivityDefinition,
    ContextAttribute,
    InstanceCountSummary,
    alpha_count,
    beta_count,
    eating_lunch,
    enumerate_instances,
    gamma_count,
    goal_reached,
    instance_counts,
    instance_weight,
    load_definition,
    threshold_weight,
)
from .dataset import SensorRecord, SplitDataset, load_csv, remove_outliers, save_csv, split
from .edscca import (
    ActivityTrace,
    KnowledgeBase,
    Outcome,
    SemanticDefinition,
    TraceEvent,
    Verdict,
    classify_trace,
    edscca_decide,
    kb_insert,
    match_start,
    sdca_build,
)
from .errors import CapacityError, DatasetError, ValidationError
from .evaluation import ConfusionMatrix, accuracy, confusion, precision, recall
from .features import RecordFeaturizer
from .knn import KNNClassifier, Prediction, euclidean_distance, select_prediction
from .trace_sim import SimConfig, generate, label_trace
from .zones import Zone, ZoneMap, behavior_compatible, zones_from_dataset

__all__ = [
    "ActivityInstance",
    "ActivityTrace",
    "AtomicActivity",
    "CapacityError",
    "ComplexActivityDefinition",
    "ConfusionMatrix",
    "ContextAttribute",
    "DatasetError",
    "InstanceCountSummary",
    "KNNClassifier",
    "KnowledgeBase",
    "Outcome",
    "Prediction",
    "RecordFeaturizer",
    "SemanticDefinition",
    "SensorRecord",
    "SimConfig",
    "SplitDataset",
    "TraceEvent",
    "ValidationError",
    "Verdict",
    "Zone",
    "ZoneMap",
    "accuracy",
    "alpha_count",
    "behavior_compatible",
    "beta_count",
    "classify_trace",
    "confusion",
    "eating_lunch",
    "edscca_decide",
    "enumerate_instances",
    "euclidean_distance",
    "gamma_count",
    "generate",
    "goal_reached",
    "instance_counts",
    "instance_weight",
    "kb_insert",
    "label_trace",
    "load_csv",
    "load_definition",
    "match_start",
    "precision",
    "recall",
    "remove_outliers",
    "save_csv",
    "sdca_build",
    "select_prediction",
    "split",
    "threshold_weight",
    "zones_from_dataset",
]

__version__ = "0.1.0"

"""Neuro-fuzzy regression toolkit for seismic sand-fraction mapping.

The package turns sparse well observations of sand fraction plus seismic
attribute cubes into a calibrated predictor: fuzzy rule systems seeded by
grid partitioning or clustering and tuned with a hybrid least-squares /
gradient loop, with a small feed-forward network as the baseline. Trained
models apply trace by trace to full attribute volumes.
"""

from .builders import build_clustered, build_from_clusters, build_grid, joint_unit_points
from .clustering import ClusterResult, SubtractiveParams, fcm, kmeans, subtractive
from .data import (
    Dataset,
    Sample,
    WellSeries,
    load_dataset,
    read_locations_csv,
    read_well_csv,
    write_dataset,
)
from .errors import (
    ConfigError,
    DegenerateFiringError,
    DivergenceError,
    InputError,
    NumericError,
    OutOfRangeError,
    ParameterError,
    RuleExplosionError,
    SandfracError,
    UndefinedMetricError,
)
from .fis import (
    BellMf,
    TskModel,
    TskRule,
    bell_eval,
    bell_grad,
    design_row,
    fire_rule,
    firing_strengths,
    forward,
    infer,
    infer_batch,
    load_model,
    memberships,
    model_from_dict,
    model_to_dict,
    normalize_firing,
    refresh_outputs,
    rule_design_matrix,
    save_model,
)
from .mlp import MlpModel, load_mlp, mlp_infer, mlp_init, mlp_train, save_mlp
from .pipeline import (
    MinMaxSpec,
    ZScoreSpec,
    aem,
    cc,
    metric_bundle,
    random_split,
    resample_well,
    rmse,
    si,
    spline_resample,
    wells_to_dataset,
)
from .selection import SfsResult, SfsStage, sfs
from .synth import benchmark_mixture, generate
from .training import (
    TrainConfig,
    TrainReport,
    lse_consequents,
    premise_gradient,
    premise_step,
    train,
)
from .volume import (
    CubeGeometry,
    PropertyCube,
    SeismicCube,
    export_slice,
    load_cubes,
    median_filter_inline,
    predict_cube,
    read_cube_attribute,
    smooth_cube,
    write_cube_attribute,
)

__version__ = "0.1.0"

__all__ = [
    "BellMf",
    "ClusterResult",
    "ConfigError",
    "CubeGeometry",
    "Dataset",
    "DegenerateFiringError",
    "DivergenceError",
    "InputError",
    "MinMaxSpec",
    "MlpModel",
    "NumericError",
    "OutOfRangeError",
    "ParameterError",
    "PropertyCube",
    "RuleExplosionError",
    "Sample",
    "SandfracError",
    "SeismicCube",
    "SfsResult",
    "SfsStage",
    "SubtractiveParams",
    "TrainConfig",
    "TrainReport",
    "TskModel",
    "TskRule",
    "UndefinedMetricError",
    "WellSeries",
    "ZScoreSpec",
    "aem",
    "bell_eval",
    "bell_grad",
    "benchmark_mixture",
    "build_clustered",
    "build_from_clusters",
    "build_grid",
    "cc",
    "design_row",
    "export_slice",
    "fcm",
    "fire_rule",
    "firing_strengths",
    "forward",
    "generate",
    "infer",
    "infer_batch",
    "joint_unit_points",
    "kmeans",
    "load_cubes",
    "load_dataset",
    "load_mlp",
    "load_model",
    "lse_consequents",
    "median_filter_inline",
    "memberships",
    "metric_bundle",
    "mlp_infer",
    "mlp_init",
    "mlp_train",
    "model_from_dict",
    "model_to_dict",
    "normalize_firing",
    "predict_cube",
    "premise_gradient",
    "premise_step",
    "random_split",
    "read_cube_attribute",
    "read_locations_csv",
    "read_well_csv",
    "refresh_outputs",
    "resample_well",
    "rmse",
    "rule_design_matrix",
    "save_mlp",
    "save_model",
    "sfs",
    "si",
    "smooth_cube",
    "spline_resample",
    "subtractive",
    "train",
    "wells_to_dataset",
    "write_cube_attribute",
    "write_dataset",
]

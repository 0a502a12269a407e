"""Peer-assessment aggregation via graph convolution over a
social-ownership-assessment multigraph, with synthetic scenario generators,
reference baselines, and a Monte Carlo evaluation harness."""

from .baselines import average_predict, median_predict
from .errors import (
    DuplicateEntryError,
    PeergradeError,
    SchemaError,
    TrainingDivergedError,
    ValidationError,
)
from .graph import (
    Dataset,
    GroundTruth,
    PropagationMatrix,
    SoanGraph,
    Split,
    ValidationReport,
    build_graph,
    datasets_equal,
    from_matrices,
    graphs_equal,
    propagation_matrix,
    validate,
)
from .harness import (
    METHOD_AVERAGE,
    METHOD_GCN,
    METHOD_MEDIAN,
    METHODS,
    ExperimentReport,
    SplitConfig,
    SweepResult,
    SweepSpec,
    monte_carlo_splits,
    rmse,
    run_experiment,
    run_sweep,
)
from .io import (
    canonical_json,
    load_dataset,
    load_scenario_config,
    load_split_config,
    load_train_config,
    read_results,
    save_dataset,
    write_results,
)
from .model import (
    AdamState,
    ForwardCache,
    ModelParams,
    TrainConfig,
    adam_step,
    backward,
    forward,
    init_adam_state,
    init_params,
    initial_features,
    load_model,
    mse_loss,
    predict,
    save_model,
    train,
)
from .synthetic import (
    BiasReliabilityConfig,
    ErConfig,
    HomophilyConfig,
    MixtureConfig,
    ScenarioConfig,
    StrategicConfig,
    build_scenario,
    default_scenario,
    gen_assess_bias_reliability,
    gen_assess_strategic,
    gen_ground_truth,
    gen_ownership_one_to_one,
    gen_social_er,
    gen_social_homophily,
    strategic_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState", "BiasReliabilityConfig", "Dataset", "DuplicateEntryError",
    "ErConfig", "ExperimentReport", "ForwardCache", "GroundTruth",
    "HomophilyConfig", "METHODS", "METHOD_AVERAGE", "METHOD_GCN",
    "METHOD_MEDIAN", "MixtureConfig", "ModelParams", "PeergradeError",
    "PropagationMatrix", "ScenarioConfig", "SchemaError", "SoanGraph",
    "Split", "SplitConfig", "StrategicConfig", "SweepResult", "SweepSpec",
    "TrainConfig", "TrainingDivergedError", "ValidationError",
    "ValidationReport", "adam_step", "average_predict", "backward",
    "build_graph", "build_scenario", "canonical_json", "datasets_equal",
    "default_scenario", "forward", "from_matrices",
    "gen_assess_bias_reliability", "gen_assess_strategic",
    "gen_ground_truth", "gen_ownership_one_to_one", "gen_social_er",
    "gen_social_homophily", "graphs_equal", "init_adam_state", "init_params",
    "initial_features", "load_dataset", "load_model", "load_scenario_config",
    "load_split_config", "load_train_config", "median_predict",
    "monte_carlo_splits", "mse_loss", "predict", "propagation_matrix",
    "read_results", "rmse", "run_experiment", "run_sweep", "save_dataset",
    "save_model", "strategic_scenario", "train", "validate", "write_results",
]

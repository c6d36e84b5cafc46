"""Sequential piecewise-linear regression over binary-tree partitions.

Two collapsed mixture learners — hard fixed boundaries
(:class:`FixedTreeRegressor`) and trained soft boundaries
(:class:`AdaptiveTreeRegressor`) — reproduce, at polynomial cost, the
exact output of an explicit linear mixture over the doubly exponential
family of subtree partitions (:class:`DirectMixtureRegressor`), plus the
stream generators, baselines and benchmark harness used to exercise them.
"""

from .adaptive_tree import AdaptiveTreePrediction, AdaptiveTreeRegressor
from .baselines import GaussianKernelRegressor, LinearFilter, VolterraFilter, vf_features
from .datagen import Stream, generate, stream_to_csv
from .fixed_tree import FixedTreePrediction, FixedTreeRegressor
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    NormalizedDataset,
    RunMetrics,
    load_csv_dataset,
    run_experiment,
    run_stream,
    verify_equivalence,
)
from .mixture import (
    DirectMixtureRegressor,
    batch_best_weights,
    empirical_strong_convexity,
    model_estimate,
    regret,
)
from .nodes import NodeRegressor, NodeState, node_estimate, scaled_estimate, update_regressor
from .separators import Separator, branch_factor, evaluate, gradient, initial_directions, path_product
from .trees import (
    NodeLabel,
    Partition,
    ROOT,
    TreeShape,
    beta,
    enumerate_partitions,
    gamma,
    kappa,
    prefixes,
    rho,
    rho_table,
    span,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveTreePrediction",
    "AdaptiveTreeRegressor",
    "DirectMixtureRegressor",
    "ExperimentConfig",
    "ExperimentResult",
    "FixedTreePrediction",
    "FixedTreeRegressor",
    "GaussianKernelRegressor",
    "LinearFilter",
    "NodeLabel",
    "NodeRegressor",
    "NodeState",
    "NormalizedDataset",
    "Partition",
    "ROOT",
    "RunMetrics",
    "Separator",
    "Stream",
    "TreeShape",
    "VolterraFilter",
    "batch_best_weights",
    "beta",
    "branch_factor",
    "empirical_strong_convexity",
    "enumerate_partitions",
    "evaluate",
    "gamma",
    "generate",
    "gradient",
    "initial_directions",
    "kappa",
    "load_csv_dataset",
    "model_estimate",
    "node_estimate",
    "path_product",
    "prefixes",
    "regret",
    "rho",
    "rho_table",
    "run_experiment",
    "run_stream",
    "scaled_estimate",
    "span",
    "stream_to_csv",
    "update_regressor",
    "verify_equivalence",
    "vf_features",
]

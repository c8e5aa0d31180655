"""Design-space exploration toolkit for LUT-level approximate arithmetic."""

__version__ = "0.1.0"

from .charac import (
    BehavMetrics,
    MetricsRecord,
    PpaMetrics,
    behav_metrics,
    characterize,
    ppa_metrics,
)
from .dataset import Dataset, SamplingPlan, build_dataset, ingest_csv, save_csv
from .dse import (
    ExperimentSetup,
    GaSettings,
    ParetoFront,
    hypervolume2d,
    normalized_hypervolume,
    nsga2,
    pareto_filter,
    run_experiment,
    vpf,
)
from .errors import (
    AxkitError,
    CapacityError,
    ConfigurationError,
    DomainError,
    UndefinedCorrelationError,
    ValidationError,
)
from .estimate import Estimator, fit_estimator, load_model, predict, save_model
from .mathprog import (
    MapProblem,
    MapSolution,
    SolutionPool,
    build_pool,
    formulate,
    load_pool,
    save_pool,
    solve_exact,
    solve_heuristic,
)
from .netlist import (
    Config,
    Netlist,
    build_adder,
    build_multiplier,
    evaluate,
    evaluate_batch,
    load_netlist,
    product_table,
    save_netlist,
)
from .stats import correlation_report, multivariate_r, pearson, rank_quadratic_features

__all__ = [
    "AxkitError",
    "BehavMetrics",
    "CapacityError",
    "Config",
    "ConfigurationError",
    "Dataset",
    "DomainError",
    "Estimator",
    "ExperimentSetup",
    "GaSettings",
    "MapProblem",
    "MapSolution",
    "MetricsRecord",
    "Netlist",
    "ParetoFront",
    "PpaMetrics",
    "SamplingPlan",
    "SolutionPool",
    "UndefinedCorrelationError",
    "ValidationError",
    "behav_metrics",
    "build_adder",
    "build_dataset",
    "build_multiplier",
    "build_pool",
    "characterize",
    "correlation_report",
    "evaluate",
    "evaluate_batch",
    "fit_estimator",
    "formulate",
    "hypervolume2d",
    "ingest_csv",
    "load_model",
    "load_netlist",
    "load_pool",
    "multivariate_r",
    "normalized_hypervolume",
    "nsga2",
    "pareto_filter",
    "pearson",
    "ppa_metrics",
    "predict",
    "product_table",
    "rank_quadratic_features",
    "run_experiment",
    "save_csv",
    "save_model",
    "save_netlist",
    "save_pool",
    "solve_exact",
    "solve_heuristic",
    "vpf",
    "__version__",
]

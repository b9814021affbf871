"""Graph-symmetry analysis, symmetry-reduced QAOA simulation, and minimum-depth
prediction for MaxCut."""

__version__ = "0.1.0"

# Version stays above the imports: dataset records stamp it at import time.
from symqaoa.autgroup import (
    PermGroup,
    automorphism_generators,
    bitstring_orbits,
    group_order,
    vertex_orbits,
)
from symqaoa.dataset import (
    DatasetConfig,
    InstanceRecord,
    SplitSpec,
    load_dataset,
    run_generation,
    split_dataset,
    standard_profile,
    train_models,
)
from symqaoa.errors import (
    ConstantInputError,
    DegenerateLabelsError,
    InsufficientDataError,
    InvalidParamsError,
    NotBijectionError,
    NotInvariantError,
    ParseError,
    SearchBudgetError,
    SingularSystemError,
    SizeLimitError,
    WorkbenchError,
)
from symqaoa.features import (
    FEATURE_NAMES,
    SymmetryFeatures,
    approx_features,
    exact_features,
    feature_vector,
    graph_entropy,
)
from symqaoa.graphs import Graph, GraphFamily, generate, read_edge_list, write_edge_list
from symqaoa.mlmodel import PminPredictor, load_model, save_model
from symqaoa.reduced import (
    build_orbit_basis,
    hamming_reduced_ops,
    lift,
    quotient_dimension,
    reduce_operators,
    reduced_evolve,
    symmetry_group,
)
from symqaoa.schedules import (
    LinearSchedule,
    approx_ratio,
    find_pmin,
    max_cut_brute,
    optimize_linear,
)
from symqaoa.simulator import (
    Angles,
    CostDiagonal,
    StateVector,
    check_symmetry_conditions,
    evolve,
    expectation,
    maxcut_diagonal,
    orbit_spread,
    probabilities,
)

__all__ = [
    "__version__",
    "Angles",
    "ConstantInputError",
    "CostDiagonal",
    "DatasetConfig",
    "DegenerateLabelsError",
    "FEATURE_NAMES",
    "Graph",
    "GraphFamily",
    "InstanceRecord",
    "InsufficientDataError",
    "InvalidParamsError",
    "LinearSchedule",
    "NotBijectionError",
    "NotInvariantError",
    "ParseError",
    "PermGroup",
    "PminPredictor",
    "SearchBudgetError",
    "SingularSystemError",
    "SizeLimitError",
    "SplitSpec",
    "StateVector",
    "SymmetryFeatures",
    "WorkbenchError",
    "approx_features",
    "approx_ratio",
    "automorphism_generators",
    "bitstring_orbits",
    "build_orbit_basis",
    "check_symmetry_conditions",
    "evolve",
    "exact_features",
    "expectation",
    "feature_vector",
    "find_pmin",
    "generate",
    "graph_entropy",
    "group_order",
    "hamming_reduced_ops",
    "lift",
    "load_dataset",
    "load_model",
    "max_cut_brute",
    "maxcut_diagonal",
    "optimize_linear",
    "orbit_spread",
    "probabilities",
    "quotient_dimension",
    "read_edge_list",
    "reduce_operators",
    "reduced_evolve",
    "run_generation",
    "save_model",
    "split_dataset",
    "standard_profile",
    "symmetry_group",
    "train_models",
    "vertex_orbits",
    "write_edge_list",
]

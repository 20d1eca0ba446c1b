"""Numerical toolkit for eps-parameterized nets of smooth functions.

Estimates sharp-topology seminorms of function nets, fits ultrametric
valuations from eps-grids, classifies nets into regularity classes, and
runs the mollification/density experiments.
"""

from .scale import (
    EpsGrid,
    PowerScale,
    ScaleError,
    ValuationEstimate,
    default_grid,
    estimate_valuation,
    sample,
    scale_add,
    scale_mul,
    sharp_norm,
    valuation_exact,
)
from .nets import (
    BandedNet,
    CompactBox,
    CutoffProductNet,
    DifferenceNet,
    ExpressionNet,
    FiniteSumNet,
    FunctionNet,
    NetError,
    Sampling,
    SeminormTable,
    SharpSeminorm,
    enlarge,
    is_moderate,
    is_negligible,
    seminorm,
    seminorm_table,
    sharp_seminorm,
)
from .regularity import (
    PSequence,
    RegularityReport,
    build_report,
    classify_ginfty,
    classify_gla,
    classify_sublinear,
    growth_char_check,
    landau_check,
    null_propagation_check,
    psequence,
)
from .mollify import (
    ConvergenceRecord,
    Mollifier,
    build_mollifier,
    class_A_membership,
    convergence_experiment,
    cutoff_net,
    mollify,
    regular_bound_experiment,
)
from .catalog import (
    REFERENCE_COMPACTS,
    catalog_list,
    catalog_net,
    catalog_oracle,
)
from .config import ConfigError, ExperimentConfig, load_config, load_config_file
from .runner import RunResult, run_config

__version__ = "0.1.0"

__all__ = [
    "BandedNet",
    "CompactBox",
    "ConfigError",
    "ConvergenceRecord",
    "CutoffProductNet",
    "DifferenceNet",
    "EpsGrid",
    "ExperimentConfig",
    "ExpressionNet",
    "FiniteSumNet",
    "FunctionNet",
    "Mollifier",
    "NetError",
    "PSequence",
    "PowerScale",
    "REFERENCE_COMPACTS",
    "RegularityReport",
    "RunResult",
    "Sampling",
    "ScaleError",
    "SeminormTable",
    "SharpSeminorm",
    "ValuationEstimate",
    "build_mollifier",
    "build_report",
    "catalog_list",
    "catalog_net",
    "catalog_oracle",
    "class_A_membership",
    "classify_ginfty",
    "classify_gla",
    "classify_sublinear",
    "convergence_experiment",
    "cutoff_net",
    "default_grid",
    "enlarge",
    "estimate_valuation",
    "growth_char_check",
    "is_moderate",
    "is_negligible",
    "landau_check",
    "load_config",
    "load_config_file",
    "mollify",
    "null_propagation_check",
    "psequence",
    "regular_bound_experiment",
    "run_config",
    "sample",
    "scale_add",
    "scale_mul",
    "seminorm",
    "seminorm_table",
    "sharp_norm",
    "sharp_seminorm",
    "valuation_exact",
]

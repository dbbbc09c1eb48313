"""Finite-alphabet toolkit for capacity-distortion tradeoffs of
integrated-sensing-and-communication relay channels."""

from .backend import BACKEND
from .bounds import (
    TradeoffCurve,
    cd_class_c3,
    cd_class_c4,
    cd_class_c5,
    dmin_class_c1,
    dmin_class_c2,
    example1_family,
    example4_closed_form,
    example5_closed_form,
    example6_closed_form,
    gaussian_dmin_example2,
    gaussian_dmin_example3,
    lower_bound_cd,
    lower_bound_cmg,
    min_distortion,
    region_inclusion_check,
    tradeoff_curve,
    upper_bound_cd,
)
from .channels import (
    FACTORIES,
    RelayChannelSpec,
    StructureTags,
    assemble_joint,
    hamming,
    make_appendixC_counterexample,
    make_example1,
    make_example4,
    make_example5,
    make_example6,
    spec_from_json,
    spec_to_json,
)
from .estimator import EstimatorTable, expected_distortion, optimal_estimator
from .montecarlo import SimConfig, simulate_distortion
from .optimizer import (
    FactoredInput,
    FactorTemplate,
    OptimizerConfig,
    OptResult,
    maximize,
)
from .probability import (
    Alphabet,
    ConditionalKernel,
    JointDistribution,
    compose,
    conv,
    entropy,
    h2,
    h2_inverse,
    h3,
    mutual_information,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Alphabet",
    "ConditionalKernel",
    "EstimatorTable",
    "FACTORIES",
    "FactorTemplate",
    "FactoredInput",
    "JointDistribution",
    "OptResult",
    "OptimizerConfig",
    "RelayChannelSpec",
    "SimConfig",
    "StructureTags",
    "TradeoffCurve",
    "assemble_joint",
    "cd_class_c3",
    "cd_class_c4",
    "cd_class_c5",
    "compose",
    "conv",
    "dmin_class_c1",
    "dmin_class_c2",
    "entropy",
    "example1_family",
    "example4_closed_form",
    "example5_closed_form",
    "example6_closed_form",
    "expected_distortion",
    "gaussian_dmin_example2",
    "gaussian_dmin_example3",
    "h2",
    "h2_inverse",
    "h3",
    "hamming",
    "lower_bound_cd",
    "lower_bound_cmg",
    "make_appendixC_counterexample",
    "make_example1",
    "make_example4",
    "make_example5",
    "make_example6",
    "maximize",
    "min_distortion",
    "mutual_information",
    "optimal_estimator",
    "region_inclusion_check",
    "simulate_distortion",
    "spec_from_json",
    "spec_to_json",
    "tradeoff_curve",
    "upper_bound_cd",
    "__version__",
]

"""Causal-diagram analysis engine and estimator laboratory for
difference-in-differences designs.

The package covers the full workflow: build or load a linear causal
diagram over panel periods, compact outcome levels into change nodes,
enumerate minimal sufficient adjustment sets with an offset-aware
backdoor criterion, verify identification claims symbolically and
numerically, simulate standardized panels, run a registry of eleven
difference-in-differences estimators, map each estimator's covariate
plan to the adjustment set it actually uses, and benchmark bias across
scenarios.
"""

__version__ = "1.0.0"
SCHEMA_VERSION = "1"

from .errors import (
    AdmissibilityError,
    AssignmentError,
    CapacityError,
    ConfigError,
    CyclicGraphError,
    DidGraphError,
    EstimatorError,
    FormError,
    KernelError,
    ParseError,
    PreconditionError,
    RankDeficiencyError,
    SeparationError,
    SingularityError,
    TransformError,
    UnknownNodeError,
)
from .graph import (
    AdjustmentVerdict,
    AdjustStatus,
    CausalDiagram,
    Diagnostic,
    EdgeSpec,
    Form,
    NodeSpec,
    Role,
    backdoor_check,
    d_separated,
    minimal_sufficient_sets,
    open_paths_between,
    validate,
)
from .poly import PolyExpr, RationalExpr
from .transform import build_delta_nodes, compact
from .scm import (
    ImpliedCovariance,
    identity_check,
    implied_covariance,
    node_error_variances,
    partial_regression,
    sample_admissible,
    trek_covariance,
)
from .scenarios import SCENARIO_NAMES, ScenarioSpec, all_scenarios, get_scenario
from .panel import CovariatePlan, PanelDataset, PlanItem, plan_from_json
from .simulate import simulate
from .estimators import (
    TABLE_LABELS,
    EstimateResult,
    EstimatorKind,
    EstimatorSpec,
    estimate,
    resolve_kind,
)
from .align import EffectiveSet, classify, effective_adjustment_set, register_rule
from .bench import BenchConfig, BiasReport, analytic_bias, emit_report, run_benchmark

__all__ = [
    "__version__",
    "SCHEMA_VERSION",
    # errors
    "DidGraphError", "UnknownNodeError", "FormError", "CyclicGraphError",
    "CapacityError", "TransformError", "AdmissibilityError", "AssignmentError",
    "SingularityError", "ParseError", "KernelError", "RankDeficiencyError",
    "SeparationError", "PreconditionError", "EstimatorError", "ConfigError",
    # graph
    "Role", "Form", "AdjustStatus", "NodeSpec", "EdgeSpec", "Diagnostic",
    "AdjustmentVerdict", "CausalDiagram", "validate", "d_separated",
    "open_paths_between", "backdoor_check", "minimal_sufficient_sets",
    # algebra
    "PolyExpr", "RationalExpr",
    # transform
    "build_delta_nodes", "compact",
    # scm
    "ImpliedCovariance", "trek_covariance", "node_error_variances",
    "implied_covariance", "partial_regression", "sample_admissible",
    "identity_check",
    # scenarios / data
    "SCENARIO_NAMES", "ScenarioSpec", "get_scenario", "all_scenarios",
    "PanelDataset", "PlanItem", "CovariatePlan", "plan_from_json", "simulate",
    # estimators
    "EstimatorKind", "EstimatorSpec", "EstimateResult", "TABLE_LABELS",
    "estimate", "resolve_kind",
    # alignment
    "EffectiveSet", "effective_adjustment_set", "classify", "register_rule",
    # bench
    "BenchConfig", "BiasReport", "run_benchmark", "analytic_bias", "emit_report",
]

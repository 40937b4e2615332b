"""Cost equivalent curves for transfer-learning evaluation, plus experiment-generation tooling."""

__version__ = "0.1.0"

from .cec import CostEquivalentCurve, benefit_axis, compute_cec, savings_summary
from .errors import CostEqError, DegenerateInputError, FormatError, ParseError, PlanError, ValidationError
from .experiments import LearningCurveSeries, RunRecord, aggregate_best, parse_results_csv, to_samples
from .isotonic import Flag, IsotonicFit, MonotoneSample, fit_inverse, fit_isotonic, predict
from .mixing import MixtureSpec, mixture_rates, sample_stream, subsample_sizes
from .pipelines import HyperparamGrid, Stage, TransferPlan, build_plan, enumerate_grid, plan_to_jobs
from .textify import Direction, KgTriple, TaskExample, parse_example, serialize_example, serialize_kg_triple

__all__ = [
    "CostEqError",
    "CostEquivalentCurve",
    "DegenerateInputError",
    "Direction",
    "Flag",
    "FormatError",
    "HyperparamGrid",
    "IsotonicFit",
    "KgTriple",
    "LearningCurveSeries",
    "MixtureSpec",
    "MonotoneSample",
    "ParseError",
    "PlanError",
    "RunRecord",
    "Stage",
    "TaskExample",
    "TransferPlan",
    "ValidationError",
    "aggregate_best",
    "benefit_axis",
    "build_plan",
    "compute_cec",
    "enumerate_grid",
    "fit_inverse",
    "fit_isotonic",
    "mixture_rates",
    "parse_example",
    "parse_results_csv",
    "plan_to_jobs",
    "predict",
    "sample_stream",
    "savings_summary",
    "serialize_example",
    "serialize_kg_triple",
    "subsample_sizes",
    "to_samples",
]

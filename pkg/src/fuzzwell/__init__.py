"""Fuzzy wellness analyzer.

Activity-label logs in, crisp wellness percentages out: daily category
fractions are denoised with a seasonal-trend decomposition, three base
Mamdani controllers score the physical, productive and social components,
and a top controller combines them into an overall score.
"""

from ._backend import backend_name
from .dsl import (ConfigDoc, ControllerSpec, Diagnostic, DslError, RuleDecl,
                  TermDecl, VariableDecl, parse_config, serialize, validate)
from .engine import Controller, EngineError, evaluate, fire_rule, fuzzify, infer
from .fuzzy import (DEFAULT_RESOLUTION, EmptyAggregateError, FuzzyError,
                    MembershipFunction, SampledFuzzySet, Universe,
                    aggregate_max, clip, crisp, defuzzify_centroid, mf_eval,
                    s_norm_max, t_norm_min, trapezoidal, triangular)
from .ingest import (ActivityLog, CategoryDef, CategorySeries, IngestError,
                     LabelMap, MOOD_LABELS, category_series, load_user_log,
                     mood_top_k, save_user_log)
from .pipeline import (CORE_TOP_RULES, ComponentScores,
                       InsufficientCoverageError, PipelineError, StlParams,
                       WellnessPipeline, WellnessReport, build_pipeline,
                       complete_rule_base, is_monotone_table,
                       ordinal_consequent)
from .stl import (Decomposition, decompose_or_mean, loess_smooth,
                  moving_average, robustness_weights, stl_decompose)

__version__ = "0.1.0"

__all__ = [
    "ActivityLog", "CORE_TOP_RULES", "CategoryDef", "CategorySeries",
    "ComponentScores", "ConfigDoc", "Controller", "ControllerSpec",
    "DEFAULT_RESOLUTION", "Decomposition", "Diagnostic", "DslError",
    "EmptyAggregateError", "EngineError", "FuzzyError", "IngestError",
    "InsufficientCoverageError", "LabelMap", "MOOD_LABELS",
    "MembershipFunction", "PipelineError", "RuleDecl", "SampledFuzzySet",
    "StlParams", "TermDecl", "Universe", "VariableDecl", "WellnessPipeline",
    "WellnessReport", "aggregate_max", "backend_name", "build_pipeline",
    "category_series", "clip", "complete_rule_base", "crisp",
    "decompose_or_mean", "defuzzify_centroid", "evaluate", "fire_rule",
    "fuzzify", "infer", "is_monotone_table", "load_user_log", "loess_smooth",
    "mf_eval", "mood_top_k", "moving_average", "ordinal_consequent",
    "parse_config", "robustness_weights", "s_norm_max", "save_user_log",
    "serialize", "stl_decompose", "t_norm_min", "trapezoidal", "triangular",
    "validate",
]

"""Type annotation selection for a small gradually typed language."""
from .analysis import Analysis, analyze
from .flowgraph import EdgeRules, FlowGraph, build_graph
from .infer import TypeTable, infer_types
from .parser import parse, parse_prelude, parse_type
from .printer import print_program
from .resolve import BindingId, ReturnOf, points_to, resolve_names
from .selector import AnnotationSet, candidates, closest_sources, select
from .transform import VariantKind, annotate, fast_slow, make_variant

__version__ = "0.1.0"

__all__ = [
    "Analysis", "analyze", "EdgeRules", "FlowGraph", "build_graph", "TypeTable",
    "infer_types", "parse", "parse_prelude", "parse_type", "print_program",
    "BindingId", "ReturnOf", "points_to", "resolve_names", "AnnotationSet",
    "candidates", "closest_sources", "select", "VariantKind", "annotate",
    "fast_slow", "make_variant",
]

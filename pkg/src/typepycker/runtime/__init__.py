"""Cast elaboration and the cast-counting interpreter."""
from .elaborate import CastProgram, CastSite, direction, elaborate, erase
from .interp import DEFAULT_BUDGET, EVENT_KINDS, CastReport, Outcome, evaluate
from .values import plain

__all__ = [
    "CastProgram", "CastSite", "direction", "elaborate", "erase",
    "DEFAULT_BUDGET", "EVENT_KINDS", "CastReport", "Outcome", "evaluate", "plain",
]

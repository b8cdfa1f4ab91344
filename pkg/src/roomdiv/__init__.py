"""Stable room assignments when agents care about the red share of their room."""

from .kernels import BACKEND
from .model import (
    Agent,
    BudgetExceeded,
    Color,
    Instance,
    InvalidOutcomeError,
    ModelError,
    Outcome,
    ParseError,
    WeakOrder,
    classify,
    parse_instance,
    parse_outcome,
)
from .verify import Concept, find_witness, is_stable

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Agent",
    "BudgetExceeded",
    "Color",
    "Concept",
    "Instance",
    "InvalidOutcomeError",
    "ModelError",
    "Outcome",
    "ParseError",
    "WeakOrder",
    "classify",
    "find_witness",
    "is_stable",
    "parse_instance",
    "parse_outcome",
]

"""FO(.) reasoning engine: model checking, expansion, propagation,
explanation, optimisation, relevance, consultation sessions and DMN tables."""

from ._core import (
    ConflictError,
    FodotError,
    KnowledgeBase,
    Session,
    check_table,
    translate_table,
)

__all__ = [
    "ConflictError",
    "FodotError",
    "KnowledgeBase",
    "Session",
    "check_table",
    "translate_table",
]

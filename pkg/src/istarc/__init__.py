"""Parse, validate, project and export iStar 2.0 goal models."""

__version__ = "0.1.0"

from .diagnostics import Diagnostic, Location, Severity, SourceSpan  # noqa: E402
from .dsl import ParseError, format_model, parse, parse_bytes  # noqa: E402
from .model import (  # noqa: E402
    ActorKind,
    ActorLinkKind,
    Contribution,
    ContributionLevel,
    ElementKind,
    Model,
    ModelError,
    NeededBy,
    Qualification,
    RefinementOperator,
    structurally_equal,
)
from .validator import check_link_matrix, detect_cycles, validate  # noqa: E402
from .views import ViewKind, project  # noqa: E402

__all__ = [
    "ActorKind",
    "ActorLinkKind",
    "Contribution",
    "ContributionLevel",
    "Diagnostic",
    "ElementKind",
    "Location",
    "Model",
    "ModelError",
    "NeededBy",
    "ParseError",
    "Qualification",
    "RefinementOperator",
    "Severity",
    "SourceSpan",
    "ViewKind",
    "check_link_matrix",
    "detect_cycles",
    "format_model",
    "parse",
    "parse_bytes",
    "project",
    "structurally_equal",
    "validate",
]

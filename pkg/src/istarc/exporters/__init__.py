from .dot import to_graph_text
from .interchange import SCHEMA_VERSION, InterchangeError, from_interchange, to_interchange
from .machine import diagnostics_to_machine

__all__ = [
    "SCHEMA_VERSION",
    "InterchangeError",
    "diagnostics_to_machine",
    "from_interchange",
    "to_graph_text",
    "to_interchange",
]

"""Textual ``.istar`` syntax: parsing and canonical formatting."""

from .formatter import format_model
from .parser import ParseError, parse, parse_bytes

__all__ = ["ParseError", "format_model", "parse", "parse_bytes"]

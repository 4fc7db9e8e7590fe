"""Diagnostics shared by the parser, validator, interchange reader and CLI."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class SourceSpan(NamedTuple):
    """A 1-based, inclusive-start range inside a source file."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Location:
    """Where a diagnostic points: an entity id, a source span, a JSON path, or a mix."""

    id: str | None = None
    span: SourceSpan | None = None
    path: str | None = None
    file: str | None = None

    @property
    def file_name(self) -> str | None:
        return self.span.file if self.span is not None else self.file


class CatalogEntry(NamedTuple):
    code: str
    title: str
    summary: str


# Codes are part of the external contract; never renumber.
CATALOG: dict[str, CatalogEntry] = {
    entry.code: entry
    for entry in [
        CatalogEntry("E001", "IsAKindMismatch",
                     "is-a may only link two roles or two generic actors."),
        CatalogEntry("E002", "IsACycle",
                     "The is-a links form a cycle."),
        CatalogEntry("E003", "ParticipatesCycle",
                     "The participates-in links form a cycle."),
        CatalogEntry("E004", "DuplicateActorLink",
                     "Two actors are joined by more than one actor link, in either "
                     "direction and of either kind."),
        CatalogEntry("E005", "DependerElmtOwner",
                     "The dependerElmt is not inside the depender's boundary."),
        CatalogEntry("E006", "DependeeElmtOwner",
                     "The dependeeElmt is not inside the dependee's boundary."),
        CatalogEntry("E007", "SelfDependency",
                     "Depender and dependee are the same actor."),
        CatalogEntry("E008", "DependerElmtElaborated",
                     "A dependerElmt is the parent of a refinement or the target of "
                     "a contribution."),
        CatalogEntry("E009", "RefinementCycle",
                     "Refinements form a cycle, including an element refining itself."),
        CatalogEntry("E010", "CrossActorLink",
                     "A refinement or element link joins elements that are not wanted "
                     "by the same actor (dependums belong to no actor)."),
        CatalogEntry("E011", "ContributionQualificationClash",
                     "An element and a quality are joined by both a contribution and "
                     "a qualification."),
        CatalogEntry("E012", "SelfContribution",
                     "A quality contributes to itself."),
        CatalogEntry("E013", "MatrixViolation",
                     "The link kind is not allowed between these element kinds."),
        CatalogEntry("E014", "AndArityTooSmall",
                     "An AND refinement has fewer than two children, or an OR "
                     "refinement has none."),
        CatalogEntry("E015", "ParentAlreadyRefined",
                     "An element is the parent of more than one refinement."),
        CatalogEntry("E016", "SharedDependum",
                     "A dependum is not exclusively owned by a single dependency."),
        CatalogEntry("M001", "EmptyName",
                     "A name is empty or whitespace only."),
        CatalogEntry("M002", "UnknownReference",
                     "An id does not name an entity of the expected type."),
        CatalogEntry("M003", "DuplicateChild",
                     "A refinement lists the same child twice."),
        CatalogEntry("M004", "DuplicateId",
                     "Two entities share an id."),
        CatalogEntry("P001", "SyntaxError",
                     "The input does not match the grammar."),
        CatalogEntry("P002", "UnterminatedString",
                     "A quoted name is not closed before the end of the line."),
        CatalogEntry("P003", "UnresolvedReference",
                     "A name or local id does not resolve in its scope."),
        CatalogEntry("P004", "AmbiguousReference",
                     "A name matches several declarations; use `as localId`."),
        CatalogEntry("P005", "DuplicateDeclaration",
                     "A local id is declared twice in one scope."),
        CatalogEntry("P006", "ByteOrderMark",
                     "A UTF-8 byte-order mark was skipped."),
        CatalogEntry("P007", "InvalidEncoding",
                     "The input is not valid UTF-8."),
        CatalogEntry("J001", "MalformedDocument",
                     "The interchange document is not valid JSON or does not match "
                     "the schema."),
        CatalogEntry("J002", "SchemaVersionMismatch",
                     "The interchange schemaVersion is not supported."),
        CatalogEntry("J003", "ReferentialBreakage",
                     "An interchange record references a missing id, or a dependum "
                     "element has no dependency."),
    ]
}

WARNING_CODES = frozenset({"P006"})


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    primary: Location = field(default_factory=Location)
    related: tuple[Location, ...] = ()
    severity: Severity = Severity.ERROR

    def __post_init__(self) -> None:
        if self.code not in CATALOG:
            raise ValueError(f"unknown diagnostic code {self.code!r}")

    @property
    def title(self) -> str:
        return CATALOG[self.code].title

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple:
        return (self.code, id_sort_key(self.primary.id or ""), self.primary.span or (), self.message)


_NUMBER = re.compile(r"(\d+)")


def id_sort_key(ident: str) -> tuple:
    """Natural ordering for ids: ``E2`` sorts before ``E10``."""
    parts = _NUMBER.split(ident)
    return tuple((0, int(p), p) if p.isdigit() else (1, 0, p) for p in parts if p != "")


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def render_catalog() -> str:
    """Render the diagnostic catalog as the markdown shipped in ``docs/diagnostics.md``."""
    lines = [
        "# Diagnostic catalog",
        "",
        "Generated by `istarc.diagnostics.render_catalog()`; do not edit by hand.",
        "",
        "Codes `E001`-`E016` are integrity-constraint violations reported by the",
        "validator (and by the model constructors when a single edit would break",
        "one). `M` codes are constructor errors with no metamodel counterpart, `P`",
        "codes come from the DSL parser and `J` codes from the interchange reader.",
        "Everything is error severity except `P006`.",
        "",
        "| Code | Title | Meaning |",
        "| ---- | ----- | ------- |",
    ]
    for entry in CATALOG.values():
        lines.append(f"| {entry.code} | {entry.title} | {entry.summary} |")
    return "\n".join(lines) + "\n"

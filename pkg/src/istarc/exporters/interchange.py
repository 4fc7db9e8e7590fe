"""JSON interchange format ``istar-2.0/1``.

Documents are flat record arrays keyed by the model's own ids. Optional
dependency endpoints are written as explicit ``null``. Reading a document
replays it through the model constructors, so every local constraint is
re-checked; problems come back as diagnostics located by JSON path.
"""

from __future__ import annotations

import json
from collections import defaultdict
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from ..diagnostics import Diagnostic, Location, SourceSpan
from ..model import (
    Contribution,
    ContributionLevel,
    ElementKind,
    Model,
    ModelError,
    NeededBy,
    Qualification,
)

SCHEMA_VERSION = "istar-2.0/1"

_LINK_KIND = {Contribution: "contributesTo", NeededBy: "neededBy", Qualification: "qualifies"}


class InterchangeError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        self.diagnostics = diagnostics
        first = diagnostics[0]
        where = f"{first.primary.path}: " if first.primary.path else ""
        super().__init__(f"{where}{first.message}")


@lru_cache(maxsize=None)
def schema() -> dict:
    text = resources.files("istarc").joinpath("schema/istar-2.0-1.schema.json").read_text("utf-8")
    return json.loads(text)


def to_document(model: Model) -> dict[str, Any]:
    def element_link(k) -> dict:
        rec: dict[str, Any] = {"id": k.id, "kind": _LINK_KIND[type(k)]}
        if isinstance(k, Contribution):
            rec.update(source=k.source, target=k.target, level=k.level.value)
        elif isinstance(k, NeededBy):
            rec.update(resource=k.resource, task=k.task)
        else:
            rec.update(quality=k.quality, subject=k.subject)
        return rec

    return {
        "schemaVersion": SCHEMA_VERSION,
        "actors": [{"id": a.id, "name": a.name, "kind": a.kind.value} for a in model.actors.values()],
        "elements": [
            {"id": e.id, "name": e.name, "kind": e.kind.value, "actor": e.actor} for e in model.elements.values()
        ],
        "actorLinks": [
            {"id": x.id, "kind": x.kind.value, "source": x.source, "target": x.target}
            for x in model.actor_links.values()
        ],
        "refinements": [
            {"id": r.id, "kind": r.operator.value, "parent": r.parent, "children": list(r.children)}
            for r in model.refinements.values()
        ],
        "elementLinks": [element_link(k) for k in model.element_links.values()],
        "dependencies": [
            {
                "id": d.id,
                "depender": d.depender,
                "dependerElmt": d.depender_elmt,
                "dependum": d.dependum,
                "dependee": d.dependee,
                "dependeeElmt": d.dependee_elmt,
            }
            for d in model.dependencies.values()
        ],
    }


def to_interchange(model: Model) -> str:
    """Serialize ``model``; byte-identical for equal models."""
    return json.dumps(to_document(model), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class _Reader:
    def __init__(self, file_name: str) -> None:
        self.file_name = file_name
        self.diags: list[Diagnostic] = []

    def add(self, code: str, message: str, path: str, ident: str | None = None, related=()) -> None:
        self.diags.append(
            Diagnostic(
                code,
                message,
                Location(id=ident, path=path, file=self.file_name),
                tuple(Location(id=r, file=self.file_name) for r in related),
            )
        )


def _ref_fields(section: str, rec: dict) -> list[tuple[str, str | None, str]]:
    """(field name, referenced id, expected table) for one record."""
    if section == "elements":
        return [("actor", rec["actor"], "actors")]
    if section == "actorLinks":
        return [("source", rec["source"], "actors"), ("target", rec["target"], "actors")]
    if section == "refinements":
        return [("parent", rec["parent"], "elements")] + [
            (f"children[{i}]", c, "elements") for i, c in enumerate(rec["children"])
        ]
    if section == "elementLinks":
        return [(f, rec[f], "elements") for f in ("source", "target", "resource", "task", "quality", "subject") if f in rec]
    if section == "dependencies":
        return [
            ("depender", rec["depender"], "actors"),
            ("dependerElmt", rec["dependerElmt"], "elements"),
            ("dependum", rec["dependum"], "elements"),
            ("dependee", rec["dependee"], "actors"),
            ("dependeeElmt", rec["dependeeElmt"], "elements"),
        ]
    return []


_SECTIONS = ("actors", "elements", "actorLinks", "refinements", "elementLinks", "dependencies")


def from_interchange(text: str, file_name: str = "<interchange>") -> Model:
    """Rebuild a model from an interchange document.

    Raises :class:`InterchangeError` with every problem found.
    """
    r = _Reader(file_name)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        span = SourceSpan(file_name, exc.lineno, exc.colno, exc.lineno, exc.colno + 1)
        raise InterchangeError([Diagnostic("J001", f"invalid JSON: {exc.msg}", Location(span=span))]) from None

    if isinstance(doc, dict) and "schemaVersion" in doc and doc["schemaVersion"] != SCHEMA_VERSION:
        r.add("J002", f"unsupported schemaVersion {doc['schemaVersion']!r}; expected {SCHEMA_VERSION!r}", "$.schemaVersion")
        raise InterchangeError(r.diags)

    validator = jsonschema.Draft202012Validator(schema())
    for err in sorted(validator.iter_errors(doc), key=lambda e: (e.json_path, e.message)):
        r.add("J001", f"schema violation: {err.message}", err.json_path)
    if r.diags:
        raise InterchangeError(r.diags)

    where: dict[str, tuple[str, str]] = {}
    for section in _SECTIONS:
        for i, rec in enumerate(doc[section]):
            path = f"$.{section}[{i}]"
            if rec["id"] in where:
                r.add("M004", f"id {rec['id']!r} is used twice (first at {where[rec['id']][1]})", path, rec["id"])
            else:
                where[rec["id"]] = (section, path)
    table_of = {"actors": "actors", "elements": "elements"}
    for section in _SECTIONS:
        for i, rec in enumerate(doc[section]):
            for fname, ref, table in _ref_fields(section, rec):
                if ref is None:
                    continue
                if ref not in where or table_of.get(where[ref][0]) != table:
                    r.add("J003", f"{fname} {ref!r} does not name an entry of {table}", f"$.{section}[{i}].{fname}", rec["id"])
    if r.diags:
        raise InterchangeError(r.diags)

    elements = {rec["id"]: rec for rec in doc["elements"]}
    users = defaultdict(list)
    for i, rec in enumerate(doc["dependencies"]):
        users[rec["dependum"]].append(i)
    for dum, idxs in users.items():
        owner = elements[dum]["actor"]
        first = doc["dependencies"][idxs[0]]["id"]
        if owner is not None:
            for i in idxs:
                rec = doc["dependencies"][i]
                r.add("E016", f"dependum {dum!r} of {rec['id']} lies inside actor {owner!r}", f"$.dependencies[{i}].dependum", rec["id"], [dum])
        for i in idxs[1:]:
            rec = doc["dependencies"][i]
            r.add("E016", f"dependum {dum!r} is shared by {first} and {rec['id']}", f"$.dependencies[{i}].dependum", rec["id"], [first, dum])
    for i, rec in enumerate(doc["elements"]):
        if rec["actor"] is None and rec["id"] not in users:
            r.add("J003", f"element {rec['id']!r} has no actor and is not the dependum of any dependency", f"$.elements[{i}]", rec["id"])
    if r.diags:
        raise InterchangeError(r.diags)

    m = Model()

    def replay(path: str, ident: str, action) -> None:
        try:
            action()
        except ModelError as exc:
            r.add(exc.code, exc.message, path, ident, [x for x in exc.ids if x != ident])

    for i, rec in enumerate(doc["actors"]):
        replay(f"$.actors[{i}]", rec["id"], lambda rec=rec: m.add_actor(rec["name"], rec["kind"], id=rec["id"]))
    for i, rec in enumerate(doc["elements"]):
        if rec["actor"] is not None:
            replay(
                f"$.elements[{i}]",
                rec["id"],
                lambda rec=rec: m.add_element(rec["actor"], rec["name"], rec["kind"], id=rec["id"]),
            )
    for i, rec in enumerate(doc["dependencies"]):
        dum = elements[rec["dependum"]]
        replay(
            f"$.dependencies[{i}]",
            rec["id"],
            lambda rec=rec, dum=dum: m.add_dependency(
                rec["depender"],
                rec["dependerElmt"],
                dum["name"],
                ElementKind(dum["kind"]),
                rec["dependee"],
                rec["dependeeElmt"],
                id=rec["id"],
                dependum_id=dum["id"],
            ),
        )
    for i, rec in enumerate(doc["actorLinks"]):
        replay(
            f"$.actorLinks[{i}]",
            rec["id"],
            lambda rec=rec: m.add_actor_link(rec["source"], rec["target"], rec["kind"], id=rec["id"]),
        )
    for i, rec in enumerate(doc["refinements"]):
        replay(
            f"$.refinements[{i}]",
            rec["id"],
            lambda rec=rec: m.add_refinement(rec["parent"], rec["children"], rec["kind"], id=rec["id"]),
        )
    for i, rec in enumerate(doc["elementLinks"]):
        if rec["kind"] == "contributesTo":
            link = Contribution(rec["source"], rec["target"], ContributionLevel(rec["level"]))
        elif rec["kind"] == "neededBy":
            link = NeededBy(rec["resource"], rec["task"])
        else:
            link = Qualification(rec["quality"], rec["subject"])
        replay(f"$.elementLinks[{i}]", rec["id"], lambda link=link, rec=rec: m.add_element_link(link, id=rec["id"]))
    if r.diags:
        raise InterchangeError(r.diags)
    m.elements = {rec["id"]: m.elements[rec["id"]] for rec in doc["elements"]}
    return m

"""Canonical DSL output for a :class:`~istarc.model.Model`."""

from __future__ import annotations

import re
import unicodedata
from collections import Counter

from ..model import Contribution, Model, NeededBy, Qualification
from .lexer import KEYWORDS

INDENT = "  "

_ESCAPED = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_IDENT = re.compile(r"^[^\W\d]\w*$")


def quote(name: str) -> str:
    out = []
    for ch in name:
        if ch in _ESCAPED:
            out.append(_ESCAPED[ch])
        elif unicodedata.category(ch) in ("Cc", "Cs", "Zl", "Zp"):
            out.append(f"\\u{{{ord(ch):x}}}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def _is_ident(text: str) -> bool:
    return bool(_IDENT.match(text)) and text not in KEYWORDS


def _synth_alias(ident: str, taken: set[str]) -> str:
    base = re.sub(r"\W", "_", ident.lower()) or "id"
    if not (base[0].isalpha() or base[0] == "_"):
        base = "_" + base
    if base in KEYWORDS:
        base += "_"
    alias, n = base, 1
    while alias in taken:
        n += 1
        alias = f"{base}_{n}"
    return alias


def _assign_aliases(entities: list) -> dict[str, str]:
    """Alias per entity id: the declared one, or a generated one when the name is ambiguous."""
    names = Counter(e.name for e in entities)
    taken = {e.alias for e in entities if e.alias and _is_ident(e.alias)}
    aliases = {}
    for e in entities:
        if e.alias and _is_ident(e.alias):
            aliases[e.id] = e.alias
    for e in entities:
        if e.id not in aliases and names[e.name] > 1:
            aliases[e.id] = alias = _synth_alias(e.id, taken)
            taken.add(alias)
    return aliases


def format_model(model: Model) -> str:
    """Render ``model`` as canonical DSL text.

    Actors come in declaration order with their elements and internal links;
    then actor links, then dependencies. Names that are ambiguous within
    their scope are given an ``as`` local id. Entities that the grammar cannot
    express (links that touch a dependum) are written as comments.
    """
    actors = list(model.actors.values())
    actor_alias = _assign_aliases(actors)
    elem_alias: dict[str, str] = {}
    for a in actors:
        elem_alias.update(_assign_aliases(model.elements_of(a.id)))

    def actor_ref(aid: str) -> str:
        return actor_alias.get(aid) or quote(model.actors[aid].name)

    def elem_ref(eid: str, home: str | None) -> str:
        e = model.elements[eid]
        local = elem_alias.get(eid) or quote(e.name)
        if e.actor == home:
            return local
        return f"{actor_ref(e.actor)}.{local}"

    def decl(keyword: str, name: str, alias: str | None) -> str:
        return f"{keyword} {quote(name)}" + (f" as {alias}" if alias else "")

    block_links: dict[str, list[str]] = {a.id: [] for a in actors}
    orphans: list[str] = []

    for ident in model.refinements:
        r = model.refinements[ident]
        home = model.elements[r.parent].actor
        ids = (r.parent, *r.children)
        if home is None or any(model.elements[c].actor is None for c in ids):
            orphans.append(f"// refinement {ident} of a dependum cannot be expressed")
            continue
        kids = ", ".join(elem_ref(c, home) for c in r.children)
        block_links[home].append(f"refine {r.operator.value} {elem_ref(r.parent, home)} <- {kids}")

    link_lines: dict[str, list[str]] = {a.id: [] for a in actors}
    for ident in model.element_links:
        k = model.element_links[ident]
        if any(model.elements[x].actor is None for x in k.endpoints):
            orphans.append(f"// element link {ident} touching a dependum cannot be expressed")
            continue
        if isinstance(k, Contribution):
            home = model.elements[k.source].actor
            line = f"contribute {k.level.value} {elem_ref(k.source, home)} -> {elem_ref(k.target, home)}"
        elif isinstance(k, NeededBy):
            home = model.elements[k.task].actor
            line = f"needs {elem_ref(k.task, home)} <- {elem_ref(k.resource, home)}"
        else:
            assert isinstance(k, Qualification)
            home = model.elements[k.quality].actor
            line = f"qualify {elem_ref(k.quality, home)} -> {elem_ref(k.subject, home)}"
        link_lines[home].append(line)

    sections: list[str] = []
    for a in actors:
        head = decl(a.kind.value, a.name, actor_alias.get(a.id))
        body = [decl(e.kind.value, e.name, elem_alias.get(e.id)) for e in model.elements_of(a.id)]
        links = block_links[a.id] + link_lines[a.id]
        if body and links:
            body.append("")
        body += links
        if not body:
            sections.append(head + " {}")
        else:
            inner = "\n".join(INDENT + b if b else "" for b in body)
            sections.append(f"{head} {{\n{inner}\n}}")

    actor_links = []
    for ident in model.actor_links:
        x = model.actor_links[ident]
        word = "isa" if x.kind.value == "is-a" else "participates"
        actor_links.append(f"link {word} {actor_ref(x.source)} -> {actor_ref(x.target)}")
    if actor_links:
        sections.append("\n".join(actor_links))

    deps = []
    for ident in model.dependencies:
        d = model.dependencies[ident]
        dum = model.elements[d.dependum]

        def end(actor: str, elmt: str | None) -> str:
            if elmt is None:
                return actor_ref(actor)
            return f"{actor_ref(actor)}.{elem_alias.get(elmt) or quote(model.elements[elmt].name)}"

        deps.append(
            f"depend {end(d.depender, d.depender_elmt)} -> {dum.kind.value} {quote(dum.name)} "
            f"-> {end(d.dependee, d.dependee_elmt)}"
        )
    if deps:
        sections.append("\n".join(deps))
    if orphans:
        sections.append("\n".join(orphans))

    return "\n\n".join(sections) + "\n" if sections else ""

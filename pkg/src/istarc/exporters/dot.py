"""Graphviz DOT rendering of views.

Layout conventions (frozen by the golden files under ``tests/golden``):

* one ``digraph "istar"`` with fixed graph/node/edge defaults;
* one ``subgraph "cluster_<actor id>"`` per open boundary, holding the actor
  node first and then its elements;
* every other node (closed actors, dependums) at top level after the clusters;
* edges last, in the order actor links, refinements, element links,
  dependencies. A dependency is two edges through its dependum node.

Every node carries ``istar_kind`` and every edge ``istar_style``; the
remaining attributes are layout hints only.
"""

from __future__ import annotations

from ..model import Contribution, IntentionalElement, NeededBy, RefinementOperator
from ..views import ViewModel

_ACTOR_SHAPE = {"actor": "circle", "agent": "circle", "role": "circle"}
_ELEMENT_SHAPE = {"goal": "ellipse", "quality": "egg", "task": "hexagon", "resource": "box"}

_EDGE_ATTRS = {
    "isa": {"label": "is-a"},
    "participates": {"label": "participates-in"},
    "and-refine": {"arrowhead": "tee"},
    "or-refine": {"arrowhead": "normal"},
    "neededby": {"arrowhead": "odot"},
    "qualification": {"style": "dotted", "arrowhead": "none"},
    "dependency-in": {"label": "D"},
    "dependency-out": {"label": "D"},
}

HEADER = [
    'digraph "istar" {',
    '  graph [rankdir="LR", compound="true", fontname="Helvetica"];',
    '  node [fontname="Helvetica", fontsize="10"];',
    '  edge [fontname="Helvetica", fontsize="9"];',
]
FOOTER = ["}"]


def dot_quote(text: str) -> str:
    text = text.replace("\\", "\\\\").replace('"', '\\"')
    text = text.replace("\r\n", "\\n").replace("\n", "\\n").replace("\r", "\\n")
    return f'"{text}"'


def _attrs(pairs: dict[str, str]) -> str:
    return ", ".join(f"{k}={dot_quote(v)}" for k, v in pairs.items())


def edge_style(link) -> str:
    if isinstance(link, Contribution):
        return f"contribution-{link.level.value}"
    if isinstance(link, NeededBy):
        return "neededby"
    return "qualification"


def to_graph_text(view: ViewModel) -> str:
    """Render a projected view as DOT text."""
    m = view.model
    lines = list(HEADER)
    lines.append(f'  // view: {view.kind.value}')

    def actor_node(aid: str, indent: str) -> str:
        a = m.actors[aid]
        attrs = {"label": a.name, "shape": _ACTOR_SHAPE[a.kind.value], "istar_kind": a.kind.value}
        return f"{indent}{dot_quote(aid)} [{_attrs(attrs)}];"

    def element_node(e: IntentionalElement, indent: str) -> str:
        attrs = {"label": e.name, "shape": _ELEMENT_SHAPE[e.kind.value], "istar_kind": e.kind.value}
        if e.is_dependum:
            attrs["istar_dependum"] = "true"
        return f"{indent}{dot_quote(e.id)} [{_attrs(attrs)}];"

    open_actors = view.boundaries()
    for aid in open_actors:
        lines.append(f"  subgraph {dot_quote('cluster_' + aid)} {{")
        lines.append(f'    graph [label={dot_quote(m.actors[aid].name)}, style="rounded,dashed"];')
        lines.append(actor_node(aid, "    "))
        lines.extend(element_node(e, "    ") for e in m.elements_of(aid))
        lines.append("  }")
    opened = set(open_actors)
    lines.extend(actor_node(aid, "  ") for aid in m.actors if aid not in opened)
    lines.extend(element_node(e, "  ") for e in m.dependums())

    def edge(src: str, dst: str, style: str, extra: dict[str, str] | None = None) -> None:
        attrs = {"istar_style": style, **_EDGE_ATTRS.get(style, {}), **(extra or {})}
        lines.append(f"  {dot_quote(src)} -> {dot_quote(dst)} [{_attrs(attrs)}];")

    for x in m.actor_links.values():
        edge(x.source, x.target, "isa" if x.kind.value == "is-a" else "participates")
    for r in m.refinements.values():
        style = "and-refine" if r.operator is RefinementOperator.AND else "or-refine"
        for child in r.children:
            edge(child, r.parent, style)
    for k in m.element_links.values():
        src, dst = k.endpoints
        style = edge_style(k)
        extra = {"label": k.level.value} if isinstance(k, Contribution) else None
        edge(src, dst, style, extra)
    for d in m.dependencies.values():
        edge(d.depender_elmt or d.depender, d.dependum, "dependency-in")
        edge(d.dependum, d.dependee_elmt or d.dependee, "dependency-out")

    lines.extend(FOOTER)
    return "\n".join(lines) + "\n"

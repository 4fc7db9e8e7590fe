"""Integrity checking for iStar 2.0 models.

:func:`validate` re-checks every constraint from scratch, including the local
ones the model constructors already enforce, so that models assembled from
raw records (interchange, tests) are covered too.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from typing import Callable, Hashable, Iterable, Mapping, TypeVar

from .diagnostics import Diagnostic, Location, id_sort_key, sort_diagnostics
from .model import (
    ActorKind,
    ActorLinkKind,
    Contribution,
    LinkKind,
    Model,
    Qualification,
    RefinementOperator,
    check_link_matrix,
)

__all__ = ["CycleRelation", "check_link_matrix", "detect_cycles", "simple_cycles", "validate"]

N = TypeVar("N", bound=Hashable)


class CycleRelation(enum.Enum):
    IS_A = "is-a"
    PARTICIPATES_IN = "participates-in"
    REFINEMENT = "refinement"


def simple_cycles(graph: Mapping[N, Iterable[N]], key: Callable[[N], object] | None = None) -> list[list[N]]:
    """Every elementary cycle of a directed graph (Johnson's algorithm).

    Each cycle starts at its smallest node under ``key`` and follows edge
    direction; the list is sorted. Self-loops are one-node cycles.
    """
    nodes = sorted(set(graph).union(*map(set, graph.values())) if graph else set(), key=key)
    index = {n: i for i, n in enumerate(nodes)}
    adj = [sorted({index[w] for w in graph.get(n, ())}) for n in nodes]

    found: list[list[int]] = []
    for s in range(len(nodes)):
        if s in adj[s]:
            found.append([s])
        comp = _component_of(adj, s)
        if len(comp) < 2:
            continue
        sub = {v: [w for w in adj[v] if w in comp and w != v] for v in comp}
        found.extend(_circuits_from(sub, s))

    found.sort()
    return [[nodes[i] for i in cyc] for cyc in found]


def _component_of(adj: list[list[int]], s: int) -> set[int]:
    """Strongly connected component of ``s`` within the nodes numbered >= s."""

    def reach(step: Callable[[int], Iterable[int]]) -> set[int]:
        seen, todo = {s}, [s]
        while todo:
            for w in step(todo.pop()):
                if w >= s and w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    reverse: dict[int, list[int]] = defaultdict(list)
    for v in range(s, len(adj)):
        for w in adj[v]:
            reverse[w].append(v)
    return reach(lambda v: adj[v]) & reach(lambda v: reverse[v])


def _circuits_from(sub: dict[int, list[int]], s: int) -> list[list[int]]:
    blocked = {s}
    block_map: dict[int, set[int]] = defaultdict(set)
    path = [s]
    stack = [(s, iter(sub[s]))]
    closed = [False]
    out = []

    def unblock(u: int) -> None:
        todo = [u]
        while todo:
            x = todo.pop()
            if x in blocked:
                blocked.discard(x)
                todo.extend(block_map[x])
                block_map[x].clear()

    while stack:
        v, successors = stack[-1]
        for w in successors:
            if w == s:
                out.append(list(path))
                closed[-1] = True
            elif w not in blocked:
                path.append(w)
                closed.append(False)
                stack.append((w, iter(sub[w])))
                blocked.add(w)
                break
        else:
            stack.pop()
            path.pop()
            v_closed = closed.pop()
            if v_closed:
                unblock(v)
            else:
                for w in sub[v]:
                    block_map[w].add(v)
            if closed:
                closed[-1] = closed[-1] or v_closed
    return out


def _relation_graph(model: Model, relation: CycleRelation) -> dict[str, list[str]]:
    graph: dict[str, list[str]] = defaultdict(list)
    if relation is CycleRelation.REFINEMENT:
        for r in model.refinements.values():
            for child in r.children:
                graph[child].append(r.parent)
    else:
        kind = ActorLinkKind(relation.value)
        for link in model.actor_links.values():
            if link.kind is kind:
                graph[link.source].append(link.target)
    return graph


def detect_cycles(model: Model, relation: CycleRelation | str) -> list[list[str]]:
    """Elementary cycles of the is-a, participates-in or refinement graph.

    Refinement edges run child -> parent.
    """
    return simple_cycles(_relation_graph(model, CycleRelation(relation)), key=id_sort_key)


# -- validation ---------------------------------------------------------------


class _Collector:
    def __init__(self, model: Model) -> None:
        self.model = model
        self.diags: list[Diagnostic] = []

    def loc(self, ident: str) -> Location:
        return Location(ident, self.model.source_map.get(ident))

    def add(self, code: str, message: str, primary: str, related: Iterable[str] = ()) -> None:
        self.diags.append(Diagnostic(code, message, self.loc(primary), tuple(self.loc(r) for r in related)))

    def name(self, ident: str | None) -> str:
        ent = self.model.actors.get(ident) or self.model.elements.get(ident)
        return repr(ent.name) if ent is not None else repr(ident)


def validate(model: Model) -> list[Diagnostic]:
    """All integrity violations in ``model``, sorted by code then primary id."""
    dangling = model.dangling_references()
    if dangling:
        raise ValueError(f"model is not referentially intact: {dangling[:5]}")
    out = _Collector(model)
    _check_actor_links(model, out)
    _check_dependencies(model, out)
    _check_refinements(model, out)
    _check_element_links(model, out)
    return sort_diagnostics(out.diags)


def _cycle_text(out: _Collector, cycle: list[str]) -> str:
    return " -> ".join(out.name(x) for x in [*cycle, cycle[0]])


def _check_actor_links(model: Model, out: _Collector) -> None:
    for link in model.actor_links.values():
        if link.kind is ActorLinkKind.IS_A:
            src, tgt = model.actors[link.source], model.actors[link.target]
            if not (src.kind is tgt.kind and src.kind is not ActorKind.AGENT):
                out.add(
                    "E001",
                    f"is-a {link.id} links {src.kind.value} {src.name!r} to {tgt.kind.value} {tgt.name!r}; "
                    "only role-role or actor-actor pairs may be linked by is-a",
                    link.id,
                    [link.source, link.target],
                )

    for relation, code in ((CycleRelation.IS_A, "E002"), (CycleRelation.PARTICIPATES_IN, "E003")):
        for cycle in detect_cycles(model, relation):
            out.add(code, f"{relation.value} cycle: {_cycle_text(out, cycle)}", cycle[0], cycle)

    first_by_pair: dict[frozenset, str] = {}
    for ident in sorted(model.actor_links, key=id_sort_key):
        link = model.actor_links[ident]
        pair = frozenset((link.source, link.target))
        if pair in first_by_pair:
            first = first_by_pair[pair]
            out.add(
                "E004",
                f"actors {out.name(link.source)} and {out.name(link.target)} are linked by both "
                f"{first} and {ident}; at most one actor link is allowed per pair",
                ident,
                [first, link.source, link.target],
            )
        else:
            first_by_pair[pair] = ident


def _check_dependencies(model: Model, out: _Collector) -> None:
    first_by_dependum: dict[str, str] = {}
    for ident in sorted(model.dependencies, key=id_sort_key):
        d = model.dependencies[ident]
        dependum = model.elements[d.dependum]
        if dependum.actor is not None:
            out.add(
                "E016",
                f"dependum {dependum.name!r} of {ident} lies inside the boundary of {out.name(dependum.actor)}",
                ident,
                [d.dependum],
            )
        elif d.dependum in first_by_dependum:
            first = first_by_dependum[d.dependum]
            out.add(
                "E016",
                f"dependum {dependum.name!r} is shared by {first} and {ident}",
                ident,
                [first, d.dependum],
            )
        else:
            first_by_dependum[d.dependum] = ident

        if d.depender == d.dependee:
            out.add("E007", f"{ident}: actor {out.name(d.depender)} depends on itself", ident, [d.depender])

        for elmt_id, actor_id, code, role in (
            (d.depender_elmt, d.depender, "E005", "depender"),
            (d.dependee_elmt, d.dependee, "E006", "dependee"),
        ):
            if elmt_id is None:
                continue
            elmt = model.elements[elmt_id]
            if elmt.is_dependum:
                out.add("E016", f"{ident}: dependum {elmt.name!r} is used as {role}Elmt", ident, [elmt_id])
            elif elmt.actor != actor_id:
                out.add(
                    code,
                    f"{ident}: {role}Elmt {elmt.name!r} belongs to {out.name(elmt.actor)}, "
                    f"not to the {role} {out.name(actor_id)}",
                    ident,
                    [elmt_id, actor_id],
                )

        if d.depender_elmt is not None:
            x = d.depender_elmt
            for r in model.refinements.values():
                if r.parent == x:
                    out.add(
                        "E008",
                        f"{ident}: dependerElmt {out.name(x)} is refined by {r.id}",
                        ident,
                        [x, r.id],
                    )
            for k in model.element_links.values():
                if isinstance(k, Contribution) and k.target == x:
                    out.add(
                        "E008",
                        f"{ident}: dependerElmt {out.name(x)} is contributed to by {k.id}",
                        ident,
                        [x, k.id],
                    )


def _same_actor(model: Model, ids: Iterable[str]) -> bool:
    owners = {model.elements[i].actor for i in ids}
    return len(owners) == 1 and None not in owners


def _check_refinements(model: Model, out: _Collector) -> None:
    for cycle in detect_cycles(model, CycleRelation.REFINEMENT):
        out.add("E009", f"refinement cycle: {_cycle_text(out, cycle)}", cycle[0], cycle)

    first_by_parent: dict[str, str] = {}
    for ident in sorted(model.refinements, key=id_sort_key):
        r = model.refinements[ident]
        parent = model.elements[r.parent]
        for child_id in r.children:
            child = model.elements[child_id]
            if not check_link_matrix(child.kind, parent.kind, LinkKind.REFINEMENT):
                out.add(
                    "E013",
                    f"{ident}: a {child.kind.value} cannot refine a {parent.kind.value} "
                    f"({child.name!r} -> {parent.name!r})",
                    ident,
                    [child_id, r.parent],
                )
        if not _same_actor(model, (r.parent, *r.children)):
            out.add(
                "E010",
                f"{ident}: refinement of {parent.name!r} spans elements of different actors",
                ident,
                [r.parent, *r.children],
            )
        minimum = 2 if r.operator is RefinementOperator.AND else 1
        if len(r.children) < minimum:
            out.add(
                "E014",
                f"{ident}: {r.operator.value.upper()} refinement of {parent.name!r} has "
                f"{len(r.children)} child(ren); at least {minimum} required",
                ident,
                [r.parent],
            )
        if r.parent in first_by_parent:
            first = first_by_parent[r.parent]
            out.add(
                "E015",
                f"{parent.name!r} is the parent of both {first} and {ident}",
                ident,
                [r.parent, first],
            )
        else:
            first_by_parent[r.parent] = ident


def _check_element_links(model: Model, out: _Collector) -> None:
    qualifications = defaultdict(list)
    for k in model.element_links.values():
        if isinstance(k, Qualification):
            qualifications[frozenset(k.endpoints)].append(k.id)

    for ident in sorted(model.element_links, key=id_sort_key):
        k = model.element_links[ident]
        src_id, tgt_id = k.endpoints
        src, tgt = model.elements[src_id], model.elements[tgt_id]
        if isinstance(k, Contribution) and src_id == tgt_id:
            out.add("E012", f"{ident}: {src.name!r} contributes to itself", ident, [src_id])
        if not check_link_matrix(src.kind, tgt.kind, k.link_kind):
            out.add(
                "E013",
                f"{ident}: a {k.link_kind.value} link cannot run from a {src.kind.value} "
                f"to a {tgt.kind.value} ({src.name!r} -> {tgt.name!r})",
                ident,
                [src_id, tgt_id],
            )
        if not _same_actor(model, k.endpoints):
            out.add(
                "E010",
                f"{ident}: {src.name!r} and {tgt.name!r} are not wanted by the same actor",
                ident,
                [src_id, tgt_id],
            )
        if isinstance(k, Contribution):
            for q in sorted(qualifications.get(frozenset(k.endpoints), ()), key=id_sort_key):
                out.add(
                    "E011",
                    f"{src.name!r} and {tgt.name!r} are linked by both contribution {ident} "
                    f"and qualification {q}",
                    ident,
                    [q, src_id, tgt_id],
                )

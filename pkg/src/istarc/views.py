"""Projections of a model onto the standard iStar 2.0 views.

Each view is a detached :class:`ViewModel` whose ``model`` is itself a valid
:class:`~istarc.model.Model`, so views can be projected again or exported
like any other model. The functional view treats "restriction links" as
qualification links.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable

from .diagnostics import Diagnostic
from .model import Contribution, Dependency, ElementKind, Model, Qualification
from .validator import validate


class ViewKind(enum.Enum):
    SR = "sr"
    SD = "sd"
    HYBRID = "hybrid"
    ACTOR = "actor"
    FUNCTIONAL = "functional"


class Anchor(enum.Enum):
    ELEMENT = "element"
    ACTOR = "actor"


class InvalidModel(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__(f"cannot project a model with {len(diagnostics)} validation error(s)")
        self.diagnostics = diagnostics


class UnknownOpenActor(KeyError):
    pass


@dataclass
class ViewModel:
    kind: ViewKind
    model: Model
    open_actors: frozenset[str] = frozenset()
    # dependency id -> (depender side, dependee side)
    anchors: dict[str, tuple[Anchor, Anchor]] = field(default_factory=dict)

    def boundaries(self) -> list[str]:
        """Actors whose boundary is drawn open, in declaration order."""
        if self.kind in (ViewKind.SR, ViewKind.FUNCTIONAL):
            return list(self.model.actors)
        if self.kind is ViewKind.HYBRID:
            return [a for a in self.model.actors if a in self.open_actors]
        return []


def _anchor(d: Dependency) -> tuple[Anchor, Anchor]:
    return (
        Anchor.ELEMENT if d.depender_elmt is not None else Anchor.ACTOR,
        Anchor.ELEMENT if d.dependee_elmt is not None else Anchor.ACTOR,
    )


def _collapse(d: Dependency, keep: set[str]) -> Dependency:
    return replace(
        d,
        depender_elmt=d.depender_elmt if d.depender in keep else None,
        dependee_elmt=d.dependee_elmt if d.dependee in keep else None,
    )


def project(model: Model, kind: ViewKind | str, open_actors: Iterable[str] = ()) -> ViewModel:
    """Project ``model`` onto a view.

    ``open_actors`` only matters for the hybrid view. Raises
    :class:`InvalidModel` when ``model`` has validation errors and
    :class:`UnknownOpenActor` for open actor ids not in the model.
    """
    kind = ViewKind(kind)
    opened = frozenset(open_actors)
    missing = sorted(opened - set(model.actors))
    if missing:
        raise UnknownOpenActor(f"unknown open actor id(s): {', '.join(missing)}")
    errors = [d for d in validate(model) if d.is_error]
    if errors:
        raise InvalidModel(errors)

    src = model.copy()
    out = Model(actors=dict(src.actors), _counters=src._counters)
    all_actors = set(src.actors)
    dependums = {d.dependum for d in src.dependencies.values()}

    if kind in (ViewKind.SR, ViewKind.FUNCTIONAL):
        keep = all_actors
    elif kind is ViewKind.HYBRID:
        keep = set(opened)
    else:
        keep = set()

    if kind is not ViewKind.HYBRID:
        out.actor_links = dict(src.actor_links)

    if kind is not ViewKind.ACTOR:
        dropped_elems: set[str] = set()
        for e in src.elements.values():
            if e.actor is not None and e.actor not in keep:
                continue
            if kind is ViewKind.FUNCTIONAL and e.kind is ElementKind.QUALITY:
                dropped_elems.add(e.id)
                continue
            out.elements[e.id] = e
        for r in src.refinements.values():
            if r.parent in out.elements:
                out.refinements[r.id] = r
        for k in src.element_links.values():
            if kind is ViewKind.FUNCTIONAL and isinstance(k, (Contribution, Qualification)):
                continue
            if all(x in out.elements for x in k.endpoints):
                out.element_links[k.id] = k
        for d in src.dependencies.values():
            if d.dependum in dropped_elems:
                continue
            d = _collapse(d, keep)
            # Endpoint elements hidden by the functional view fall back to their actor.
            d = replace(
                d,
                depender_elmt=d.depender_elmt if d.depender_elmt in out.elements else None,
                dependee_elmt=d.dependee_elmt if d.dependee_elmt in out.elements else None,
            )
            out.dependencies[d.id] = d
        assert dependums - dropped_elems <= set(out.elements)

    out.source_map = {i: s for i, s in src.source_map.items() if i in out}
    anchors = {d.id: _anchor(d) for d in out.dependencies.values()}
    return ViewModel(kind, out, opened if kind is ViewKind.HYBRID else frozenset(), anchors)

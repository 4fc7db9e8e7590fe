"""Typed in-memory iStar 2.0 model graph.

A :class:`Model` holds actors, intentional elements and the links between them,
all keyed by opaque string ids. The ``add_*`` methods perform the local checks
that can be decided from a single edit (link kinds, ownership, arity,
duplicates) and raise a :class:`ModelError` subclass on failure. Whole-graph
constraints such as cycles are left to :mod:`istarc.validator`, so a model can
be built in any order.

Models may also be assembled directly from entity records with
:meth:`Model.from_entities`, bypassing every check. The validator is written to
cope with such raw models.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Union

from .diagnostics import SourceSpan, id_sort_key


class ActorKind(enum.Enum):
    GENERIC = "actor"
    AGENT = "agent"
    ROLE = "role"


class ElementKind(enum.Enum):
    GOAL = "goal"
    QUALITY = "quality"
    TASK = "task"
    RESOURCE = "resource"


class ActorLinkKind(enum.Enum):
    IS_A = "is-a"
    PARTICIPATES_IN = "participates-in"


class RefinementOperator(enum.Enum):
    AND = "and"
    OR = "or"


class ContributionLevel(enum.Enum):
    MAKE = "make"
    HELP = "help"
    HURT = "hurt"
    BREAK = "break"


class LinkKind(enum.Enum):
    """The four kinds of link between intentional elements."""

    REFINEMENT = "refinement"
    CONTRIBUTION = "contribution"
    QUALIFICATION = "qualification"
    NEEDED_BY = "neededBy"


_G, _Q, _T, _R = ElementKind.GOAL, ElementKind.QUALITY, ElementKind.TASK, ElementKind.RESOURCE

# (link start kind, arrowhead kind) -> the one link kind allowed there.
LINK_MATRIX: dict[tuple[ElementKind, ElementKind], LinkKind] = {
    (_G, _G): LinkKind.REFINEMENT,
    (_G, _Q): LinkKind.CONTRIBUTION,
    (_G, _T): LinkKind.REFINEMENT,
    (_Q, _G): LinkKind.QUALIFICATION,
    (_Q, _Q): LinkKind.CONTRIBUTION,
    (_Q, _T): LinkKind.QUALIFICATION,
    (_Q, _R): LinkKind.QUALIFICATION,
    (_T, _G): LinkKind.REFINEMENT,
    (_T, _Q): LinkKind.CONTRIBUTION,
    (_T, _T): LinkKind.REFINEMENT,
    (_R, _Q): LinkKind.CONTRIBUTION,
    (_R, _T): LinkKind.NEEDED_BY,
}


def check_link_matrix(source_kind: ElementKind, target_kind: ElementKind, link_kind: LinkKind) -> bool:
    """True iff ``link_kind`` may run from a ``source_kind`` element to a ``target_kind`` one.

    For refinements the source is the child and the target the parent.
    """
    return LINK_MATRIX.get((source_kind, target_kind)) is link_kind


# -- entities -----------------------------------------------------------------


@dataclass(frozen=True)
class Actor:
    id: str
    name: str
    kind: ActorKind
    alias: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class IntentionalElement:
    """An element inside ``actor``'s boundary, or a dependum when ``actor`` is None."""

    id: str
    name: str
    kind: ElementKind
    actor: str | None
    alias: str | None = field(default=None, compare=False)

    @property
    def is_dependum(self) -> bool:
        return self.actor is None


@dataclass(frozen=True)
class ActorLink:
    id: str
    kind: ActorLinkKind
    source: str
    target: str


@dataclass(frozen=True)
class Refinement:
    id: str
    operator: RefinementOperator
    parent: str
    children: tuple[str, ...]


@dataclass(frozen=True)
class Contribution:
    source: str
    target: str
    level: ContributionLevel
    id: str = ""

    link_kind = LinkKind.CONTRIBUTION

    @property
    def endpoints(self) -> tuple[str, str]:
        return self.source, self.target


@dataclass(frozen=True)
class NeededBy:
    resource: str
    task: str
    id: str = ""

    link_kind = LinkKind.NEEDED_BY

    @property
    def endpoints(self) -> tuple[str, str]:
        return self.resource, self.task


@dataclass(frozen=True)
class Qualification:
    quality: str
    subject: str
    id: str = ""

    link_kind = LinkKind.QUALIFICATION

    @property
    def endpoints(self) -> tuple[str, str]:
        return self.quality, self.subject


ElementLink = Union[Contribution, NeededBy, Qualification]


@dataclass(frozen=True)
class Dependency:
    id: str
    depender: str
    depender_elmt: str | None
    dependum: str
    dependee: str
    dependee_elmt: str | None


# -- construction errors ------------------------------------------------------


class ModelError(Exception):
    """A model edit was rejected. ``code`` is the matching diagnostic code."""

    code = "M002"

    def __init__(self, message: str, *ids: str, code: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.ids = ids
        if code is not None:
            self.code = code


class EmptyName(ModelError):
    code = "M001"


class UnknownReference(ModelError):
    code = "M002"


class UnknownActor(UnknownReference):
    pass


class UnknownElement(UnknownReference):
    pass


class DuplicateChild(ModelError):
    code = "M003"


class DuplicateId(ModelError):
    code = "M004"


class SelfLink(ModelError):
    pass


class IsAKindMismatch(ModelError):
    code = "E001"


class DuplicateActorLink(ModelError):
    code = "E004"


class ElmtOwnerMismatch(ModelError):
    code = "E005"


class SelfDependency(ModelError):
    code = "E007"


class SelfChild(ModelError):
    code = "E009"


class CrossActorLink(ModelError):
    code = "E010"


class ContributionQualificationClash(ModelError):
    code = "E011"


class SelfContribution(ModelError):
    code = "E012"


class MatrixViolation(ModelError):
    code = "E013"


class KindNotRefinable(MatrixViolation):
    pass


class AndArityTooSmall(ModelError):
    code = "E014"


class ParentAlreadyRefined(ModelError):
    code = "E015"


class SharedDependum(ModelError):
    code = "E016"


# -- the model ----------------------------------------------------------------

_PREFIX = {
    "actors": "A",
    "elements": "E",
    "dependums": "M",
    "actor_links": "L",
    "refinements": "R",
    "element_links": "K",
    "dependencies": "D",
}


def _check_name(name: str) -> str:
    if not name.strip():
        raise EmptyName("name must not be empty")
    return name


@dataclass
class Model:
    actors: dict[str, Actor] = field(default_factory=dict)
    elements: dict[str, IntentionalElement] = field(default_factory=dict)
    actor_links: dict[str, ActorLink] = field(default_factory=dict)
    refinements: dict[str, Refinement] = field(default_factory=dict)
    element_links: dict[str, ElementLink] = field(default_factory=dict)
    dependencies: dict[str, Dependency] = field(default_factory=dict)
    source_map: dict[str, SourceSpan] = field(default_factory=dict, compare=False)
    _counters: Counter = field(default_factory=Counter, repr=False, compare=False)

    @classmethod
    def from_entities(
        cls,
        actors: Iterable[Actor] = (),
        elements: Iterable[IntentionalElement] = (),
        actor_links: Iterable[ActorLink] = (),
        refinements: Iterable[Refinement] = (),
        element_links: Iterable[ElementLink] = (),
        dependencies: Iterable[Dependency] = (),
    ) -> Model:
        """Assemble a model from records without any checking."""
        return cls(
            actors={a.id: a for a in actors},
            elements={e.id: e for e in elements},
            actor_links={x.id: x for x in actor_links},
            refinements={r.id: r for r in refinements},
            element_links={x.id: x for x in element_links},
            dependencies={d.id: d for d in dependencies},
        )

    def copy(self) -> Model:
        return Model(
            dict(self.actors),
            dict(self.elements),
            dict(self.actor_links),
            dict(self.refinements),
            dict(self.element_links),
            dict(self.dependencies),
            dict(self.source_map),
            Counter(self._counters),
        )

    # -- lookup ---------------------------------------------------------------

    def __contains__(self, ident: object) -> bool:
        return any(ident in table for table in self._tables())

    def _tables(self) -> tuple[dict, ...]:
        return (
            self.actors,
            self.elements,
            self.actor_links,
            self.refinements,
            self.element_links,
            self.dependencies,
        )

    def ids(self) -> Iterator[str]:
        for table in self._tables():
            yield from table

    def entity(self, ident: str):
        for table in self._tables():
            if ident in table:
                return table[ident]
        raise KeyError(ident)

    def elements_of(self, actor_id: str) -> list[IntentionalElement]:
        return [e for e in self.elements.values() if e.actor == actor_id]

    def dependums(self) -> list[IntentionalElement]:
        return [e for e in self.elements.values() if e.actor is None]

    def refinement_of(self, parent_id: str) -> Refinement | None:
        for r in self.refinements.values():
            if r.parent == parent_id:
                return r
        return None

    def dependency_of(self, dependum_id: str) -> Dependency | None:
        for d in self.dependencies.values():
            if d.dependum == dependum_id:
                return d
        return None

    def is_empty(self) -> bool:
        return not any(self._tables())

    def references(self, ident: str) -> list[str]:
        """Ids that the entity ``ident`` points at."""
        ent = self.entity(ident)
        if isinstance(ent, IntentionalElement):
            return [ent.actor] if ent.actor is not None else []
        if isinstance(ent, ActorLink):
            return [ent.source, ent.target]
        if isinstance(ent, Refinement):
            return [ent.parent, *ent.children]
        if isinstance(ent, Dependency):
            refs = [ent.depender, ent.depender_elmt, ent.dependum, ent.dependee, ent.dependee_elmt]
            return [r for r in refs if r is not None]
        if isinstance(ent, (Contribution, NeededBy, Qualification)):
            return list(ent.endpoints)
        return []

    def dangling_references(self) -> list[tuple[str, str]]:
        """(entity id, missing id) pairs; empty when the model is referentially intact."""
        out = []
        for e in self.elements.values():
            if e.actor is not None and e.actor not in self.actors:
                out.append((e.id, e.actor))
        for x in self.actor_links.values():
            out += [(x.id, a) for a in (x.source, x.target) if a not in self.actors]
        for r in self.refinements.values():
            out += [(r.id, c) for c in (r.parent, *r.children) if c not in self.elements]
        for k in self.element_links.values():
            out += [(k.id, c) for c in k.endpoints if c not in self.elements]
        for d in self.dependencies.values():
            out += [(d.id, a) for a in (d.depender, d.dependee) if a not in self.actors]
            out += [
                (d.id, c)
                for c in (d.depender_elmt, d.dependum, d.dependee_elmt)
                if c is not None and c not in self.elements
            ]
        return out

    # -- construction ---------------------------------------------------------

    def _fresh_id(self, table: str, ident: str | None) -> str:
        if ident is not None:
            if ident in self:
                raise DuplicateId(f"id {ident!r} is already in use", ident)
            return ident
        prefix = _PREFIX[table]
        while True:
            self._counters[prefix] += 1
            candidate = f"{prefix}{self._counters[prefix]}"
            if candidate not in self:
                return candidate

    def _actor(self, ident: str) -> Actor:
        try:
            return self.actors[ident]
        except KeyError:
            raise UnknownActor(f"unknown actor {ident!r}", ident) from None

    def _element(self, ident: str) -> IntentionalElement:
        try:
            return self.elements[ident]
        except KeyError:
            raise UnknownElement(f"unknown element {ident!r}", ident) from None

    def add_actor(self, name: str, kind: ActorKind, *, id: str | None = None, alias: str | None = None) -> str:
        _check_name(name)
        ident = self._fresh_id("actors", id)
        self.actors[ident] = Actor(ident, name, ActorKind(kind), alias)
        return ident

    def add_element(
        self,
        owner: str,
        name: str,
        kind: ElementKind,
        *,
        id: str | None = None,
        alias: str | None = None,
    ) -> str:
        self._actor(owner)
        _check_name(name)
        ident = self._fresh_id("elements", id)
        self.elements[ident] = IntentionalElement(ident, name, ElementKind(kind), owner, alias)
        return ident

    def add_actor_link(self, source: str, target: str, kind: ActorLinkKind, *, id: str | None = None) -> str:
        src, tgt = self._actor(source), self._actor(target)
        kind = ActorLinkKind(kind)
        if source == target:
            code = "E002" if kind is ActorLinkKind.IS_A else "E003"
            raise SelfLink(f"actor {src.name!r} cannot be linked to itself", source, code=code)
        if kind is ActorLinkKind.IS_A and not _is_a_compatible(src.kind, tgt.kind):
            raise IsAKindMismatch(
                f"is-a cannot link {src.kind.value} {src.name!r} to {tgt.kind.value} {tgt.name!r}; "
                "only role-role or actor-actor pairs",
                source,
                target,
            )
        pair = {source, target}
        for other in self.actor_links.values():
            if {other.source, other.target} == pair:
                raise DuplicateActorLink(
                    f"actors {src.name!r} and {tgt.name!r} are already linked by {other.id}",
                    other.id,
                    source,
                    target,
                )
        ident = self._fresh_id("actor_links", id)
        self.actor_links[ident] = ActorLink(ident, kind, source, target)
        return ident

    def add_refinement(
        self,
        parent: str,
        children: Iterable[str],
        operator: RefinementOperator,
        *,
        id: str | None = None,
    ) -> str:
        operator = RefinementOperator(operator)
        children = tuple(children)
        par = self._element(parent)
        kids = [self._element(c) for c in children]
        if parent in children:
            raise SelfChild(f"{par.name!r} cannot refine itself", parent)
        seen: set[str] = set()
        for c in children:
            if c in seen:
                raise DuplicateChild(f"child {self.elements[c].name!r} is listed twice", parent, c)
            seen.add(c)
        minimum = 2 if operator is RefinementOperator.AND else 1
        if len(children) < minimum:
            raise AndArityTooSmall(
                f"{operator.value.upper()} refinement of {par.name!r} needs at least {minimum} "
                f"child{'ren' if minimum > 1 else ''}, got {len(children)}",
                parent,
            )
        for kid in kids:
            if not check_link_matrix(kid.kind, par.kind, LinkKind.REFINEMENT):
                raise KindNotRefinable(
                    f"a {kid.kind.value} cannot refine a {par.kind.value} "
                    f"({kid.name!r} -> {par.name!r})",
                    kid.id,
                    parent,
                )
        for kid in kids:
            if par.actor is None or kid.actor != par.actor:
                raise CrossActorLink(
                    f"{kid.name!r} and {par.name!r} are not in the same actor boundary",
                    kid.id,
                    parent,
                )
        existing = self.refinement_of(parent)
        if existing is not None:
            raise ParentAlreadyRefined(f"{par.name!r} is already refined by {existing.id}", parent, existing.id)
        ident = self._fresh_id("refinements", id)
        self.refinements[ident] = Refinement(ident, operator, parent, children)
        return ident

    def add_element_link(self, link: ElementLink, *, id: str | None = None) -> str:
        if isinstance(link, Contribution):
            link = replace(link, level=ContributionLevel(link.level))
        src_id, tgt_id = link.endpoints
        src, tgt = self._element(src_id), self._element(tgt_id)
        kind = link.link_kind
        if src_id == tgt_id:
            if isinstance(link, Contribution):
                raise SelfContribution(f"quality {src.name!r} cannot contribute to itself", src_id)
            raise SelfLink(f"{src.name!r} cannot be linked to itself", src_id, code="E013")
        if not check_link_matrix(src.kind, tgt.kind, kind):
            raise MatrixViolation(
                f"a {kind.value} link cannot run from a {src.kind.value} to a {tgt.kind.value} "
                f"({src.name!r} -> {tgt.name!r})",
                src_id,
                tgt_id,
            )
        if src.actor is None or src.actor != tgt.actor:
            raise CrossActorLink(f"{src.name!r} and {tgt.name!r} are not in the same actor boundary", src_id, tgt_id)
        if isinstance(link, (Contribution, Qualification)):
            clash = Qualification if isinstance(link, Contribution) else Contribution
            for other in self.element_links.values():
                if isinstance(other, clash) and set(other.endpoints) == {src_id, tgt_id}:
                    raise ContributionQualificationClash(
                        f"{src.name!r} and {tgt.name!r} are already linked by {other.id}; "
                        "a pair may be linked by a contribution or a qualification, not both",
                        other.id,
                        src_id,
                        tgt_id,
                    )
        ident = self._fresh_id("element_links", id)
        self.element_links[ident] = replace(link, id=ident)
        return ident

    def add_dependency(
        self,
        depender: str,
        depender_elmt: str | None,
        dependum_name: str,
        dependum_kind: ElementKind,
        dependee: str,
        dependee_elmt: str | None,
        *,
        id: str | None = None,
        dependum_id: str | None = None,
    ) -> str:
        """Record a dependency together with a freshly created dependum element."""
        er, ee = self._actor(depender), self._actor(dependee)
        elmts = [self._element(x) if x is not None else None for x in (depender_elmt, dependee_elmt)]
        _check_name(dependum_name)
        if depender == dependee:
            raise SelfDependency(f"actor {er.name!r} cannot depend on itself", depender)
        for elmt, actor, code, role in zip(elmts, (er, ee), ("E005", "E006"), ("depender", "dependee")):
            if elmt is None:
                continue
            if elmt.is_dependum:
                raise SharedDependum(f"dependum {elmt.name!r} cannot be a {role}Elmt", elmt.id)
            if elmt.actor != actor.id:
                raise ElmtOwnerMismatch(
                    f"{role}Elmt {elmt.name!r} is not inside the boundary of {actor.name!r}",
                    elmt.id,
                    actor.id,
                    code=code,
                )
        # Allocate both ids before mutating so a DuplicateId leaves the model untouched.
        dep_ident = self._fresh_id("dependencies", id)
        dum_ident = self._fresh_id("dependums", dependum_id)
        if dep_ident == dum_ident:
            raise DuplicateId(f"id {dep_ident!r} is already in use", dep_ident)
        self.elements[dum_ident] = IntentionalElement(dum_ident, dependum_name, ElementKind(dependum_kind), None)
        self.dependencies[dep_ident] = Dependency(
            dep_ident, depender, depender_elmt, dum_ident, dependee, dependee_elmt
        )
        return dep_ident


def _is_a_compatible(a: ActorKind, b: ActorKind) -> bool:
    return a is b and a is not ActorKind.AGENT


# -- structural comparison ----------------------------------------------------


def structural_form(model: Model) -> dict[str, Counter]:
    """Id-free description of a model, keyed by names and kinds.

    Two models with unique names per scope have equal forms exactly when they
    are isomorphic. Aliases and source spans are ignored.
    """
    actor_key = {a.id: (a.name, a.kind.value) for a in model.actors.values()}
    dependum_owner = {d.dependum: d for d in model.dependencies.values()}

    def elem_key(ident: str | None):
        if ident is None:
            return None
        e = model.elements.get(ident)
        if e is None:
            return ("?", ident)
        return (actor_key.get(e.actor) if e.actor else "dependum", e.name, e.kind.value)

    link_rows = []
    for k in model.element_links.values():
        row = (type(k).__name__, *(elem_key(x) for x in k.endpoints))
        if isinstance(k, Contribution):
            row += (k.level.value,)
        link_rows.append(row)
    return {
        "actors": Counter(actor_key.values()),
        "elements": Counter(elem_key(e.id) for e in model.elements.values() if e.actor is not None),
        "dependums": Counter(
            elem_key(e.id) + (e.id in dependum_owner,) for e in model.elements.values() if e.actor is None
        ),
        "actor_links": Counter(
            (x.kind.value, actor_key.get(x.source), actor_key.get(x.target)) for x in model.actor_links.values()
        ),
        "refinements": Counter(
            (r.operator.value, elem_key(r.parent), tuple(elem_key(c) for c in r.children))
            for r in model.refinements.values()
        ),
        "element_links": Counter(link_rows),
        "dependencies": Counter(
            (
                actor_key.get(d.depender),
                elem_key(d.depender_elmt),
                elem_key(d.dependum),
                actor_key.get(d.dependee),
                elem_key(d.dependee_elmt),
            )
            for d in model.dependencies.values()
        ),
    }


def structurally_equal(a: Model, b: Model) -> bool:
    return structural_form(a) == structural_form(b)


def sorted_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=id_sort_key)

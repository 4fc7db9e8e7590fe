"""Recursive-descent parser for ``.istar`` files.

Parsing runs in three phases: tokenize, build a small syntax tree, then
resolve names and replay every statement through the :class:`~istarc.model.Model`
constructors. Constructor rejections come back as diagnostics carrying the
span of the offending statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..diagnostics import Diagnostic, Location, Severity, SourceSpan
from ..model import (
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
)
from .lexer import KEYWORDS, Token, tokenize

ACTOR_KEYWORDS = {k.value: k for k in ActorKind}
ELEMENT_KEYWORDS = {k.value: k for k in ElementKind}
LEVEL_KEYWORDS = {k.value: k for k in ContributionLevel}
OPERATOR_KEYWORDS = {k.value: k for k in RefinementOperator}
ACTOR_LINK_KEYWORDS = {"isa": ActorLinkKind.IS_A, "participates": ActorLinkKind.PARTICIPATES_IN}
BLOCK_STATEMENTS = frozenset({*ELEMENT_KEYWORDS, "refine", "contribute", "needs", "qualify"})
TOP_STATEMENTS = frozenset({*ACTOR_KEYWORDS, "link", "depend"})


class ParseError(Exception):
    """Raised when a source cannot be turned into a model."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.is_error]
        first = errors[0] if errors else diagnostics[0]
        where = f"{first.primary.span}: " if first.primary.span else ""
        more = f" (and {len(errors) - 1} more)" if len(errors) > 1 else ""
        super().__init__(f"{where}{first.message}{more}")


# -- syntax tree --------------------------------------------------------------


@dataclass(frozen=True)
class Ref:
    """A bare local id (``quoted=False``) or a quoted name."""

    text: str
    quoted: bool
    span: SourceSpan


@dataclass(frozen=True)
class ElementRef:
    actor: Ref | None
    element: Ref


@dataclass
class ElementDecl:
    kind: ElementKind
    name: str
    alias: str | None
    span: SourceSpan


@dataclass
class RefineStmt:
    operator: RefinementOperator
    parent: ElementRef
    children: list[ElementRef]
    span: SourceSpan


@dataclass
class ContributeStmt:
    level: ContributionLevel
    source: ElementRef
    target: ElementRef
    span: SourceSpan


@dataclass
class NeedsStmt:
    task: ElementRef
    resource: ElementRef
    span: SourceSpan


@dataclass
class QualifyStmt:
    quality: ElementRef
    subject: ElementRef
    span: SourceSpan


BlockLink = Union[RefineStmt, ContributeStmt, NeedsStmt, QualifyStmt]


@dataclass
class ActorDecl:
    kind: ActorKind
    name: str
    alias: str | None
    span: SourceSpan
    elements: list[ElementDecl] = field(default_factory=list)
    links: list[BlockLink] = field(default_factory=list)
    model_id: str | None = None


@dataclass
class LinkStmt:
    kind: ActorLinkKind
    source: Ref
    target: Ref
    span: SourceSpan


@dataclass
class DependStmt:
    depender: Ref
    depender_elmt: Ref | None
    dependum_kind: ElementKind
    dependum_name: str
    dependum_span: SourceSpan
    dependee: Ref
    dependee_elmt: Ref | None
    span: SourceSpan


class _Syntax(Exception):
    def __init__(self, message: str, span: SourceSpan) -> None:
        super().__init__(message)
        self.message = message
        self.span = span


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.errors: list[Diagnostic] = []
        self.statements: list[Union[ActorDecl, LinkStmt, DependStmt]] = []

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    @property
    def prev(self) -> Token:
        return self.tokens[self.pos - 1]

    def at(self, value: str) -> bool:
        return self.tok.kind in ("word", "symbol") and self.tok.value == value

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise _Syntax(f"expected {value!r}, found {self.tok}", self.tok.span)
        return self.advance()

    def expect_keyword(self, table: dict, what: str):
        tok = self.tok
        if tok.kind == "word" and tok.value in table:
            self.advance()
            return table[tok.value]
        choices = "|".join(table)
        raise _Syntax(f"expected {what} ({choices}), found {tok}", tok.span)

    def expect_string(self, what: str) -> Token:
        if self.tok.kind != "string":
            raise _Syntax(f"expected quoted {what}, found {self.tok}", self.tok.span)
        return self.advance()

    def alias(self) -> str | None:
        if not self.at("as"):
            return None
        self.advance()
        tok = self.tok
        if tok.kind != "word":
            raise _Syntax(f"expected a local id after 'as', found {tok}", tok.span)
        if tok.is_keyword:
            raise _Syntax(f"{tok.value!r} is a reserved word and cannot be a local id", tok.span)
        return self.advance().value

    def ref(self) -> Ref:
        tok = self.tok
        if tok.kind == "string":
            self.advance()
            return Ref(tok.value, True, tok.span)
        if tok.kind == "word" and not tok.is_keyword:
            self.advance()
            return Ref(tok.value, False, tok.span)
        raise _Syntax(f"expected a quoted name or local id, found {tok}", tok.span)

    def element_ref(self) -> ElementRef:
        first = self.ref()
        if self.at("."):
            self.advance()
            return ElementRef(first, self.ref())
        return ElementRef(None, first)

    def optional_semicolon(self) -> None:
        if self.at(";"):
            self.advance()

    def error(self, exc: _Syntax) -> None:
        self.errors.append(Diagnostic("P001", exc.message, Location(span=exc.span)))

    def recover(self, start: int, stop: frozenset[str], stop_at_brace: bool) -> None:
        """Skip to the next plausible statement start, consuming at least one token."""
        if self.pos == start:
            self.advance()
        while self.tok.kind != "eof":
            if self.tok.kind == "word" and self.tok.value in stop:
                return
            if stop_at_brace and self.at("}"):
                return
            self.advance()

    # -- grammar --------------------------------------------------------------

    def parse_file(self) -> None:
        while self.tok.kind != "eof":
            start = self.pos
            try:
                self.statements.append(self.top_statement())
                self.optional_semicolon()
            except _Syntax as exc:
                self.error(exc)
                self.recover(start, TOP_STATEMENTS, stop_at_brace=False)

    def top_statement(self):
        tok = self.tok
        if tok.kind == "word" and tok.value in ACTOR_KEYWORDS:
            return self.actor_decl()
        if self.at("link"):
            return self.link_stmt()
        if self.at("depend"):
            return self.depend_stmt()
        raise _Syntax(f"expected actor|agent|role|link|depend, found {tok}", tok.span)

    def actor_decl(self) -> ActorDecl:
        kw = self.advance()
        kind = ACTOR_KEYWORDS[kw.value]
        name = self.expect_string("actor name")
        alias = self.alias()
        decl = ActorDecl(kind, name.value, alias, _join(kw.span, self.prev.span))
        self.expect("{")
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise _Syntax("expected '}' before end of file", self.tok.span)
            if self.tok.kind == "word" and self.tok.value in TOP_STATEMENTS:
                raise _Syntax(f"expected '}}' before {self.tok}", self.tok.span)
            start = self.pos
            try:
                self.block_statement(decl)
                self.optional_semicolon()
            except _Syntax as exc:
                if self.tok.kind == "eof":
                    raise
                self.error(exc)
                self.recover(start, BLOCK_STATEMENTS | TOP_STATEMENTS, stop_at_brace=True)
        self.expect("}")
        return decl

    def block_statement(self, decl: ActorDecl) -> None:
        kw = self.tok
        if kw.kind == "word" and kw.value in ELEMENT_KEYWORDS:
            self.advance()
            name = self.expect_string("element name")
            alias = self.alias()
            decl.elements.append(ElementDecl(ELEMENT_KEYWORDS[kw.value], name.value, alias, _join(kw.span, self.prev.span)))
        elif self.at("refine"):
            self.advance()
            op = self.expect_keyword(OPERATOR_KEYWORDS, "refinement operator")
            parent = self.element_ref()
            self.expect("<-")
            children = [self.element_ref()]
            while self.at(","):
                self.advance()
                children.append(self.element_ref())
            decl.links.append(RefineStmt(op, parent, children, _join(kw.span, self.prev.span)))
        elif self.at("contribute"):
            self.advance()
            level = self.expect_keyword(LEVEL_KEYWORDS, "contribution level")
            src = self.element_ref()
            self.expect("->")
            tgt = self.element_ref()
            decl.links.append(ContributeStmt(level, src, tgt, _join(kw.span, self.prev.span)))
        elif self.at("needs"):
            self.advance()
            task = self.element_ref()
            self.expect("<-")
            resource = self.element_ref()
            decl.links.append(NeedsStmt(task, resource, _join(kw.span, self.prev.span)))
        elif self.at("qualify"):
            self.advance()
            quality = self.element_ref()
            self.expect("->")
            subject = self.element_ref()
            decl.links.append(QualifyStmt(quality, subject, _join(kw.span, self.prev.span)))
        else:
            raise _Syntax(
                f"expected goal|quality|task|resource|refine|contribute|needs|qualify or '}}', found {kw}",
                kw.span,
            )

    def link_stmt(self) -> LinkStmt:
        kw = self.advance()
        kind = self.expect_keyword(ACTOR_LINK_KEYWORDS, "actor link kind")
        src = self.ref()
        self.expect("->")
        tgt = self.ref()
        return LinkStmt(kind, src, tgt, _join(kw.span, self.prev.span))

    def depend_stmt(self) -> DependStmt:
        kw = self.advance()
        er = self.element_ref()
        self.expect("->")
        kind_tok = self.tok
        kind = self.expect_keyword(ELEMENT_KEYWORDS, "dependum kind")
        name = self.expect_string("dependum name")
        self.expect("->")
        ee = self.element_ref()
        return DependStmt(
            er.actor or er.element,
            er.element if er.actor else None,
            kind,
            name.value,
            _join(kind_tok.span, name.span),
            ee.actor or ee.element,
            ee.element if ee.actor else None,
            _join(kw.span, self.prev.span),
        )


# -- name resolution and model building ---------------------------------------


class _Scope:
    def __init__(self) -> None:
        self.by_name: dict[str, list[str]] = {}
        self.by_alias: dict[str, str] = {}

    def declare(self, ident: str, name: str, alias: str | None) -> bool:
        self.by_name.setdefault(name, []).append(ident)
        if alias is None:
            return True
        if alias in self.by_alias:
            return False
        self.by_alias[alias] = ident
        return True


class _Unresolved(Exception):
    def __init__(self, code: str, message: str, span: SourceSpan) -> None:
        super().__init__(message)
        self.diagnostic = Diagnostic(code, message, Location(span=span))


def _lookup(scope: _Scope, ref: Ref, what: str) -> str:
    if not ref.quoted:
        try:
            return scope.by_alias[ref.text]
        except KeyError:
            raise _Unresolved("P003", f"unknown {what} id {ref.text!r}", ref.span) from None
    hits = scope.by_name.get(ref.text, [])
    if not hits:
        raise _Unresolved("P003", f"no {what} named {ref.text!r}", ref.span)
    if len(hits) > 1:
        raise _Unresolved(
            "P004",
            f"{len(hits)} {what}s are named {ref.text!r}; declare them with 'as <id>' and refer to the id",
            ref.span,
        )
    return hits[0]


class _Builder:
    def __init__(self, statements: list) -> None:
        self.statements = statements
        self.model = Model()
        self.errors: list[Diagnostic] = []
        self.actor_scope = _Scope()
        self.element_scopes: dict[str, _Scope] = {}

    def duplicate(self, alias: str, span: SourceSpan) -> None:
        self.errors.append(Diagnostic("P005", f"local id {alias!r} is already declared in this scope", Location(span=span)))

    def constructor_error(self, exc: ModelError, span: SourceSpan) -> None:
        related = tuple(Location(i, self.model.source_map.get(i)) for i in exc.ids)
        self.errors.append(Diagnostic(exc.code, exc.message, Location(span=span), related))

    def actor(self, ref: Ref) -> str:
        return _lookup(self.actor_scope, ref, "actor")

    def element(self, ref: ElementRef, home: str) -> str:
        owner = self.actor(ref.actor) if ref.actor is not None else home
        return _lookup(self.element_scopes[owner], ref.element, "element")

    def build(self) -> Model:
        m = self.model
        for st in self.statements:
            if not isinstance(st, ActorDecl):
                continue
            try:
                aid = m.add_actor(st.name, st.kind, alias=st.alias)
            except ModelError as exc:
                self.constructor_error(exc, st.span)
                continue
            m.source_map[aid] = st.span
            st.model_id = aid
            if not self.actor_scope.declare(aid, st.name, st.alias):
                self.duplicate(st.alias, st.span)
            scope = self.element_scopes[aid] = _Scope()
            for el in st.elements:
                try:
                    eid = m.add_element(aid, el.name, el.kind, alias=el.alias)
                except ModelError as exc:
                    self.constructor_error(exc, el.span)
                    continue
                m.source_map[eid] = el.span
                if not scope.declare(eid, el.name, el.alias):
                    self.duplicate(el.alias, el.span)

        for st in self.statements:
            if isinstance(st, ActorDecl):
                home = st.model_id
                if home is None:
                    continue
                for link in st.links:
                    self.replay(link, lambda link=link, home=home: self.block_link(link, home), link.span)
            elif isinstance(st, LinkStmt):
                self.replay(
                    st,
                    lambda st=st: m.add_actor_link(self.actor(st.source), self.actor(st.target), st.kind),
                    st.span,
                )
            else:
                self.replay(st, lambda st=st: self.depend(st), st.span)
        return m

    def replay(self, st, action, span: SourceSpan) -> None:
        try:
            ident = action()
        except _Unresolved as exc:
            self.errors.append(exc.diagnostic)
        except ModelError as exc:
            self.constructor_error(exc, span)
        else:
            self.model.source_map[ident] = span
            if isinstance(st, DependStmt):
                dependum = self.model.dependencies[ident].dependum
                self.model.source_map[dependum] = st.dependum_span

    def block_link(self, st: BlockLink, home: str) -> str:
        m = self.model
        if isinstance(st, RefineStmt):
            parent = self.element(st.parent, home)
            children = [self.element(c, home) for c in st.children]
            return m.add_refinement(parent, children, st.operator)
        if isinstance(st, ContributeStmt):
            return m.add_element_link(Contribution(self.element(st.source, home), self.element(st.target, home), st.level))
        if isinstance(st, NeedsStmt):
            return m.add_element_link(NeededBy(self.element(st.resource, home), self.element(st.task, home)))
        return m.add_element_link(Qualification(self.element(st.quality, home), self.element(st.subject, home)))

    def depend(self, st: DependStmt) -> str:
        er, ee = self.actor(st.depender), self.actor(st.dependee)
        er_elmt = _lookup(self.element_scopes[er], st.depender_elmt, "element") if st.depender_elmt else None
        ee_elmt = _lookup(self.element_scopes[ee], st.dependee_elmt, "element") if st.dependee_elmt else None
        return self.model.add_dependency(er, er_elmt, st.dependum_name, st.dependum_kind, ee, ee_elmt)


def parse(source: str, file_name: str = "<input>") -> tuple[Model, list[Diagnostic]]:
    """Parse DSL text into a model.

    Returns the model and any warnings. Raises :class:`ParseError` carrying
    every error diagnostic (plus warnings) when the text is not a valid model.
    """
    warnings: list[Diagnostic] = []
    if source.startswith("\ufeff"):
        source = source[1:]
        warnings.append(
            Diagnostic(
                "P006",
                "skipped UTF-8 byte-order mark",
                Location(span=SourceSpan(file_name, 1, 1, 1, 1)),
                severity=Severity.WARNING,
            )
        )
    tokens, lex_errors = tokenize(source, file_name)
    parser = _Parser(tokens)
    parser.parse_file()
    errors = lex_errors + parser.errors
    if not errors:
        builder = _Builder(parser.statements)
        model = builder.build()
        errors = builder.errors
    if errors:
        errors.sort(key=lambda d: d.primary.span or ())
        raise ParseError(errors + warnings)
    return model, warnings


def parse_bytes(data: bytes, file_name: str = "<input>") -> tuple[Model, list[Diagnostic]]:
    """Decode UTF-8 ``data`` and :func:`parse` it."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        head = data[: exc.start].decode("utf-8", errors="replace")
        line = head.count("\n") + 1
        col = len(head) - (head.rfind("\n") + 1) + 1
        span = SourceSpan(file_name, line, col, line, col + 1)
        raise ParseError([Diagnostic("P007", f"invalid UTF-8 byte at offset {exc.start}", Location(span=span))]) from None
    return parse(text, file_name)


__all__ = ["KEYWORDS", "ParseError", "parse", "parse_bytes"]

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import Diagnostic, Location, SourceSpan

KEYWORDS = frozenset(
    """
    actor agent role goal quality task resource as
    refine and or contribute make help hurt break needs qualify
    link isa participates depend
    """.split()
)

SYMBOLS = ("->", "<-", "{", "}", ",", ".", ";")

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # "word", "string", "symbol" or "eof"
    value: str
    span: SourceSpan

    @property
    def is_keyword(self) -> bool:
        return self.kind == "word" and self.value in KEYWORDS

    def __str__(self) -> str:
        if self.kind == "eof":
            return "end of file"
        if self.kind == "string":
            return "quoted name"
        return repr(self.value)


def tokenize(source: str, file_name: str) -> tuple[list[Token], list[Diagnostic]]:
    """Split ``source`` into tokens. Spans have exclusive end columns.

    Lexical errors are reported but never stop the scan: an unterminated
    string still yields a string token running to the end of its line.
    """
    tokens: list[Token] = []
    errors: list[Diagnostic] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def span(l0: int, c0: int) -> SourceSpan:
        return SourceSpan(file_name, l0, c0, line, col)

    def error(code: str, message: str, sp: SourceSpan) -> None:
        errors.append(Diagnostic(code, message, Location(span=sp)))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
        elif ch.isspace():
            i, col = i + 1, col + 1
        elif source.startswith("//", i):
            while i < n and source[i] != "\n":
                i, col = i + 1, col + 1
        elif ch == '"':
            l0, c0 = line, col
            i, col = i + 1, col + 1
            chars: list[str] = []
            closed = False
            while i < n and source[i] != "\n":
                c = source[i]
                if c == '"':
                    i, col, closed = i + 1, col + 1, True
                    break
                if c == "\\":
                    esc_col = col
                    nxt = source[i + 1] if i + 1 < n else ""
                    if nxt in _ESCAPES:
                        chars.append(_ESCAPES[nxt])
                        i, col = i + 2, col + 2
                        continue
                    if nxt == "u" and source.startswith("{", i + 2):
                        end = source.find("}", i + 3)
                        digits = source[i + 3 : end] if end != -1 else ""
                        if end != -1 and 1 <= len(digits) <= 6 and all(d in "0123456789abcdefABCDEF" for d in digits):
                            code = int(digits, 16)
                            if code <= 0x10FFFF and not 0xD800 <= code <= 0xDFFF:
                                chars.append(chr(code))
                                width = end + 1 - i
                                i, col = i + width, col + width
                                continue
                    error("P001", "invalid escape sequence in quoted name", SourceSpan(file_name, line, esc_col, line, esc_col + 2))
                    i, col = i + 1, col + 1
                    continue
                chars.append(c)
                i, col = i + 1, col + 1
            if not closed:
                error("P002", "unterminated quoted name", span(l0, c0))
            tokens.append(Token("string", "".join(chars), span(l0, c0)))
        elif ch.isalpha() or ch == "_":
            l0, c0, start = line, col, i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i, col = i + 1, col + 1
            tokens.append(Token("word", source[start:i], span(l0, c0)))
        else:
            for sym in SYMBOLS:
                if source.startswith(sym, i):
                    l0, c0 = line, col
                    i, col = i + len(sym), col + len(sym)
                    tokens.append(Token("symbol", sym, span(l0, c0)))
                    break
            else:
                error("P001", f"unexpected character {ch!r}", SourceSpan(file_name, line, col, line, col + 1))
                i, col = i + 1, col + 1
    tokens.append(Token("eof", "", SourceSpan(file_name, line, col, line, col)))
    return tokens, errors

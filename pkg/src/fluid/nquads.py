"""Line-oriented N-Quads reader and writer.

Each well-formed line yields exactly one Quad; each malformed line yields a
ParseError carrying the line number and a reason. Parsing never aborts on
bad statements, only on unrecoverable I/O failures (StreamAborted). Blank
lines and comment-only lines are counted separately and yield nothing.
"""
from __future__ import annotations

import gzip
import re
from dataclasses import dataclass, field
from pathlib import Path
from sys import intern
from typing import IO, Iterable, Iterator, Union

from .errors import StreamAborted
from .terms import BLANK, DEFAULT_SOURCE, IRI, LITERAL, Quad, Term

_IRI = r'<([^\x00-\x20<>"{}|^`]*)>'
# a blank-node label never ends with '.', so trailing dots go to the terminator
_BNODE = r"_:([^\x00-\x20<>\"{}|^`]*[^\x00-\x20<>\"{}|^`.])"
_LIT = r'"((?:[^"\\\n\r]|\\.)*)"(?:\^\^<([^\x00-\x20<>"{}|^`]*)>|@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*))?'
_WS = r"[ \t]+"

_LINE_RE = re.compile(
    rf"[ \t]*(?:{_IRI}|{_BNODE}){_WS}{_IRI}{_WS}(?:{_IRI}|{_BNODE}|{_LIT})"
    rf"(?:{_WS}(?:{_IRI}|{_BNODE}))?[ \t]*\.[ \t]*(?:#.*)?$"
)

# groups: 1 subj-iri, 2 subj-bnode, 3 pred-iri, 4 obj-iri, 5 obj-bnode,
#         6 obj-literal, 7 obj-datatype, 8 obj-lang, 9 ctx-iri, 10 ctx-bnode

_SCHEME_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")
_UCHAR_RE = re.compile(r"\\u([0-9a-fA-F]{4})|\\U([0-9a-fA-F]{8})")
_BAD_IRI_CHAR_RE = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_BNODE_LABEL_RE = re.compile(
    r"[A-Za-z0-9_:À-\U000EFFFF](?:[A-Za-z0-9_:.·̀-ͯ‿-⁀À-\U000EFFFF-]*"
    r"[A-Za-z0-9_:·̀-ͯ‿-⁀À-\U000EFFFF-])?$"
)

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class BadTerm(ValueError):
    pass


def _unescape_uchar(text: str) -> str:
    def sub(m: re.Match) -> str:
        code = int(m.group(1) or m.group(2), 16)
        if code > 0x10FFFF:
            raise BadTerm("escape beyond the Unicode range")
        return chr(code)

    return _UCHAR_RE.sub(sub, text)


def _unescape_literal(text: str) -> str:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= n:
            raise BadTerm("dangling backslash in literal")
        nxt = text[i + 1]
        if nxt in _ECHAR:
            out.append(_ECHAR[nxt])
            i += 2
        elif nxt == "u" or nxt == "U":
            width = 4 if nxt == "u" else 8
            hexpart = text[i + 2 : i + 2 + width]
            if len(hexpart) != width or not all(h in "0123456789abcdefABCDEF" for h in hexpart):
                raise BadTerm("malformed unicode escape in literal")
            code = int(hexpart, 16)
            if code > 0x10FFFF:
                raise BadTerm("escape beyond the Unicode range")
            out.append(chr(code))
            i += 2 + width
        else:
            raise BadTerm(f"unknown escape \\{nxt} in literal")
    return "".join(out)


def _check_iri(raw: str) -> str:
    value = _unescape_uchar(raw) if "\\" in raw else raw
    if _BAD_IRI_CHAR_RE.search(value):
        raise BadTerm("forbidden character in IRI")
    if not _SCHEME_RE.match(value):
        raise BadTerm(f"relative IRI not allowed: <{value}>")
    return value


def _check_bnode(label: str) -> str:
    if label.endswith(".") or not _BNODE_LABEL_RE.match(label):
        raise BadTerm(f"invalid blank node label: _:{label}")
    return label


@dataclass(frozen=True, slots=True)
class ParseError:
    """One rejected input line."""

    line_no: int
    reason: str
    line: str


@dataclass
class ParseCounters:
    """Bookkeeping so that quads + errors + skipped == lines."""

    lines: int = 0
    quads: int = 0
    errors: int = 0
    skipped: int = 0


@dataclass
class NQuadsParser:
    """Streaming parser; statements without a graph label get default_source.

    Blank-node labels are document-scoped: pass a distinct bnode_scope per
    input file to keep labels from colliding across files.
    """

    default_source: str = DEFAULT_SOURCE
    bnode_scope: str | None = None
    counters: ParseCounters = field(default_factory=ParseCounters)

    def parse_lines(self, lines: Iterable[Union[str, bytes]]) -> Iterator[Union[Quad, ParseError]]:
        counters = self.counters
        default_ctx = Term(IRI, self.default_source)
        scope = self.bnode_scope
        match = _LINE_RE.fullmatch
        for raw in lines:
            counters.lines += 1
            n = counters.lines
            if isinstance(raw, bytes):
                try:
                    raw = raw.decode("utf-8")
                except UnicodeDecodeError:
                    counters.errors += 1
                    yield ParseError(n, "invalid UTF-8", repr(raw[:120]))
                    continue
            line = raw.rstrip("\r\n")
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                counters.skipped += 1
                continue
            m = match(line)
            if m is None:
                counters.errors += 1
                yield ParseError(n, self._diagnose(line), line[:200])
                continue
            try:
                g = m.group
                if g(1) is not None:
                    subject = Term(IRI, intern(_check_iri(g(1))))
                else:
                    label = _check_bnode(g(2))
                    subject = Term(BLANK, f"{scope}.{label}" if scope else label)
                predicate = Term(IRI, intern(_check_iri(g(3))))
                if g(4) is not None:
                    obj = Term(IRI, intern(_check_iri(g(4))))
                elif g(5) is not None:
                    label = _check_bnode(g(5))
                    obj = Term(BLANK, f"{scope}.{label}" if scope else label)
                else:
                    lex = g(6)
                    lex = _unescape_literal(lex) if "\\" in lex else lex
                    dt = intern(_check_iri(g(7))) if g(7) is not None else None
                    obj = Term(LITERAL, lex, dt, g(8))
                if g(9) is not None:
                    context = Term(IRI, intern(_check_iri(g(9))))
                elif g(10) is not None:
                    raise BadTerm("graph label must be an IRI")
                else:
                    context = default_ctx
            except BadTerm as exc:
                counters.errors += 1
                yield ParseError(n, str(exc), line[:200])
                continue
            counters.quads += 1
            yield Quad(subject, predicate, obj, context)

    @staticmethod
    def _diagnose(line: str) -> str:
        if not line.rstrip().endswith(".") and "#" not in line:
            return "statement not terminated with '.'"
        return "term expected (malformed statement)"


def parse_lines(
    lines: Iterable[Union[str, bytes]],
    default_source: str = DEFAULT_SOURCE,
    bnode_scope: str | None = None,
) -> Iterator[Union[Quad, ParseError]]:
    yield from NQuadsParser(default_source, bnode_scope).parse_lines(lines)


def _open_stream(path: Path) -> IO[bytes]:
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def parse_path(
    path: Union[str, Path],
    default_source: str = DEFAULT_SOURCE,
    bnode_scope: str | None = None,
    counters: ParseCounters | None = None,
) -> Iterator[Union[Quad, ParseError]]:
    """Parse one file (gzip-compressed when the name ends in .gz)."""
    path = Path(path)
    parser = NQuadsParser(default_source, bnode_scope)
    if counters is not None:
        parser.counters = counters
    try:
        with _open_stream(path) as fh:
            yield from parser.parse_lines(fh)
    except OSError as exc:
        raise StreamAborted(f"cannot read {path}: {exc}") from exc


def parse_paths(
    paths: Iterable[Union[str, Path]],
    default_source: str = DEFAULT_SOURCE,
    counters: ParseCounters | None = None,
) -> Iterator[Union[Quad, ParseError]]:
    """Parse several files, scoping blank-node labels per file."""
    for i, path in enumerate(paths):
        yield from parse_path(path, default_source, bnode_scope=f"f{i}", counters=counters)


def quads_only(stream: Iterable[Union[Quad, ParseError]]) -> Iterator[Quad]:
    for item in stream:
        if isinstance(item, Quad):
            yield item


def write_quads(path: Union[str, Path], quads: Iterable[Quad]) -> int:
    """Serialize quads to a file (gzip by extension); returns the line count."""
    from .terms import format_quad

    path = Path(path)
    count = 0
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wt", encoding="utf-8") as fh:
        for q in quads:
            fh.write(format_quad(q))
            fh.write("\n")
            count += 1
    return count

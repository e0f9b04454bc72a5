"""RDF term and quad model shared by all pipeline stages."""
from __future__ import annotations

from dataclasses import dataclass

IRI = "iri"
BLANK = "bnode"
LITERAL = "literal"

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASSOF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
RDFS_SUBPROPERTYOF = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf"
RDFS_DOMAIN = "http://www.w3.org/2000/01/rdf-schema#domain"
RDFS_RANGE = "http://www.w3.org/2000/01/rdf-schema#range"
OWL_SAMEAS = "http://www.w3.org/2002/07/owl#sameAs"
XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"

DEFAULT_SOURCE = "urn:fluid:source/default"


@dataclass(frozen=True, slots=True)
class Term:
    """One RDF term: an IRI, a blank node, or a literal.

    Literals are compared by exact lexical form plus datatype/language;
    no value-space canonicalization is applied ("1" and "01" differ).
    """

    kind: str
    value: str
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self) -> None:
        if self.kind != LITERAL and (self.datatype is not None or self.language is not None):
            raise ValueError("datatype/language only apply to literals")
        if self.datatype is not None and self.language is not None:
            raise ValueError("a literal has a datatype or a language tag, never both")


@dataclass(frozen=True, slots=True)
class Quad:
    """One statement (subject, predicate, object, context).

    The context names the data source the statement was observed in.
    """

    subject: Term
    predicate: Term
    object: Term
    context: Term


def iri(value: str) -> Term:
    return Term(IRI, value)


def bnode(label: str) -> Term:
    return Term(BLANK, label)


def literal(value: str, datatype: str | None = None, language: str | None = None) -> Term:
    return Term(LITERAL, value, datatype, language)


_LITERAL_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_literal(text: str) -> str:
    if any(c in text for c in '\\"\n\r\t'):
        for raw, esc in _LITERAL_ESCAPES.items():
            text = text.replace(raw, esc)
    return text


def format_term(t: Term) -> str:
    """Render a term in N-Triples syntax."""
    if t.kind == IRI:
        return f"<{t.value}>"
    if t.kind == BLANK:
        return f"_:{t.value}"
    body = f'"{escape_literal(t.value)}"'
    if t.language is not None:
        return f"{body}@{t.language}"
    if t.datatype is not None:
        return f"{body}^^<{t.datatype}>"
    return body


def format_quad(q: Quad) -> str:
    """Render a quad as one N-Quads line, context always explicit."""
    return (
        f"{format_term(q.subject)} {format_term(q.predicate)} "
        f"{format_term(q.object)} {format_term(q.context)} ."
    )


def term_key(t: Term) -> str:
    """Stable identity string for a term.

    IRIs map to their bare IRI string, blank nodes to "_:label", literals to
    their N-Triples form. The three ranges cannot collide because an IRI
    never starts with '_' or '"' (its scheme starts with a letter).
    """
    if t.kind == IRI:
        return t.value
    if t.kind == BLANK:
        return "_:" + t.value
    return format_term(t)


def key_is_literal(key: str) -> bool:
    return key.startswith('"')


def key_is_bnode(key: str) -> bool:
    return key.startswith("_:")


def term_from_key(key: str) -> Term:
    """Rebuild an IRI or blank-node term from its identity string."""
    if key.startswith("_:"):
        return Term(BLANK, key[2:])
    if key.startswith('"'):
        raise ValueError(f"literal keys cannot be rebuilt into subjects: {key!r}")
    return Term(IRI, key)


def format_key(key: str) -> str:
    """Render a term identity string in N-Triples syntax."""
    if key.startswith("_:") or key.startswith('"'):
        return key
    return f"<{key}>"

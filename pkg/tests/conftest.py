from __future__ import annotations

from pathlib import Path

import pytest

from fluid.terms import RDF_TYPE, Quad, Term, iri

FIXTURES = Path(__file__).parent / "fixtures"

EX = "http://example.org/"


def ex(name: str) -> str:
    return EX + name


def q(s, p, o, g="ds1") -> Quad:
    """Quad builder; bare strings become example.org IRIs, 'rdf:type' is
    expanded, and Term values pass through."""

    def term(x) -> Term:
        if isinstance(x, Term):
            return x
        if x == "rdf:type":
            return iri(RDF_TYPE)
        return iri(x if ":" in x else ex(x))

    return Quad(term(s), term(p), term(o), term(g))


@pytest.fixture
def fig3_path() -> Path:
    return FIXTURES / "fig3.nq"


@pytest.fixture
def fig3_quads(fig3_path):
    from fluid.nquads import parse_path, quads_only

    return list(quads_only(parse_path(fig3_path)))

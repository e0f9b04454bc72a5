"""Seeded synthetic N-Quads corpora with controllable schema heterogeneity.

Instances are drawn from a skewed set of schema profiles (a type subset plus
a property subset), so several instances share a schema structure and
summarization has something to collapse. Edge targets are other instances,
plain literals, or never-described external IRIs; optional RDFS statements
over the vocabulary and owl:sameAs links between instances exercise the
inference paths. Output is fully determined by the spec, seed included.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

from .nquads import write_quads
from .terms import (
    OWL_SAMEAS,
    RDF_TYPE,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    XSD_INTEGER,
    Quad,
    Term,
    iri,
    literal,
)

NS = "http://synth.example/"

SCHEMA_FRONT = "front"
SCHEMA_BACK = "back"
SCHEMA_MIXED = "mixed"


@dataclass(frozen=True)
class SynthSpec:
    instances: int = 1000
    types: int = 20
    properties: int = 30
    sources: int = 10
    seed: int = 0
    mean_edges: int = 5
    max_types: int = 3
    literal_rate: float = 0.2
    external_rate: float = 0.1
    typeless_rate: float = 0.1
    sameas_rate: float = 0.0
    rdfs_rate: float = 0.0
    schema_position: str = SCHEMA_FRONT


_TYPE_COUNT_DIST = (1, 1, 1, 2, 2, 3)


def _profiles(spec: SynthSpec, rng: random.Random) -> list[tuple[list[int], list[int]]]:
    count = max(2, min(spec.instances // 5 + 1, 48))
    profiles = []
    for _ in range(count):
        n_types = min(_TYPE_COUNT_DIST[rng.randrange(len(_TYPE_COUNT_DIST))], spec.max_types)
        types = sorted(rng.sample(range(spec.types), min(n_types, spec.types)))
        n_props = max(1, min(rng.randint(1, 2 * spec.mean_edges - 1), spec.properties))
        props = sorted(rng.sample(range(spec.properties), n_props))
        profiles.append((types, props))
    return profiles


def _schema_quads(spec: SynthSpec, rng: random.Random) -> list[Quad]:
    quads: list[Quad] = []
    if spec.rdfs_rate <= 0:
        return quads
    src = iri(f"{NS}ds/{rng.randrange(spec.sources)}")

    def emit(s: str, p: str, o: str) -> None:
        quads.append(Quad(iri(s), iri(p), iri(o), src))

    for i in range(1, spec.types):
        if rng.random() < spec.rdfs_rate:
            emit(f"{NS}t/{i}", RDFS_SUBCLASSOF, f"{NS}t/{rng.randrange(i)}")
    for i in range(1, spec.properties):
        if rng.random() < spec.rdfs_rate:
            emit(f"{NS}p/{i}", RDFS_SUBPROPERTYOF, f"{NS}p/{rng.randrange(i)}")
        if rng.random() < spec.rdfs_rate / 2:
            emit(f"{NS}p/{i}", RDFS_DOMAIN, f"{NS}t/{rng.randrange(spec.types)}")
        if rng.random() < spec.rdfs_rate / 2:
            emit(f"{NS}p/{i}", RDFS_RANGE, f"{NS}t/{rng.randrange(spec.types)}")
    return quads


def _object_term(spec: SynthSpec, rng: random.Random) -> Term:
    roll = rng.random()
    if roll < spec.literal_rate:
        pick = rng.random()
        if pick < 0.2:
            return literal(str(rng.randrange(1000)), datatype=XSD_INTEGER)
        if pick < 0.3:
            return literal(f"text {rng.randrange(200)}", language="en")
        return literal(f"v{rng.randrange(200)}")
    if roll < spec.literal_rate + spec.external_rate:
        return iri(f"{NS}ext/{rng.randrange(max(spec.instances // 2, 1))}")
    return iri(f"{NS}i/{rng.randrange(spec.instances)}")


def generate_quads(spec: SynthSpec) -> list[Quad]:
    rng = random.Random(spec.seed)
    profiles = _profiles(spec, rng)
    rdf_type = iri(RDF_TYPE)
    same_as = iri(OWL_SAMEAS)
    body: list[Quad] = []
    for i in range(spec.instances):
        subject = iri(f"{NS}i/{i}")
        profile = profiles[int(len(profiles) * rng.random() ** 1.5)]
        n_sources = 2 if rng.random() < 0.2 else 1
        ctxs = [iri(f"{NS}ds/{rng.randrange(spec.sources)}") for _ in range(n_sources)]
        ctx = lambda: ctxs[rng.randrange(len(ctxs))]  # noqa: E731
        if rng.random() >= spec.typeless_rate:
            for t in profile[0]:
                body.append(Quad(subject, rdf_type, iri(f"{NS}t/{t}"), ctx()))
        for p in profile[1]:
            prop = iri(f"{NS}p/{p}")
            body.append(Quad(subject, prop, _object_term(spec, rng), ctx()))
            if rng.random() < 0.3:
                body.append(Quad(subject, prop, _object_term(spec, rng), ctx()))
        if spec.sameas_rate > 0 and rng.random() < spec.sameas_rate:
            other = iri(f"{NS}i/{rng.randrange(spec.instances)}")
            body.append(Quad(subject, same_as, other, ctx()))
    rng.shuffle(body)
    schema = _schema_quads(spec, rng)
    if spec.schema_position == SCHEMA_FRONT:
        return schema + body
    if spec.schema_position == SCHEMA_BACK:
        return body + schema
    combined = schema + body
    rng.shuffle(combined)
    return combined


def generate_file(path: Union[str, Path], spec: SynthSpec) -> int:
    """Write a corpus to disk; returns the number of quads written."""
    return write_quads(path, generate_quads(spec))


def with_seed(spec: SynthSpec, seed: int) -> SynthSpec:
    return replace(spec, seed=seed)

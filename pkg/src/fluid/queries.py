"""Data-driven query generation and execution against an index.

Simple queries retrieve by exact type-set equality (object-set equality for
object-identity models); complex queries match the complete canonical
schema structure. Both are generated from a gold index by seeded uniform
sampling without replacement, so every generated query has a nonempty gold
answer and equal seeds reproduce identical query files byte for byte.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from .errors import EmptyIndex, IncompatibleModel, QueryGenerationError
from .index import Index
from .summarizer import NEIGHBOR_OBJECT_IDENTITY, ModelConfig, digest

SIMPLE = "simple"
COMPLEX = "complex"


@dataclass(frozen=True)
class Query:
    cfg: ModelConfig
    kind: str
    body: object  # sorted list of keys for simple, canonical description for complex

    @property
    def qid(self) -> str:
        return digest({"kind": self.kind, "body": self.body})


@dataclass(frozen=True)
class QueryResult:
    query: Query
    data_sources: frozenset[str]


def _simple_component(cfg: ModelConfig) -> str:
    if cfg.neighbor_mode == NEIGHBOR_OBJECT_IDENTITY:
        return "objects"
    if cfg.use_type_set:
        return "types"
    raise QueryGenerationError(
        f"{cfg.preset or 'this model'} has no type component; simple queries unavailable"
    )


def generate_queries(
    gold: Index, kind: str, sample_size: int = 1000, seed: int = 0
) -> list[Query]:
    """Seeded sample of queries out of a finalized gold index.

    Complex queries are element descriptions; simple queries are the
    deduplicated type-set (or object-set) projections of the sampled
    elements, empty projections dropped.
    """
    if kind not in (SIMPLE, COMPLEX):
        raise ValueError(f"unknown query kind: {kind!r}")
    if not gold.elements:
        raise EmptyIndex("cannot generate queries from an empty index")
    cfg = gold.cfg
    population = sorted(gold.elements)
    rng = random.Random(seed)
    sampled = rng.sample(population, min(sample_size, len(population)))
    if kind == COMPLEX:
        return [Query(cfg, COMPLEX, gold.elements[eid].description) for eid in sampled]
    component = _simple_component(cfg)
    queries: list[Query] = []
    seen: set[tuple[str, ...]] = set()
    for eid in sampled:
        description = gold.elements[eid].description
        if component == "objects":
            body = tuple(sorted({obj for _, obj in description.get("pairs", ())}))
        else:
            body = tuple(description.get("types", ()))
        if not body or body in seen:
            continue
        seen.add(body)
        queries.append(Query(cfg, SIMPLE, list(body)))
    return queries


def execute(index: Index, q: Query) -> QueryResult:
    """Exact-match retrieval; unknown structures yield the empty source set."""
    if q.cfg.family() != index.cfg.family():
        raise IncompatibleModel(
            "query model family/height does not match the index"
        )
    if q.kind == COMPLEX:
        payload = index.elements.get(digest(q.body))
        sources: Iterable[str] = payload.sources if payload is not None else ()
    else:
        key = tuple(q.body)
        if _simple_component(q.cfg) == "objects":
            sources = index.object_projection().get(key, ())
        else:
            sources = index.type_projection().get(key, ())
    return QueryResult(q, frozenset(sources))


def write_queries(path: Union[str, Path], queries: Iterable[Query]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(
                json.dumps(
                    {"id": q.qid, "kind": q.kind, "model": q.cfg.to_dict(), "body": q.body},
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
            count += 1
    return count


def read_queries(path: Union[str, Path]) -> list[Query]:
    queries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            queries.append(
                Query(ModelConfig.from_dict(record["model"]), record["kind"], record["body"])
            )
    return queries


def write_results(path: Union[str, Path], results: Iterable[QueryResult]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                json.dumps(
                    {
                        "id": r.query.qid,
                        "kind": r.query.kind,
                        "sources": sorted(r.data_sources),
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
            count += 1
    return count

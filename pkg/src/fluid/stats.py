"""Per-dataset statistics over a quad stream.

An instance is a distinct subject. Type edges are tracked apart from other
predicates: "outgoing properties" excludes rdf:type, whose objects are
counted as types instead. Incoming properties of a subject are the distinct
predicates of quads pointing at it, rdf:type included. Standard deviations
are population SDs; all per-instance figures are integer counts, so results
are exactly order-invariant.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .terms import LITERAL, RDF_TYPE, Quad, term_key


@dataclass(frozen=True)
class DatasetStats:
    triple_count: int = 0
    instance_count: int = 0
    data_source_count: int = 0
    unique_properties: int = 0
    unique_types: int = 0
    mean_out_properties: float = 0.0
    sd_out_properties: float = 0.0
    mean_in_properties: float = 0.0
    sd_in_properties: float = 0.0
    mean_types: float = 0.0
    sd_types: float = 0.0
    mean_data_sources: float = 0.0
    sd_data_sources: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetStats":
        return cls(**data)


def _mean_sd(counts: Iterable[int], n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 0.0
    total = 0
    total_sq = 0
    for c in counts:
        total += c
        total_sq += c * c
    mean = total / n
    var = total_sq / n - mean * mean
    return mean, math.sqrt(var) if var > 0 else 0.0


class StatsAccumulator:
    """Streaming accumulator behind compute_dataset_stats."""

    def __init__(self) -> None:
        self.triple_count = 0
        self._out: dict[str, set[str]] = {}
        self._types: dict[str, set[str]] = {}
        self._sources: dict[str, set[str]] = {}
        self._incoming: dict[str, set[str]] = {}
        self._contexts: set[str] = set()
        self._all_props: set[str] = set()
        self._all_types: set[str] = set()

    def add(self, q: Quad) -> None:
        self.triple_count += 1
        sk = term_key(q.subject)
        p = q.predicate.value
        self._contexts.add(q.context.value)
        sources = self._sources.get(sk)
        if sources is None:
            self._sources[sk] = {q.context.value}
            self._out[sk] = set()
            self._types[sk] = set()
        else:
            sources.add(q.context.value)
        if p == RDF_TYPE:
            ok = term_key(q.object)
            self._types[sk].add(ok)
            self._all_types.add(ok)
        else:
            self._out[sk].add(p)
            self._all_props.add(p)
        if q.object.kind != LITERAL:
            ok = term_key(q.object)
            incoming = self._incoming.get(ok)
            if incoming is None:
                self._incoming[ok] = {p}
            else:
                incoming.add(p)

    def finalize(self) -> DatasetStats:
        subjects = self._sources
        n = len(subjects)
        mean_out, sd_out = _mean_sd((len(v) for v in self._out.values()), n)
        mean_types, sd_types = _mean_sd((len(v) for v in self._types.values()), n)
        mean_src, sd_src = _mean_sd((len(v) for v in self._sources.values()), n)
        mean_in, sd_in = _mean_sd(
            (len(self._incoming.get(sk, ())) for sk in subjects), n
        )
        return DatasetStats(
            triple_count=self.triple_count,
            instance_count=n,
            data_source_count=len(self._contexts),
            unique_properties=len(self._all_props),
            unique_types=len(self._all_types),
            mean_out_properties=mean_out,
            sd_out_properties=sd_out,
            mean_in_properties=mean_in,
            sd_in_properties=sd_in,
            mean_types=mean_types,
            sd_types=sd_types,
            mean_data_sources=mean_src,
            sd_data_sources=sd_src,
        )


def compute_dataset_stats(quads: Iterable[Quad]) -> DatasetStats:
    acc = StatsAccumulator()
    for q in quads:
        acc.add(q)
    return acc.finalize()

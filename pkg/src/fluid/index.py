"""Schema-level index: element payloads, OR-merging, RDF persistence.

The index maps element ids to payloads (data-source set, instance count,
canonical description). It is persisted as sorted N-Triples under the
urn:fluid: namespace next to a JSON sidecar holding the model config,
dataset statistics, and per-element instance counts; the serialized pair is
sufficient to answer every query the index supports.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Union

from . import __version__
from .errors import EmptySources, FluidError, IndexFormatError
from .nquads import ParseError, parse_path
from .stats import DatasetStats
from .summarizer import (
    NEIGHBOR_AGGREGATED_TYPES,
    NEIGHBOR_OBJECT_IDENTITY,
    NEIGHBOR_SCHEMA,
    ModelConfig,
    SchemaElement,
    digest,
)
from .terms import RDF_TYPE, format_key, term_key
from .union_find import MinUnionFind

VOCAB = "urn:fluid:"
ELEMENT_NS = VOCAB + "element/"
SCHEMA_ELEMENT_CLASS = VOCAB + "SchemaElement"
HAS_TYPE = VOCAB + "hasType"
HAS_PROPERTY = VOCAB + "hasProperty"
HAS_INCOMING_PROPERTY = VOCAB + "hasIncomingProperty"
HAS_NEIGHBOR_TYPE = VOCAB + "hasNeighborType"
HAS_NEIGHBOR_ELEMENT = VOCAB + "hasNeighborElement"
HAS_OUT_CLIQUE = VOCAB + "hasOutgoingPropertyClique"
HAS_IN_CLIQUE = VOCAB + "hasIncomingPropertyClique"
FOUND_IN = VOCAB + "foundIn"

INDEX_FILE = "index.nt"
META_FILE = "index.meta.json"
SNAPSHOT_FILE = "schema_graph.tsv"


@dataclass
class Payload:
    sources: set[str] = field(default_factory=set)
    instance_count: int = 0
    description: dict = field(default_factory=dict)


@dataclass(frozen=True)
class IndexMetrics:
    triple_count: int
    element_count: int
    compression_ratio: float
    summarization_ratio: float

    def to_dict(self) -> dict:
        return {
            "triple_count": self.triple_count,
            "element_count": self.element_count,
            "compression_ratio": self.compression_ratio,
            "summarization_ratio": self.summarization_ratio,
        }


class Index:
    """Accumulates schema elements; finalize before serializing or querying."""

    def __init__(
        self,
        cfg: ModelConfig,
        dataset_label: str = "",
        window_capacity: int | None = None,
        window_unit: str = "instances",
    ):
        self.cfg = cfg
        self.dataset_label = dataset_label
        self.window_capacity = window_capacity
        self.window_unit = window_unit
        self.elements: dict[str, Payload] = {}
        self.finalized = False
        self.meta: dict | None = None
        self._type_projection: dict[tuple[str, ...], set[str]] | None = None
        self._object_projection: dict[tuple[str, ...], set[str]] | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def record(self, element: SchemaElement, sources: Iterable[str]) -> None:
        sources = set(sources)
        if not sources:
            raise EmptySources("every summarized instance has at least one data source")
        if self.finalized:
            raise FluidError("cannot record into a finalized index")
        payload = self.elements.get(element.id)
        if payload is None:
            payload = Payload(description=element.description)
            self.elements[element.id] = payload
        payload.sources |= sources
        payload.instance_count += 1

    def finalize(self) -> "Index":
        """Freeze the index; OR-combination models merge elements that share
        an outgoing or an incoming clique, unioning their payloads."""
        if self.finalized:
            return self
        if self.cfg.or_combination:
            self._apply_or_merge()
        self.finalized = True
        return self

    def _apply_or_merge(self) -> None:
        uf = MinUnionFind()
        for eid, payload in self.elements.items():
            node = "e:" + eid
            uf.add(node)
            out_clique = payload.description.get("outClique")
            in_clique = payload.description.get("inClique")
            if out_clique is not None:
                uf.union(node, "o:" + out_clique)
            if in_clique is not None:
                uf.union(node, "i:" + in_clique)
        groups: dict[str, list[str]] = {}
        for eid in self.elements:
            groups.setdefault(uf.canonical("e:" + eid), []).append(eid)
        merged: dict[str, Payload] = {}
        for members in groups.values():
            out_cliques: set[str] = set()
            in_cliques: set[str] = set()
            sources: set[str] = set()
            count = 0
            for eid in members:
                payload = self.elements[eid]
                if payload.description.get("outClique") is not None:
                    out_cliques.add(payload.description["outClique"])
                if payload.description.get("inClique") is not None:
                    in_cliques.add(payload.description["inClique"])
                sources |= payload.sources
                count += payload.instance_count
            description = {
                "outCliques": sorted(out_cliques),
                "inCliques": sorted(in_cliques),
            }
            merged[digest(description)] = Payload(sources, count, description)
        self.elements = merged

    # -- projections for simple queries ------------------------------------

    def _component_projection(self, component: str) -> dict[tuple[str, ...], set[str]]:
        projection: dict[tuple[str, ...], set[str]] = {}
        for payload in self.elements.values():
            values = payload.description.get(component)
            if not values:
                continue
            key = tuple(values)
            projection.setdefault(key, set()).update(payload.sources)
        return projection

    def type_projection(self) -> dict[tuple[str, ...], set[str]]:
        if self._type_projection is None:
            self._type_projection = self._component_projection("types")
        return self._type_projection

    def object_projection(self) -> dict[tuple[str, ...], set[str]]:
        """Distinct object sets of object-identity elements."""
        if self._object_projection is None:
            projection: dict[tuple[str, ...], set[str]] = {}
            for payload in self.elements.values():
                pairs = payload.description.get("pairs")
                if not pairs:
                    continue
                objects = tuple(sorted({obj for _, obj in pairs}))
                projection.setdefault(objects, set()).update(payload.sources)
            self._object_projection = projection
        return self._object_projection

    # -- serialization ------------------------------------------------------

    def serialize_lines(self) -> list[str]:
        """Sorted N-Triples encoding of every element and its payload."""
        if not self.finalized:
            raise FluidError("finalize the index before serializing")
        lines: list[str] = []
        emit = lines.append
        for eid, payload in self.elements.items():
            subject = f"<{ELEMENT_NS}{eid}>"
            emit(f"{subject} <{RDF_TYPE}> <{SCHEMA_ELEMENT_CLASS}> .")
            d = payload.description
            for t in d.get("types", ()):
                emit(f"{subject} <{HAS_TYPE}> {format_key(t)} .")
            for p in d.get("props", ()):
                emit(f"{subject} <{HAS_PROPERTY}> <{p}> .")
            for p in d.get("out", ()):
                emit(f"{subject} <{HAS_PROPERTY}> <{p}> .")
            for p in d.get("in", ()):
                emit(f"{subject} <{HAS_INCOMING_PROPERTY}> <{p}> .")
            for t in d.get("neighborTypes", ()):
                emit(f"{subject} <{HAS_NEIGHBOR_TYPE}> {format_key(t)} .")
            for nid in d.get("neighborElements", ()):
                emit(f"{subject} <{HAS_NEIGHBOR_ELEMENT}> <{ELEMENT_NS}{nid}> .")
            for p, nid in d.get("links", ()):
                emit(f"{subject} <{p}> <{ELEMENT_NS}{nid}> .")
            for p, obj in d.get("pairs", ()):
                emit(f"{subject} <{p}> {format_key(obj)} .")
            for c in d.get("outCliques", ()):
                emit(f"{subject} <{HAS_OUT_CLIQUE}> <{c}> .")
            for c in d.get("inCliques", ()):
                emit(f"{subject} <{HAS_IN_CLIQUE}> <{c}> .")
            for ds in payload.sources:
                emit(f"{subject} <{FOUND_IN}> {format_key(ds)} .")
        lines.sort()
        return lines

    def serialize(self) -> str:
        lines = self.serialize_lines()
        return "\n".join(lines) + ("\n" if lines else "")

    def triple_count(self) -> int:
        return len(self.serialize_lines())

    def compute_metrics(self, stats: DatasetStats) -> IndexMetrics:
        if stats.triple_count == 0 or stats.instance_count == 0:
            raise FluidError("cannot compute ratios against an empty dataset")
        triples = self.triple_count()
        return IndexMetrics(
            triple_count=triples,
            element_count=len(self.elements),
            compression_ratio=triples / stats.triple_count,
            summarization_ratio=len(self.elements) / stats.instance_count,
        )

    # -- persistence ----------------------------------------------------------

    def build_meta(self, stats: DatasetStats | None = None, extra: dict | None = None) -> dict:
        meta = {
            "tool": {"name": "fluid", "version": __version__},
            "model": self.cfg.to_dict(),
            "window": {"capacity": self.window_capacity, "unit": self.window_unit},
            "dataset": {"label": self.dataset_label},
            "element_count": len(self.elements),
            "instance_counts": {
                eid: payload.instance_count for eid, payload in sorted(self.elements.items())
            },
        }
        if stats is not None:
            meta["stats"] = stats.to_dict()
            meta["metrics"] = self.compute_metrics(stats).to_dict()
        if extra:
            meta.update(extra)
        return meta

    def save(
        self,
        directory: Union[str, Path],
        stats: DatasetStats | None = None,
        extra_meta: dict | None = None,
    ) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / INDEX_FILE).write_text(self.serialize(), encoding="utf-8")
        meta = self.build_meta(stats, extra_meta)
        (directory / META_FILE).write_text(
            json.dumps(meta, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
        return directory

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "Index":
        """Rebuild an index from its directory, re-deriving every element
        description from the triples and checking it against its id."""
        directory = Path(directory)
        meta_path = directory / META_FILE
        if not meta_path.exists():
            raise IndexFormatError(f"missing {META_FILE} in {directory}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        cfg = ModelConfig.from_dict(meta["model"])
        index = cls(
            cfg,
            dataset_label=meta.get("dataset", {}).get("label", ""),
            window_capacity=meta.get("window", {}).get("capacity"),
            window_unit=meta.get("window", {}).get("unit", "instances"),
        )
        counts = meta.get("instance_counts", {})
        grouped: dict[str, list[tuple[str, str]]] = {}
        for subject, predicate, obj in _read_triples(directory / INDEX_FILE):
            if not subject.startswith(ELEMENT_NS):
                raise IndexFormatError(f"unexpected subject {subject!r}")
            grouped.setdefault(subject[len(ELEMENT_NS):], []).append((predicate, obj))
        for eid, rows in grouped.items():
            description, sources = _rebuild_description(cfg, rows)
            if digest(description) != eid:
                raise IndexFormatError(f"element {eid} does not match its description")
            index.elements[eid] = Payload(
                sources=sources,
                instance_count=int(counts.get(eid, 0)),
                description=description,
            )
        index.finalized = True
        index.meta = meta
        return index


def _read_triples(path: Path) -> Iterator[tuple[str, str, str]]:
    if not path.exists():
        raise IndexFormatError(f"missing {path.name} in {path.parent}")
    for item in parse_path(path):
        if isinstance(item, ParseError):
            raise IndexFormatError(f"{path.name}:{item.line_no}: {item.reason}")
        yield item.subject.value, item.predicate.value, term_key(item.object)


def _expected_components(cfg: ModelConfig) -> list[str]:
    if cfg.k == 0:
        return ["types"]
    if cfg.related_properties:
        return ["outCliques", "inCliques"]
    if cfg.neighbor_mode == NEIGHBOR_OBJECT_IDENTITY:
        return ["pairs"]
    if cfg.neighbor_mode == NEIGHBOR_SCHEMA:
        return ["types", "links"]
    if cfg.neighbor_mode == NEIGHBOR_AGGREGATED_TYPES:
        base = ["types", "props"]
        base.append("neighborTypes" if cfg.k == 1 else "neighborElements")
        return base
    components = []
    if cfg.use_type_set:
        components.append("types")
    if cfg.use_incoming_property_set:
        components.append("in")
    if cfg.use_property_set:
        if cfg.k >= 2 and not cfg.use_type_set:
            components.append("links")
        elif cfg.use_type_set:
            components.append("props")
        else:
            components.append("out")
    return components


def _rebuild_description(
    cfg: ModelConfig, rows: list[tuple[str, str]]
) -> tuple[dict, set[str]]:
    buckets: dict[str, set] = {}
    sources: set[str] = set()
    for predicate, obj in rows:
        if predicate == FOUND_IN:
            sources.add(obj)
        elif predicate == HAS_TYPE:
            buckets.setdefault("types", set()).add(obj)
        elif predicate == HAS_PROPERTY:
            buckets.setdefault("props", set()).add(obj)
        elif predicate == HAS_INCOMING_PROPERTY:
            buckets.setdefault("in", set()).add(obj)
        elif predicate == HAS_NEIGHBOR_TYPE:
            buckets.setdefault("neighborTypes", set()).add(obj)
        elif predicate == HAS_NEIGHBOR_ELEMENT:
            buckets.setdefault("neighborElements", set()).add(obj[len(ELEMENT_NS):])
        elif predicate == HAS_OUT_CLIQUE:
            buckets.setdefault("outCliques", set()).add(obj)
        elif predicate == HAS_IN_CLIQUE:
            buckets.setdefault("inCliques", set()).add(obj)
        elif predicate == RDF_TYPE and obj == SCHEMA_ELEMENT_CLASS:
            continue
        elif obj.startswith(ELEMENT_NS):
            buckets.setdefault("links", set()).add((predicate, obj[len(ELEMENT_NS):]))
        else:
            buckets.setdefault("pairs", set()).add((predicate, obj))
    description: dict = {}
    for component in _expected_components(cfg):
        # the outgoing set of type-less models serializes through hasProperty
        bucket = "props" if component == "out" else component
        values = buckets.pop(bucket, set())
        if component in ("links", "pairs"):
            description[component] = [list(pair) for pair in sorted(values)]
        else:
            description[component] = sorted(values)
    if buckets:
        raise IndexFormatError(f"unexpected index components: {sorted(buckets)}")
    return description, sources

"""RDFS schema graph, owl:sameAs identity union, and instance enrichment.

The schema graph collects subClassOf / subPropertyOf / domain / range
statements. Enrichment applies them to one instance at a time:

  * inferred properties are the transitive super-properties of the
    instance's outgoing properties;
  * inferred types are the transitive super-classes of the declared types,
    of the domains of all (declared or inferred) outgoing properties, and
    of the ranges of all incoming properties.

Both closures are cycle-safe and the combined rule set reaches its fixed
point in a single application, which makes enrichment idempotent and
monotone in the schema graph.
"""
from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Iterable, Union

from .instances import DataInstance, merge_instances
from .terms import (
    BLANK,
    IRI,
    OWL_SAMEAS,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    Quad,
    term_from_key,
    term_key,
)
from .union_find import MinUnionFind


class InferenceMode(str, Enum):
    NONE = "none"
    ON_THE_FLY = "otf"
    PRE_PROCESSED = "pre"


_SCHEMA_PREDICATES = {RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF, RDFS_DOMAIN, RDFS_RANGE}


class SchemaGraph:
    """Vocabulary-level graph driving RDFS enrichment.

    Mutation (ingest) and closure queries may interleave; closure caches are
    dropped whenever an edge is actually added.
    """

    def __init__(self) -> None:
        self.sub_class_of: dict[str, set[str]] = {}
        self.sub_property_of: dict[str, set[str]] = {}
        self.domain: dict[str, set[str]] = {}
        self.range: dict[str, set[str]] = {}
        self._class_closure: dict[str, frozenset[str]] = {}
        self._property_closure: dict[str, frozenset[str]] = {}

    def __bool__(self) -> bool:
        return bool(
            self.sub_class_of or self.sub_property_of or self.domain or self.range
        )

    def ingest(self, q: Quad) -> bool:
        """Absorb one quad if it is an RDFS schema statement with an IRI object."""
        p = q.predicate.value
        if p not in _SCHEMA_PREDICATES or q.object.kind != IRI:
            return False
        subject = term_key(q.subject)
        obj = q.object.value
        if p == RDFS_SUBCLASSOF:
            table = self.sub_class_of
        elif p == RDFS_SUBPROPERTYOF:
            table = self.sub_property_of
        elif p == RDFS_DOMAIN:
            table = self.domain
        else:
            table = self.range
        entries = table.setdefault(subject, set())
        if obj not in entries:
            entries.add(obj)
            self._class_closure.clear()
            self._property_closure.clear()
        return True

    @staticmethod
    def _reachable(start: str, edges: dict[str, set[str]]) -> frozenset[str]:
        # everything reachable from start; start itself only via a cycle
        seen: set[str] = set()
        stack = list(edges.get(start, ()))
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(edges.get(node, ()))
        return frozenset(seen)

    def superclasses(self, c: str) -> frozenset[str]:
        cached = self._class_closure.get(c)
        if cached is None:
            cached = self._reachable(c, self.sub_class_of)
            self._class_closure[c] = cached
        return cached

    def superproperties(self, p: str) -> frozenset[str]:
        cached = self._property_closure.get(p)
        if cached is None:
            cached = self._reachable(p, self.sub_property_of)
            self._property_closure[p] = cached
        return cached

    def statements(self) -> Iterable[tuple[str, str, str]]:
        for name, table in (
            ("subClassOf", self.sub_class_of),
            ("subPropertyOf", self.sub_property_of),
            ("domain", self.domain),
            ("range", self.range),
        ):
            for subject in sorted(table):
                for obj in sorted(table[subject]):
                    yield name, subject, obj


def enrich_instance(graph: SchemaGraph, inst: DataInstance) -> DataInstance:
    """Fill the instance's inferred type and property sets in place."""
    if not graph:
        return inst
    out_props = {p for p, _ in inst.outgoing}
    closed_props = set(out_props)
    for p in out_props:
        closed_props |= graph.superproperties(p)
    types = set(inst.type_set)
    for p in closed_props:
        types |= graph.domain.get(p, _EMPTY)
    for p in inst.incoming_properties:
        types |= graph.range.get(p, _EMPTY)
    closed_types = set(types)
    for t in types:
        closed_types |= graph.superclasses(t)
    inst.inferred_types = closed_types - inst.type_set
    inst.inferred_properties = closed_props - out_props
    return inst


_EMPTY: frozenset[str] = frozenset()


class SameAsPartition:
    """Union of subjects linked by owl:sameAs chains.

    The canonical representative of a component is its smallest member in
    lexicographic order, so results do not depend on link order.
    """

    def __init__(self) -> None:
        self._uf = MinUnionFind()

    def __len__(self) -> int:
        return len(self._uf)

    def add_link(self, a: str, b: str) -> None:
        self._uf.union(a, b)

    def ingest(self, q: Quad) -> bool:
        if q.predicate.value != OWL_SAMEAS or q.object.kind not in (IRI, BLANK):
            return False
        self.add_link(term_key(q.subject), term_key(q.object))
        return True

    def canonical(self, subject_key: str) -> str:
        return self._uf.canonical(subject_key)

    def members(self, subject_key: str) -> set[str]:
        return self._uf.members(subject_key)

    def links(self) -> Iterable[tuple[str, str]]:
        for component in self._uf.components():
            ordered = sorted(component)
            anchor = ordered[0]
            for other in ordered[1:]:
                yield anchor, other


def merge_same_as_instances(
    partition: SameAsPartition, instances: Iterable[DataInstance]
) -> list[DataInstance]:
    """Merge instances whose subjects share a sameAs component.

    Each merged instance is keyed by the component representative; output is
    sorted by subject so the result is independent of input order.
    """
    groups: dict[str, list[DataInstance]] = {}
    for inst in instances:
        groups.setdefault(partition.canonical(inst.subject_key), []).append(inst)
    merged = []
    for rep in sorted(groups):
        group = groups[rep]
        if len(group) == 1 and group[0].subject_key == rep:
            merged.append(group[0])
        else:
            merged.append(merge_instances(group, term_from_key(rep)))
    return merged


def write_snapshot(
    path: Union[str, Path], graph: SchemaGraph, partition: SameAsPartition | None = None
) -> None:
    """Persist schema statements (and sameAs links) as relation<TAB>s<TAB>o lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for relation, subject, obj in graph.statements():
            fh.write(f"{relation}\t{subject}\t{obj}\n")
        if partition is not None:
            for a, b in partition.links():
                fh.write(f"sameAs\t{a}\t{b}\n")


_SNAPSHOT_TABLES = {
    "subClassOf": "sub_class_of",
    "subPropertyOf": "sub_property_of",
    "domain": "domain",
    "range": "range",
}


def read_snapshot(path: Union[str, Path]) -> tuple[SchemaGraph, SameAsPartition]:
    graph = SchemaGraph()
    partition = SameAsPartition()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected relation\\ts\\to")
            relation, subject, obj = parts
            if relation == "sameAs":
                partition.add_link(subject, obj)
            elif relation in _SNAPSHOT_TABLES:
                getattr(graph, _SNAPSHOT_TABLES[relation]).setdefault(subject, set()).add(obj)
            else:
                raise ValueError(f"{path}:{line_no}: unknown relation {relation!r}")
    return graph, partition

"""Data instances and the bounded instance window.

A data instance is everything known about one subject: its rdf:type objects,
its other outgoing edges, the predicates pointing at it, and the data
sources its quads were observed in. The window keeps at most `capacity`
instances (or an approximate quad budget when unit="quads") and evicts the
least-recently-updated instance; eviction while the stream is still running
is the sole source of approximation error in windowed index computation.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .terms import LITERAL, RDF_TYPE, Quad, Term, key_is_literal, term_from_key, term_key

WINDOW_UNIT_INSTANCES = "instances"
WINDOW_UNIT_QUADS = "quads"


@dataclass
class DataInstance:
    subject: Term
    type_set: set[str] = field(default_factory=set)
    outgoing: set[tuple[str, Term]] = field(default_factory=set)
    incoming_properties: set[str] = field(default_factory=set)
    data_sources: set[str] = field(default_factory=set)
    inferred_types: set[str] = field(default_factory=set)
    inferred_properties: set[str] = field(default_factory=set)
    quad_weight: int = 0

    @property
    def subject_key(self) -> str:
        return term_key(self.subject)

    def effective_types(self) -> set[str]:
        if not self.inferred_types:
            return self.type_set
        return self.type_set | self.inferred_types

    def property_set(self) -> set[str]:
        """Distinct outgoing predicates plus inferred ones; rdf:type is never
        a member (type edges live in type_set)."""
        props = {p for p, _ in self.outgoing}
        if self.inferred_properties:
            props |= self.inferred_properties
        return props

    def edge_keys(self) -> set[tuple[str, str]]:
        """All (predicate, object-key) edges, type edges included."""
        edges = {(p, term_key(o)) for p, o in self.outgoing}
        edges.update((RDF_TYPE, t) for t in self.type_set)
        return edges


def merge_instances(group: Iterable[DataInstance], subject: Term) -> DataInstance:
    """Union a group of instances under one subject."""
    merged = DataInstance(subject=subject)
    for inst in group:
        merged.type_set |= inst.type_set
        merged.outgoing |= inst.outgoing
        merged.incoming_properties |= inst.incoming_properties
        merged.data_sources |= inst.data_sources
        merged.inferred_types |= inst.inferred_types
        merged.inferred_properties |= inst.inferred_properties
        merged.quad_weight += inst.quad_weight
    return merged


class InstanceWindow:
    """Single-writer LRU cache of instances keyed by subject.

    Incoming properties are only discoverable while both edge endpoints are
    co-resident: reverse edges of an evicted source are dropped, so subjects
    arriving later no longer see them.
    """

    def __init__(self, capacity: int | None = None, unit: str = WINDOW_UNIT_INSTANCES):
        if capacity is not None and capacity < 1:
            raise ValueError("window capacity must be >= 1 or None for unbounded")
        if unit not in (WINDOW_UNIT_INSTANCES, WINDOW_UNIT_QUADS):
            raise ValueError(f"unknown window unit: {unit!r}")
        self.capacity = capacity
        self.unit = unit
        self.instances: "OrderedDict[str, DataInstance]" = OrderedDict()
        self._reverse: dict[str, set[tuple[str, str]]] = {}
        self.quad_load = 0
        self.last_touched: DataInstance | None = None

    def __len__(self) -> int:
        return len(self.instances)

    def get(self, subject_key: str) -> DataInstance | None:
        return self.instances.get(subject_key)

    def absorb(self, q: Quad) -> list[DataInstance]:
        """Fold one quad into its subject's instance; returns evictions.

        Re-absorbing an identical quad is idempotent on instance content and
        only refreshes the subject's recency. The instance-unit window evicts
        at most one instance per call; the quad-unit window may evict several.
        """
        instances = self.instances
        sk = term_key(q.subject)
        inst = instances.get(sk)
        created = inst is None
        if created:
            inst = DataInstance(subject=q.subject)
            instances[sk] = inst
        else:
            instances.move_to_end(sk)
        self.last_touched = inst
        inst.quad_weight += 1
        self.quad_load += 1
        inst.data_sources.add(q.context.value)
        p = q.predicate.value
        if p == RDF_TYPE:
            inst.type_set.add(term_key(q.object))
        else:
            inst.outgoing.add((p, q.object))
        if q.object.kind != LITERAL:
            ok = term_key(q.object)
            target = instances.get(ok)
            if target is not None:
                target.incoming_properties.add(p)
            rev = self._reverse.get(ok)
            if rev is None:
                self._reverse[ok] = {(p, sk)}
            else:
                rev.add((p, sk))
        if created:
            rev = self._reverse.get(sk)
            if rev:
                inst.incoming_properties.update(pp for pp, _ in rev)
            return self._evict_over_capacity(sk)
        if self.unit == WINDOW_UNIT_QUADS:
            return self._evict_over_capacity(sk)
        return []

    def _evict_over_capacity(self, current_key: str) -> list[DataInstance]:
        capacity = self.capacity
        if capacity is None:
            return []
        evicted: list[DataInstance] = []
        if self.unit == WINDOW_UNIT_INSTANCES:
            while len(self.instances) > capacity:
                evicted.append(self.pop_oldest())
        else:
            # never evict the subject just touched, even when over budget
            while self.quad_load > capacity and len(self.instances) > 1:
                oldest = next(iter(self.instances))
                if oldest == current_key:
                    break
                evicted.append(self.pop_oldest())
        return evicted

    def pop_oldest(self) -> DataInstance:
        sk, inst = self.instances.popitem(last=False)
        self._drop_reverse_entries(inst, sk)
        self.quad_load -= inst.quad_weight
        return inst

    def remove(self, subject_key: str) -> DataInstance | None:
        inst = self.instances.pop(subject_key, None)
        if inst is not None:
            self._drop_reverse_entries(inst, subject_key)
            self.quad_load -= inst.quad_weight
        return inst

    def _drop_reverse_entries(self, inst: DataInstance, sk: str) -> None:
        reverse = self._reverse
        for p, o in inst.outgoing:
            if o.kind == LITERAL:
                continue
            entries = reverse.get(term_key(o))
            if entries is not None:
                entries.discard((p, sk))
                if not entries:
                    del reverse[term_key(o)]
        for t in inst.type_set:
            if key_is_literal(t):
                continue
            entries = reverse.get(t)
            if entries is not None:
                entries.discard((RDF_TYPE, sk))
                if not entries:
                    del reverse[t]

    def drain_oldest_first(self) -> Iterator[DataInstance]:
        while self.instances:
            yield self.pop_oldest()


def build_instances(quads: Iterable[Quad]) -> dict[str, DataInstance]:
    """Absorb a quad sequence with no capacity limit; exact per-subject state."""
    window = InstanceWindow(capacity=None)
    for q in quads:
        window.absorb(q)
    return dict(window.instances)


def instance_from_key(subject_key: str) -> DataInstance:
    return DataInstance(subject=term_from_key(subject_key))

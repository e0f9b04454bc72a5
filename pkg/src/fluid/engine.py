"""End-to-end index computation over a quad stream.

One pass absorbs quads into the window; an instance is summarized whenever
it leaves the window (capacity eviction mid-stream, or the end-of-stream
flush). With no capacity limit nothing evicts early, every instance is
summarized against the complete instance set at the flush, and the result
is the exact gold standard; a bounded window yields the streaming
approximation instead.

Inference wiring:
  * on-the-fly: the schema graph and sameAs partition grow while the stream
    runs, and an instance is enriched at every absorption with whatever the
    graph knows at that moment; later schema statements never reach
    already-absorbed content.
  * pre-processed: a first pass (or a loaded snapshot) supplies the complete
    schema graph and partition before any instance is summarized; merged
    sameAs groups are re-enriched so unions benefit from all rules.

Property-clique state is global vocabulary-level state: it grows over the
whole stream and is never reset at eviction. sameAs merging happens within
the live window only; merged partners are consumed together so each
resident instance is summarized exactly once per residency.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .errors import InapplicableHeight
from .index import Index
from .inference import (
    InferenceMode,
    SameAsPartition,
    SchemaGraph,
    enrich_instance,
    read_snapshot,
)
from .instances import DataInstance, InstanceWindow, merge_instances
from .nquads import ParseCounters, parse_paths, quads_only
from .stats import DatasetStats, StatsAccumulator
from .summarizer import (
    MappingNeighbors,
    ModelConfig,
    NeighborContext,
    PropertyCliquePartition,
    schema_element,
)
from .terms import DEFAULT_SOURCE, Quad, term_from_key

logger = logging.getLogger("fluid.engine")

_PROGRESS_EVERY = 250_000


@dataclass
class RunPlan:
    """Everything one build needs; pre-processed inference implies a first
    pass over the inputs unless a schema snapshot is supplied."""

    cfg: ModelConfig
    input_paths: list[Path]
    window_capacity: int | None = None
    window_unit: str = "instances"
    default_source: str = DEFAULT_SOURCE
    dataset_label: str = ""
    schema_snapshot: Path | None = None


@dataclass
class BuildResult:
    index: Index
    stats: DatasetStats
    parse_counters: ParseCounters = field(default_factory=ParseCounters)
    assignments: list[tuple[str, str]] | None = None
    schema_graph: SchemaGraph | None = None
    partition: SameAsPartition | None = None


def check_height(cfg: ModelConfig) -> None:
    if cfg.k == 0 and not cfg.use_type_set:
        name = cfg.preset or "this model"
        raise InapplicableHeight(f"height 0 inapplicable for {name}: no type component")


class _LiveNeighbors(NeighborContext):
    """Neighbor resolution against the live window for one eviction batch."""

    def __init__(
        self,
        window: InstanceWindow,
        merged: DataInstance,
        merged_key: str,
        partition: SameAsPartition | None,
    ):
        self._window = window
        self._merged = merged
        self._merged_key = merged_key
        self._partition = partition
        self._views: dict[str, DataInstance | None] = {}

    def canon(self, key: str) -> str:
        return self._partition.canonical(key) if self._partition is not None else key

    def resolve(self, key: str) -> DataInstance | None:
        if key == self._merged_key:
            return self._merged
        if self._partition is None:
            return self._window.get(key)
        view = self._views.get(key, _UNSET)
        if view is _UNSET:
            members = [
                inst
                for mk in sorted(self._partition.members(key))
                if (inst := self._window.get(mk)) is not None
            ]
            if not members:
                view = None
            elif len(members) == 1:
                view = members[0]
            else:
                view = merge_instances(members, term_from_key(key))
            self._views[key] = view
        return view


_UNSET = object()


class _StreamRun:
    def __init__(
        self,
        cfg: ModelConfig,
        window_capacity: int | None,
        window_unit: str,
        schema_graph: SchemaGraph | None,
        partition: SameAsPartition | None,
        dataset_label: str,
        collect_assignments: bool,
    ):
        check_height(cfg)
        self.cfg = cfg
        self.window = InstanceWindow(window_capacity, window_unit)
        self.index = Index(cfg, dataset_label, window_capacity, window_unit)
        self.cliques = PropertyCliquePartition() if cfg.related_properties else None
        self.stats = StatsAccumulator()
        self.assignments: list[tuple[str, str]] | None = [] if collect_assignments else None
        self.pre_mode = cfg.rdfs_mode is InferenceMode.PRE_PROCESSED
        self.otf_mode = cfg.rdfs_mode is InferenceMode.ON_THE_FLY
        if self.pre_mode:
            if schema_graph is None:
                raise ValueError("pre-processed inference needs the pass-1 schema graph")
            self.graph: SchemaGraph | None = schema_graph
        elif self.otf_mode:
            self.graph = SchemaGraph()
        else:
            self.graph = None
        if cfg.same_as:
            self.partition: SameAsPartition | None = (
                partition if partition is not None else SameAsPartition()
            )
            self.grow_partition = partition is None
        else:
            self.partition = None
            self.grow_partition = False

    def absorb(self, q: Quad) -> None:
        self.stats.add(q)
        if self.otf_mode:
            self.graph.ingest(q)
        if self.grow_partition:
            self.partition.ingest(q)
        evicted = self.window.absorb(q)
        if self.graph is not None:
            enrich_instance(self.graph, self.window.last_touched)
        for inst in evicted:
            self._summarize_evicted(inst)

    def _gather_group(
        self, inst: DataInstance, take: InstanceWindow
    ) -> tuple[DataInstance, list[str], str]:
        """Pull the instance's co-resident sameAs partners out of the window
        and merge them; returns (merged, member subject keys, canonical key)."""
        sk = inst.subject_key
        if self.partition is None:
            return inst, [sk], sk
        ck = self.partition.canonical(sk)
        group = [inst]
        for mk in sorted(self.partition.members(ck)):
            if mk == sk:
                continue
            partner = take.remove(mk)
            if partner is not None:
                group.append(partner)
        if len(group) == 1:
            return inst, [sk], ck
        merged = merge_instances(group, term_from_key(ck))
        if self.pre_mode:
            # the union can satisfy rules no single member did
            enrich_instance(self.graph, merged)
        return merged, [g.subject_key for g in group], ck

    def _record(self, merged: DataInstance, members: list[str], neighbors, memo) -> None:
        element = schema_element(self.cfg, merged, neighbors, self.cliques, memo)
        self.index.record(element, merged.data_sources)
        if self.assignments is not None:
            self.assignments.extend((mk, element.id) for mk in members)

    def _summarize_evicted(self, inst: DataInstance) -> None:
        merged, members, ck = self._gather_group(inst, self.window)
        if self.cliques is not None:
            self.cliques.update(merged)
        neighbors = _LiveNeighbors(self.window, merged, ck, self.partition)
        self._record(merged, members, neighbors, {})

    def flush(self) -> None:
        """Summarize everything still resident against a frozen snapshot of
        the remaining instances, in eviction order."""
        groups: list[tuple[DataInstance, list[str], str]] = []
        while self.window.instances:
            groups.append(self._gather_group(self.window.pop_oldest(), self.window))
        if self.cliques is not None:
            for merged, _, _ in groups:
                self.cliques.update(merged)
        universe = {ck: merged for merged, _, ck in groups}
        neighbors = MappingNeighbors(
            universe, canon=self.partition.canonical if self.partition else None
        )
        memo: dict = {}
        for merged, members, _ in groups:
            self._record(merged, members, neighbors, memo)

    def finish(self) -> BuildResult:
        self.flush()
        self.index.finalize()
        return BuildResult(
            index=self.index,
            stats=self.stats.finalize(),
            assignments=self.assignments,
            schema_graph=self.graph,
            partition=self.partition,
        )


def compute_index(
    quads: Iterable[Quad],
    cfg: ModelConfig,
    *,
    window_capacity: int | None = None,
    window_unit: str = "instances",
    schema_graph: SchemaGraph | None = None,
    partition: SameAsPartition | None = None,
    dataset_label: str = "",
    collect_assignments: bool = False,
) -> BuildResult:
    """Single-pass index computation over an in-memory or streamed quad
    sequence. Pre-processed inference requires the complete schema graph
    (and, with sameAs, the complete partition) up front."""
    run = _StreamRun(
        cfg,
        window_capacity,
        window_unit,
        schema_graph,
        partition,
        dataset_label,
        collect_assignments,
    )
    started = time.monotonic()
    n = 0
    for q in quads:
        run.absorb(q)
        n += 1
        if n % _PROGRESS_EVERY == 0:
            elapsed = time.monotonic() - started
            logger.info(
                "absorbed %d quads (%.0f quads/s, window holds %d instances)",
                n,
                n / elapsed if elapsed else 0.0,
                len(run.window),
            )
    result = run.finish()
    logger.info(
        "finished: %d quads, %d elements, %.1fs",
        n,
        len(result.index),
        time.monotonic() - started,
    )
    return result


def collect_schema(
    paths: Iterable[Union[str, Path]],
    default_source: str = DEFAULT_SOURCE,
    with_same_as: bool = True,
) -> tuple[SchemaGraph, SameAsPartition]:
    """Pass 1 of pre-processed inference: scan inputs for schema statements."""
    graph = SchemaGraph()
    partition = SameAsPartition()
    for q in quads_only(parse_paths(paths, default_source)):
        if not graph.ingest(q) and with_same_as:
            partition.ingest(q)
    return graph, partition


def build_index(plan: RunPlan, collect_assignments: bool = False) -> BuildResult:
    """Run a plan against its input files, with the pre-processing pass when
    the model calls for it."""
    check_height(plan.cfg)
    graph: SchemaGraph | None = None
    partition: SameAsPartition | None = None
    if plan.cfg.rdfs_mode is InferenceMode.PRE_PROCESSED:
        if plan.schema_snapshot is not None:
            graph, partition = read_snapshot(plan.schema_snapshot)
            logger.info("loaded schema snapshot from %s", plan.schema_snapshot)
        else:
            graph, partition = collect_schema(
                plan.input_paths, plan.default_source, with_same_as=plan.cfg.same_as
            )
            logger.info(
                "pass 1 collected %d schema subjects, %d sameAs subjects",
                len(graph.sub_class_of)
                + len(graph.sub_property_of)
                + len(graph.domain)
                + len(graph.range),
                len(partition) if partition else 0,
            )
        if not plan.cfg.same_as:
            partition = None
    counters = ParseCounters()
    stream = quads_only(parse_paths(plan.input_paths, plan.default_source, counters))
    result = compute_index(
        stream,
        plan.cfg,
        window_capacity=plan.window_capacity,
        window_unit=plan.window_unit,
        schema_graph=graph,
        partition=partition,
        dataset_label=plan.dataset_label,
        collect_assignments=collect_assignments,
    )
    result.parse_counters = counters
    return result

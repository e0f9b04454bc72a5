"""Schema-element computation for the six index model families.

A model configuration selects which features of an instance enter its
schema element: the type set, the outgoing/incoming property sets, neighbor
information in one of three styles, and transitively co-occurring property
cliques with OR-combination. The height k bounds neighbor chaining: at k=0
only the type set counts, at k=1 direct neighbors, at k=2 each neighbor is
represented by its own height-1 element.

Elements are canonical: every set in a description is sorted, nested
elements are replaced by their digest, and the element id is a SHA-256 over
the canonical JSON bytes, stable across runs and processes.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Mapping

from .errors import InapplicableHeight, MissingCliques, UnknownPreset
from .inference import InferenceMode
from .instances import DataInstance
from .terms import RDF_TYPE, iri, term_key
from .union_find import MinUnionFind

NEIGHBOR_NONE = "none"
NEIGHBOR_OBJECT_IDENTITY = "object-identity"
NEIGHBOR_SCHEMA = "neighbor-schema"
NEIGHBOR_AGGREGATED_TYPES = "aggregated-neighbor-types"

_NEIGHBOR_MODES = (
    NEIGHBOR_NONE,
    NEIGHBOR_OBJECT_IDENTITY,
    NEIGHBOR_SCHEMA,
    NEIGHBOR_AGGREGATED_TYPES,
)


@dataclass(frozen=True)
class ModelConfig:
    """Feature flags plus height k; one row of the model/feature matrix."""

    use_property_set: bool = False
    use_type_set: bool = False
    use_incoming_property_set: bool = False
    neighbor_mode: str = NEIGHBOR_NONE
    or_combination: bool = False
    related_properties: bool = False
    rdfs_mode: InferenceMode = InferenceMode.NONE
    same_as: bool = False
    k: int = 1
    preset: str | None = None

    def __post_init__(self) -> None:
        if self.k not in (0, 1, 2):
            raise ValueError("height k must be 0, 1, or 2")
        if self.neighbor_mode not in _NEIGHBOR_MODES:
            raise ValueError(f"unknown neighbor mode: {self.neighbor_mode!r}")
        if self.or_combination and not self.related_properties:
            raise ValueError("OR-combination is defined over property cliques only")
        if self.neighbor_mode != NEIGHBOR_NONE and self.k == 0:
            raise ValueError("neighbor information requires k >= 1")
        if not isinstance(self.rdfs_mode, InferenceMode):
            object.__setattr__(self, "rdfs_mode", InferenceMode(self.rdfs_mode))

    @property
    def type_capable(self) -> bool:
        return self.use_type_set

    def family(self) -> tuple:
        """Structural identity used for query/index compatibility checks;
        inference flags change index content, not its shape."""
        return (
            self.use_property_set,
            self.use_type_set,
            self.use_incoming_property_set,
            self.neighbor_mode,
            self.or_combination,
            self.related_properties,
            self.k,
        )

    def to_dict(self) -> dict:
        return {
            "use_property_set": self.use_property_set,
            "use_type_set": self.use_type_set,
            "use_incoming_property_set": self.use_incoming_property_set,
            "neighbor_mode": self.neighbor_mode,
            "or_combination": self.or_combination,
            "related_properties": self.related_properties,
            "rdfs_mode": self.rdfs_mode.value,
            "same_as": self.same_as,
            "k": self.k,
            "preset": self.preset,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModelConfig":
        return cls(
            use_property_set=bool(data.get("use_property_set", False)),
            use_type_set=bool(data.get("use_type_set", False)),
            use_incoming_property_set=bool(data.get("use_incoming_property_set", False)),
            neighbor_mode=data.get("neighbor_mode", NEIGHBOR_NONE),
            or_combination=bool(data.get("or_combination", False)),
            related_properties=bool(data.get("related_properties", False)),
            rdfs_mode=InferenceMode(data.get("rdfs_mode", "none")),
            same_as=bool(data.get("same_as", False)),
            k=int(data.get("k", 1)),
            preset=data.get("preset"),
        )


_PRESET_FLAGS: dict[str, dict] = {
    "characteristic-sets": dict(
        use_property_set=True,
        use_incoming_property_set=True,
    ),
    "semsets": dict(
        use_property_set=True,
        neighbor_mode=NEIGHBOR_OBJECT_IDENTITY,
    ),
    "weak-property-clique": dict(
        use_property_set=True,
        use_incoming_property_set=True,
        related_properties=True,
        or_combination=True,
        rdfs_mode=InferenceMode.PRE_PROCESSED,
    ),
    "schemex": dict(
        use_type_set=True,
        use_property_set=True,
        neighbor_mode=NEIGHBOR_SCHEMA,
    ),
    "termpicker": dict(
        use_type_set=True,
        use_property_set=True,
        neighbor_mode=NEIGHBOR_AGGREGATED_TYPES,
    ),
    "schemex-u-i": dict(
        use_type_set=True,
        use_property_set=True,
        neighbor_mode=NEIGHBOR_SCHEMA,
        rdfs_mode=InferenceMode.PRE_PROCESSED,
        same_as=True,
    ),
}

PRESET_NAMES = tuple(sorted(_PRESET_FLAGS))


def preset(name: str, k: int) -> ModelConfig:
    """Configuration of a named model at height k.

    At k=0 the neighbor component drops out and models that carry a type set
    (or, for semsets, the identical set of rdf:type objects) collapse to the
    type set alone. Models with neither remain constructible at k=0; the
    engine rejects them when an index is actually built.
    """
    flags = _PRESET_FLAGS.get(name)
    if flags is None:
        raise UnknownPreset(f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}")
    if k == 0 and flags.get("neighbor_mode", NEIGHBOR_NONE) != NEIGHBOR_NONE:
        flags = dict(flags, neighbor_mode=NEIGHBOR_NONE, use_type_set=True)
    return ModelConfig(k=k, preset=name, **flags)


@dataclass(frozen=True)
class SchemaElement:
    """Digest plus the canonical structural form it digests."""

    id: str
    description: dict

    def __hash__(self) -> int:
        return hash(self.id)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SchemaElement) and self.id == other.id


def canonical_bytes(description: dict) -> bytes:
    return json.dumps(
        description, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def digest(description: dict) -> str:
    return hashlib.sha256(canonical_bytes(description)).hexdigest()


class PropertyCliquePartition:
    """Transitive co-occurrence cliques, one partition per edge direction."""

    def __init__(self) -> None:
        self.outgoing = MinUnionFind()
        self.incoming = MinUnionFind()

    def update(self, inst: DataInstance) -> None:
        """Union all co-occurring properties of one instance.

        Outgoing co-occurrence is taken over the full predicate set of the
        instance, rdf:type included, matching models that treat the type
        edge as an ordinary property.
        """
        self.outgoing.union_all(sorted(_untyped_out_props(inst)))
        self.incoming.union_all(sorted(inst.incoming_properties))


def update_cliques(cliques: PropertyCliquePartition, inst: DataInstance) -> PropertyCliquePartition:
    cliques.update(inst)
    return cliques


def _untyped_out_props(inst: DataInstance) -> set[str]:
    # outgoing predicates with rdf:type restored as an ordinary property
    props = inst.property_set()
    if inst.type_set:
        props = props | {RDF_TYPE}
    return props


class NeighborContext:
    """Resolution of edge objects during summarization.

    `resolve` maps an object key to the instance it denotes, or None when the
    object is a literal, was evicted, or was never seen. `canon` rewrites an
    object key through the sameAs partition before resolution; the default is
    the identity.
    """

    def resolve(self, key: str) -> DataInstance | None:
        return None

    def canon(self, key: str) -> str:
        return key


class MappingNeighbors(NeighborContext):
    def __init__(
        self,
        mapping: Mapping[str, DataInstance],
        canon: Callable[[str], str] | None = None,
    ):
        self._mapping = mapping
        self._canon = canon

    def resolve(self, key: str) -> DataInstance | None:
        return self._mapping.get(key)

    def canon(self, key: str) -> str:
        return self._canon(key) if self._canon is not None else key


_NULL_NEIGHBORS = NeighborContext()
_EMPTY_INSTANCE = DataInstance(subject=iri("urn:fluid:empty"))


def schema_element(
    cfg: ModelConfig,
    inst: DataInstance,
    neighbors: NeighborContext | None = None,
    cliques: PropertyCliquePartition | None = None,
    memo: dict | None = None,
) -> SchemaElement:
    """Schema element of one instance under cfg.

    Pure in (cfg, instance content, resolvable neighbor content, cliques);
    edge insertion order never changes the id. `memo` caches neighbor
    sub-elements and must only be shared across calls made against one
    frozen neighbor universe.
    """
    nb = neighbors if neighbors is not None else _NULL_NEIGHBORS
    description = _describe(cfg, inst, nb, cliques, memo if memo is not None else {})
    return SchemaElement(id=digest(description), description=description)


def _describe(
    cfg: ModelConfig,
    inst: DataInstance,
    nb: NeighborContext,
    cliques: PropertyCliquePartition | None,
    memo: dict,
) -> dict:
    if cfg.k == 0:
        if not cfg.use_type_set:
            raise InapplicableHeight(
                "height 0 inapplicable: the model has no type component"
            )
        return {"types": sorted(inst.effective_types())}

    if cfg.related_properties:
        if cliques is None:
            raise MissingCliques("related-properties models need clique state")
        out_props = _untyped_out_props(inst)
        in_props = inst.incoming_properties
        return {
            "outClique": cliques.outgoing.canonical(min(out_props)) if out_props else None,
            "inClique": cliques.incoming.canonical(min(in_props)) if in_props else None,
        }

    if cfg.neighbor_mode == NEIGHBOR_OBJECT_IDENTITY:
        # object identity never recurses, so heights 1 and 2 coincide
        pairs = {(p, nb.canon(term_key(o))) for p, o in inst.outgoing}
        pairs.update((RDF_TYPE, t) for t in inst.type_set)
        return {"pairs": [list(pair) for pair in sorted(pairs)]}

    if cfg.neighbor_mode == NEIGHBOR_SCHEMA:
        links = {
            (p, _neighbor_element_id(cfg, term_key(o), nb, cliques, memo))
            for p, o in inst.outgoing
        }
        return {
            "types": sorted(inst.effective_types()),
            "links": [list(link) for link in sorted(links)],
        }

    if cfg.neighbor_mode == NEIGHBOR_AGGREGATED_TYPES:
        description = {
            "types": sorted(inst.effective_types()),
            "props": sorted(inst.property_set()),
        }
        if cfg.k == 1:
            aggregated: set[str] = set()
            for _, o in inst.outgoing:
                neighbor = nb.resolve(nb.canon(term_key(o)))
                if neighbor is not None:
                    aggregated |= neighbor.effective_types()
            description["neighborTypes"] = sorted(aggregated)
        else:
            description["neighborElements"] = sorted(
                {
                    _neighbor_element_id(cfg, term_key(o), nb, cliques, memo)
                    for _, o in inst.outgoing
                }
            )
        return description

    # set-shaped models (characteristic sets and free-form flag mixes)
    description = {}
    if cfg.use_type_set:
        description["types"] = sorted(inst.effective_types())
    if cfg.use_incoming_property_set:
        description["in"] = sorted(inst.incoming_properties)
    if cfg.use_property_set:
        if cfg.k >= 2 and not cfg.use_type_set:
            links = {
                (p, _neighbor_element_id(cfg, ok, nb, cliques, memo))
                for p, ok in inst.edge_keys()
            }
            if inst.inferred_properties:
                # inferred properties have no edge to chain through; they stay
                # visible by linking to the empty element
                empty = empty_element_id(_sub_config(cfg))
                links.update((p, empty) for p in inst.inferred_properties)
            description["links"] = [list(link) for link in sorted(links)]
        elif cfg.use_type_set:
            description["props"] = sorted(inst.property_set())
        else:
            description["out"] = sorted(_untyped_out_props(inst))
    return description


def _sub_config(cfg: ModelConfig) -> ModelConfig:
    """Configuration one hop down; at height 0 only the type set remains."""
    k = cfg.k - 1
    if k == 0:
        return replace(cfg, k=0, neighbor_mode=NEIGHBOR_NONE, use_type_set=True)
    return replace(cfg, k=k)


def _neighbor_element_id(
    cfg: ModelConfig,
    object_key: str,
    nb: NeighborContext,
    cliques: PropertyCliquePartition | None,
    memo: dict,
) -> str:
    """Digest of the height-(k-1) element of an edge target.

    Literals and unresolvable targets map to the element of the empty
    instance, so the property stays visible while the approximation is
    confined to the neighbor component.
    """
    sub = _sub_config(cfg)
    canonical = nb.canon(object_key)
    neighbor = nb.resolve(canonical)
    if neighbor is None:
        return empty_element_id(sub)
    key = (canonical, sub.k)
    cached = memo.get(key)
    if cached is None:
        cached = digest(_describe(sub, neighbor, nb, cliques, memo))
        memo[key] = cached
    return cached


@lru_cache(maxsize=None)
def empty_element_id(cfg: ModelConfig) -> str:
    """Element id of an instance with no content under cfg."""
    return digest(_describe(cfg, _EMPTY_INSTANCE, _NULL_NEIGHBORS, None, {}))

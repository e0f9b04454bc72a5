"""Streaming schema-level indexing of RDF data for data search."""

__version__ = "0.1.0"

from .terms import Quad, Term, bnode, iri, literal  # noqa: E402,F401
from .summarizer import ModelConfig, SchemaElement, preset, schema_element  # noqa: E402,F401
from .engine import RunPlan, build_index, compute_index  # noqa: E402,F401
from .index import Index, IndexMetrics  # noqa: E402,F401
from .queries import Query, execute, generate_queries  # noqa: E402,F401
from .evaluation import evaluate, f1, pearson, spearman  # noqa: E402,F401
from .stats import DatasetStats, compute_dataset_stats  # noqa: E402,F401

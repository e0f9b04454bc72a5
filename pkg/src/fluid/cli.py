"""Command-line front end.

Subcommands: build, stats, querygen, query, eval, correlate, gen-synthetic.
Exit codes: 0 on success, 1 on usage errors, 2 on data errors. Every run
writes a metadata record (resolved flags, input digests, tool version) next
to its outputs, and equal inputs always produce byte-identical outputs.
The FLUID_LOG environment variable (error|warn|info|debug) selects log
verbosity on stderr.
"""
from __future__ import annotations

import argparse
import glob as globmod
import hashlib
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .engine import RunPlan, build_index
from .errors import FluidError
from .evaluation import correlate as correlate_stats
from .evaluation import evaluate
from .index import SNAPSHOT_FILE, Index
from .inference import InferenceMode, write_snapshot
from .nquads import ParseCounters, parse_paths, quads_only
from .queries import execute, generate_queries, read_queries, write_queries, write_results
from .stats import StatsAccumulator
from .summarizer import ModelConfig, PRESET_NAMES, preset
from .synth import SynthSpec, generate_file
from .terms import DEFAULT_SOURCE

logger = logging.getLogger("fluid.cli")

_LOG_LEVELS = {
    "none": logging.CRITICAL,
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for data errors
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _input_digests(paths: Sequence[Path]) -> list[dict]:
    return [{"path": p.name, "sha256": _sha256(p)} for p in paths]


def _run_record(subcommand: str, flags: dict, inputs: Sequence[Path] = ()) -> dict:
    return {
        "tool": {"name": "fluid", "version": __version__},
        "subcommand": subcommand,
        "flags": flags,
        "inputs": _input_digests(list(inputs)),
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")


_CONFIG_BOOL_KEYS = (
    "use_property_set",
    "use_type_set",
    "use_incoming_property_set",
    "or_combination",
    "related_properties",
    "same_as",
)


def _read_config_file(path: Path) -> dict:
    values: dict = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FluidError(f"{path}:{line_no}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in _CONFIG_BOOL_KEYS:
            values[key] = value.lower() in ("1", "true", "yes", "on")
        elif key == "k":
            values[key] = int(value)
        else:
            values[key] = value
    return values


def _assemble_config(args: argparse.Namespace) -> ModelConfig:
    config = _read_config_file(Path(args.config)) if getattr(args, "config", None) else {}
    preset_name = args.model or config.pop("preset", None)
    k = args.k if args.k is not None else config.pop("k", 1)
    if preset_name:
        cfg = preset(preset_name, k)
    else:
        cfg = ModelConfig(k=k)
    overrides: dict = {}
    for key in _CONFIG_BOOL_KEYS + ("neighbor_mode", "rdfs_mode"):
        if key in config:
            overrides[key] = config[key]
    if args.inference is not None:
        overrides["rdfs_mode"] = args.inference
    if args.same_as is not None:
        overrides["same_as"] = args.same_as
    for key in _CONFIG_BOOL_KEYS[:-1] + ("neighbor_mode",):
        flag = getattr(args, key, None)
        if flag is not None:
            overrides[key] = flag
    if "rdfs_mode" in overrides:
        overrides["rdfs_mode"] = InferenceMode(overrides["rdfs_mode"])
    try:
        return replace(cfg, **overrides) if overrides else cfg
    except ValueError as exc:
        raise FluidError(str(exc)) from exc


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=PRESET_NAMES, help="index model preset")
    p.add_argument("--config", help="model configuration file (key = value)")
    p.add_argument("--k", type=int, choices=(0, 1, 2), help="neighbor chaining height")
    p.add_argument(
        "--inference", choices=[m.value for m in InferenceMode], help="RDFS inference mode"
    )
    p.add_argument("--same-as", action=argparse.BooleanOptionalAction, default=None)
    for key in _CONFIG_BOOL_KEYS[:-1]:
        p.add_argument(
            f"--{key.replace('_', '-')}", dest=key,
            action=argparse.BooleanOptionalAction, default=None,
        )
    p.add_argument("--neighbor-mode", dest="neighbor_mode", default=None)


def _cmd_build(args: argparse.Namespace) -> int:
    cfg = _assemble_config(args)
    window = None if args.window in (None, "unbounded") else int(args.window)
    paths = [Path(p) for p in args.inputs]
    out = Path(args.out)
    label = args.label or ",".join(p.name for p in paths)
    plan = RunPlan(
        cfg,
        paths,
        window_capacity=window,
        window_unit=args.window_unit,
        default_source=args.default_source,
        dataset_label=label,
        schema_snapshot=Path(args.schema_graph) if args.schema_graph else None,
    )
    result = build_index(plan)
    record = _run_record(
        "build",
        {
            "model": cfg.to_dict(),
            "window": {"capacity": window, "unit": args.window_unit},
            "default_source": args.default_source,
            "label": label,
        },
        paths,
    )
    record["parse"] = {
        "lines": result.parse_counters.lines,
        "quads": result.parse_counters.quads,
        "errors": result.parse_counters.errors,
        "skipped": result.parse_counters.skipped,
    }
    result.index.save(out, result.stats, extra_meta={"run": record})
    if cfg.rdfs_mode is InferenceMode.PRE_PROCESSED and args.schema_graph is None:
        write_snapshot(out / SNAPSHOT_FILE, result.schema_graph, result.partition)
    metrics = result.index.compute_metrics(result.stats)
    print(f"quads: {result.parse_counters.quads}")
    print(f"parse errors: {result.parse_counters.errors}")
    print(f"instances: {result.stats.instance_count}")
    print(f"elements: {metrics.element_count}")
    print(f"index triples: {metrics.triple_count}")
    print(f"compression ratio: {metrics.compression_ratio * 100:.2f}%")
    print(f"summarization ratio: {metrics.summarization_ratio * 100:.2f}%")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    paths = [Path(p) for p in args.inputs]
    counters = ParseCounters()
    acc = StatsAccumulator()
    for q in quads_only(parse_paths(paths, args.default_source, counters)):
        acc.add(q)
    stats = acc.finalize()
    for key, value in stats.to_dict().items():
        print(f"{key}: {value:.4f}" if isinstance(value, float) else f"{key}: {value}")
    print(f"parse_errors: {counters.errors}")
    if args.json:
        payload = {
            "run": _run_record("stats", {"default_source": args.default_source}, paths),
            "stats": stats.to_dict(),
            "parse": {"lines": counters.lines, "quads": counters.quads,
                      "errors": counters.errors, "skipped": counters.skipped},
        }
        _write_json(Path(args.json), payload)
    return 0


def _cmd_querygen(args: argparse.Namespace) -> int:
    index = Index.load(Path(args.gold))
    queries = generate_queries(index, args.kind, args.n, args.seed)
    out = Path(args.out)
    write_queries(out, queries)
    _write_json(
        out.with_suffix(out.suffix + ".meta.json"),
        _run_record(
            "querygen",
            {"gold": str(args.gold), "kind": args.kind, "n": args.n, "seed": args.seed},
        ),
    )
    print(f"queries: {len(queries)}")
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    index = Index.load(Path(args.index))
    queries = read_queries(Path(args.queries))
    results = [execute(index, q) for q in queries]
    out = Path(args.out)
    write_results(out, results)
    _write_json(
        out.with_suffix(out.suffix + ".meta.json"),
        _run_record("query", {"index": str(args.index), "queries": str(args.queries)}),
    )
    answered = sum(1 for r in results if r.data_sources)
    print(f"queries: {len(results)}")
    print(f"answered: {answered}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    gold = Index.load(Path(args.gold))
    approx = Index.load(Path(args.approx))
    queries = read_queries(Path(args.queries))
    report = evaluate(gold, approx, queries)
    payload = report.to_dict()
    payload["run"] = _run_record(
        "eval",
        {"gold": str(args.gold), "approx": str(args.approx), "queries": str(args.queries)},
    )
    payload["run"]["gold_meta"] = _meta_summary(gold)
    payload["run"]["approx_meta"] = _meta_summary(approx)
    _write_json(Path(args.report), payload)
    print(f"{'kind':<10}{'n':>6}{'macro F1':>10}")
    for kind in sorted(report.macro_f1):
        print(f"{kind:<10}{report.query_counts[kind]:>6}{report.macro_f1[kind]:>10.4f}")
    if report.empty_gold:
        print(f"empty gold answers: {report.empty_gold}")
    print(f"empty window answers: {report.empty_window}")
    return 0


def _meta_summary(index: Index) -> dict:
    meta = index.meta or {}
    return {
        "model": index.cfg.to_dict(),
        "window": meta.get("window"),
        "metrics": meta.get("metrics"),
        "dataset": meta.get("dataset"),
    }


def _extract(payload: dict, dotted: str, origin: str) -> float:
    node = payload
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            raise FluidError(f"{origin}: no value at {dotted!r}")
        node = node[part]
    if not isinstance(node, (int, float)) or isinstance(node, bool):
        raise FluidError(f"{origin}: {dotted!r} is not numeric")
    return float(node)


def _cmd_correlate(args: argparse.Namespace) -> int:
    paths = sorted(globmod.glob(args.reports, recursive=True))
    if not paths:
        raise FluidError(f"no reports match {args.reports!r}")
    xs, ys = [], []
    for p in paths:
        payload = json.loads(Path(p).read_text(encoding="utf-8"))
        xs.append(_extract(payload, args.x, p))
        ys.append(_extract(payload, args.y, p))
    report = correlate_stats(xs, ys)
    out = {
        "n": report.pearson.n,
        "df": report.pearson.df,
        "x": args.x,
        "y": args.y,
        "pearson": report.pearson.to_dict(),
        "spearman": report.spearman.to_dict(),
    }
    print(json.dumps(out, sort_keys=True, indent=1))
    return 0


def _cmd_gen_synthetic(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        instances=args.instances,
        types=args.types,
        properties=args.properties,
        sources=args.sources,
        seed=args.seed,
        mean_edges=args.mean_edges,
        literal_rate=args.literal_rate,
        typeless_rate=args.typeless_rate,
        sameas_rate=args.sameas_rate,
        rdfs_rate=args.rdfs_rate,
        schema_position=args.schema_position,
    )
    out = Path(args.out)
    count = generate_file(out, spec)
    _write_json(
        out.with_suffix(out.suffix + ".meta.json"),
        _run_record("gen-synthetic", {k: getattr(args, k) for k in (
            "instances", "types", "properties", "sources", "seed", "mean_edges",
            "literal_rate", "typeless_rate", "sameas_rate", "rdfs_rate",
            "schema_position")}),
    )
    print(f"quads: {count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fluid", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fluid {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build", parents=[], help="compute an index over N-Quads inputs")
    _add_model_flags(p)
    p.add_argument("--window", default="unbounded", help="instance capacity or 'unbounded'")
    p.add_argument("--window-unit", choices=("instances", "quads"), default="instances")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH")
    p.add_argument("--out", required=True, help="output index directory")
    p.add_argument("--default-source", default=DEFAULT_SOURCE)
    p.add_argument("--schema-graph", help="precomputed schema snapshot to reuse")
    p.add_argument("--label", help="dataset label stored in the metadata")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("stats", help="dataset statistics over N-Quads inputs")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH")
    p.add_argument("--default-source", default=DEFAULT_SOURCE)
    p.add_argument("--json", help="also write a machine-readable report")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("querygen", help="generate queries from a gold index")
    p.add_argument("--gold", required=True, help="gold index directory")
    p.add_argument("--kind", choices=("simple", "complex"), required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_querygen)

    p = sub.add_parser("query", help="execute a query file against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("eval", help="F1 of an approximate index against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--approx", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("correlate", help="correlation between two report metrics")
    p.add_argument("--reports", required=True, help="glob of report JSON files")
    p.add_argument("--x", required=True, help="dotted path of the x metric")
    p.add_argument("--y", required=True, help="dotted path of the y metric")
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("gen-synthetic", help="write a seeded synthetic corpus")
    p.add_argument("--instances", type=int, required=True)
    p.add_argument("--types", type=int, default=20)
    p.add_argument("--properties", type=int, default=30)
    p.add_argument("--sources", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-edges", type=int, default=5)
    p.add_argument("--literal-rate", type=float, default=0.2)
    p.add_argument("--typeless-rate", type=float, default=0.1)
    p.add_argument("--sameas-rate", type=float, default=0.0)
    p.add_argument("--rdfs-rate", type=float, default=0.0)
    p.add_argument("--schema-position", choices=("front", "back", "mixed"), default="front")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_synthetic)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("FLUID_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FluidError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

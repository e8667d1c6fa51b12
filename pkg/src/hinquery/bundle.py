"""Bundle serialization.

A graph bundle is three files: nodes.tsv (id, type, label), edges.tsv
(src, dst, kind with kind N for normal and H for hierarchy parent->child),
and schema.json. Queries travel as standalone JSON documents. Parse errors
carry file and line; a parsed bundle is always validated against its schema
before being handed out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .model import DataGraph, HinQueryError, QueryGraph, Schema, validate_graph


class GraphFormatError(HinQueryError):
    pass


class BundleValidationError(HinQueryError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"bundle fails validation: {lines}{more}")


@dataclass
class GraphBundle:
    graph: DataGraph
    schema: Schema
    nodes_path: Path
    edges_path: Path
    schema_path: Path


def _rows(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def load_nodes(path):
    nodes = []
    for lineno, line in _rows(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(
                f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
        raw_id, node_type, label = parts
        try:
            node_id = int(raw_id)
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: node id {raw_id!r} is not an integer")
        nodes.append((node_id, node_type, label))
    return nodes


def load_edges(path):
    normal, hierarchy = [], []
    for lineno, line in _rows(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(
                f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
        raw_u, raw_v, kind = parts
        try:
            u, v = int(raw_u), int(raw_v)
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: edge endpoints must be integers")
        if kind == "N":
            normal.append((u, v))
        elif kind == "H":
            hierarchy.append((u, v))
        else:
            raise GraphFormatError(
                f"{path}:{lineno}: edge kind must be N or H, got {kind!r}")
    return normal, hierarchy


def load_schema(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    try:
        return Schema.from_dict(doc)
    except HinQueryError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc


def load_bundle(nodes_path, edges_path, schema_path):
    """Parse and validate a bundle. Raises GraphFormatError on malformed
    input and BundleValidationError when the graph breaks schema rules."""
    schema = load_schema(schema_path)
    nodes = load_nodes(nodes_path)
    normal, hierarchy = load_edges(edges_path)
    graph = DataGraph(nodes=tuple(nodes), normal_edges=tuple(normal),
                      hierarchy_edges=tuple(hierarchy))
    violations = validate_graph(graph, schema)
    if violations:
        raise BundleValidationError(violations)
    return GraphBundle(graph=graph, schema=schema,
                       nodes_path=Path(nodes_path), edges_path=Path(edges_path),
                       schema_path=Path(schema_path))


def save_bundle(graph, schema, out_dir):
    """Write nodes.tsv, edges.tsv, schema.json. Output is byte-stable for a
    given graph: rows are sorted, floats never appear."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["# id\ttype\tlabel"]
    for i, t, l in sorted(graph.nodes):
        lines.append(f"{i}\t{t}\t{l}")
    (out / "nodes.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["# src\tdst\tkind"]
    for u, v in sorted((min(u, v), max(u, v)) for u, v in graph.normal_edges):
        lines.append(f"{u}\t{v}\tN")
    for u, v in sorted(graph.hierarchy_edges):
        lines.append(f"{u}\t{v}\tH")
    (out / "edges.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    (out / "schema.json").write_text(
        json.dumps(schema.to_dict(), indent=2) + "\n", encoding="utf-8")
    return out / "nodes.tsv", out / "edges.tsv", out / "schema.json"


def load_query(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    try:
        return QueryGraph.from_dict(doc)
    except HinQueryError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc


def round_floats(obj, digits=12):
    """Recursively round floats to a fixed number of significant digits so
    emitted documents are byte-stable across runs and platforms."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj

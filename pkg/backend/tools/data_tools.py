from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Literal, Optional, Tuple

import orjson
import toml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from backend.errors import GraphError, ModelError
from backend.graph import Graph, GraphSum, canonicalize_ordered, symmetry_factor
from backend.series import format_fraction, parse_fraction

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE


# -----------------------------
# Record schemas
# -----------------------------
class GraphRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    v: int = Field(ge=1, description="Vertex count")
    legs: List[Tuple[int, int, int]] = Field(default_factory=list, description="[vertex, label, species] triples")
    edges: List[Tuple[int, int, int]] = Field(default_factory=list, description="[i, j, species] triples, i <= j")


class TermRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: GraphRecord
    weight: str = Field(description="Exact rational weight as 'p/q' or 'p'")

    @field_validator("weight")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_fraction(value)
        return value


class GraphSumRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    terms: List[TermRecord] = Field(default_factory=list)


class CouplingEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    legs: List[int] = Field(description="Species of every leg at the vertex; its length is the degree")
    value: str = Field(description="Polynomial in the model variables, e.g. 'g' or 'g/2'")


class ModelFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "model"
    variables: List[str] = Field(default_factory=lambda: ["g"], description="Coupling variables, truncated at max order")
    symbols: List[str] = Field(default_factory=list, description="Extra untruncated symbols, e.g. a symbolic propagator")
    propagators: Dict[str, str] = Field(default_factory=lambda: {"1": "1"})
    couplings: List[CouplingEntry] = Field(default_factory=list)
    convention: Literal["bare", "dressed"] = "bare"
    amputated: bool = False
    one_point: Literal["keep", "drop"] = "keep"
    strict: bool = False


# -----------------------------
# Conversions
# -----------------------------
def graph_to_record(g: Graph) -> Dict[str, Any]:
    """Return the JSON form `{"v": .., "legs": [..], "edges": [..]}` in canonical order."""
    return {"v": g.v, "legs": [list(leg) for leg in g.legs], "edges": [list(edge) for edge in g.edges]}


def record_to_graph(record: GraphRecord) -> Graph:
    return canonicalize_ordered(record.v, record.edges, record.legs)


def dump_graph_sum(s: GraphSum) -> Dict[str, Any]:
    """`{"terms": [{"graph": .., "weight": "p/q"}, ..]}` in sorted graph order."""
    return {"terms": [{"graph": graph_to_record(g), "weight": format_fraction(w)} for g, w in s]}


def load_graph_sum(data: Any) -> GraphSum:
    """
    Rebuild a GraphSum from its JSON form (dict, str or bytes).

    Raises:
        GraphError: Malformed document, decimal weights or invalid graphs.
    """
    if isinstance(data, (bytes, str)):
        try:
            data = orjson.loads(data)
        except orjson.JSONDecodeError as exc:
            raise GraphError(f"not valid JSON: {exc}") from exc
    try:
        record = GraphSumRecord.model_validate(data)
    except ValidationError as exc:
        raise GraphError(f"invalid graph sum document: {exc}") from exc
    return GraphSum((record_to_graph(term.graph), parse_fraction(term.weight)) for term in record.terms)


def term_line(g: Graph, weight: Fraction) -> Dict[str, Any]:
    """One JSON-lines record: graph, weight and symmetry factor."""
    return {"graph": graph_to_record(g), "weight": format_fraction(weight), "symmetry_factor": symmetry_factor(g)}


def json_lines(s: GraphSum, with_symmetry: bool = True) -> Iterator[str]:
    """Stream a GraphSum as JSON lines followed by a summary footer."""
    for g, w in s:
        record = term_line(g, w) if with_symmetry else {"graph": graph_to_record(g), "weight": format_fraction(w)}
        yield dumps(record)
    yield dumps({"summary": {"terms": len(s), "total_weight": format_fraction(s.total_weight())}})


def dumps(obj: Any) -> str:
    return orjson.dumps(obj, option=orjson.OPT_SORT_KEYS).decode("utf-8")


# -----------------------------
# Files
# -----------------------------
def read_json(path: Path) -> Any:
    """Load a JSON document from `path`."""
    return orjson.loads(path.read_bytes())


def write_json_atomic(path: Path, data: Any) -> None:
    """Persist JSON to `path` safely by writing to a temp file and renaming atomically."""
    write_bytes_atomic(path, orjson.dumps(data, option=JSON_OPTIONS))


def write_text_atomic(path: Path, text: str) -> None:
    write_bytes_atomic(path, text.encode("utf-8"))


def write_bytes_atomic(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("wb") as f:
        f.write(payload)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)  # atomic on POSIX


def read_model_file(path: Path) -> ModelFile:
    """
    Parse and validate a TOML model description.

    Raises:
        ModelError: Missing file, TOML syntax errors or schema violations.
    """
    if not path.exists():
        raise ModelError(f"model file not found: {path}")
    try:
        raw = toml.load(path)
    except toml.TomlDecodeError as exc:
        raise ModelError(f"cannot parse {path}: {exc}") from exc
    try:
        return ModelFile.model_validate(raw)
    except ValidationError as exc:
        raise ModelError(f"invalid model file {path}: {exc}") from exc


# -----------------------------
# Tools
# -----------------------------
def tool_export_graph_sum(path: str, s: GraphSum, fmt: str = "json", title: Optional[str] = None) -> Dict[str, Any]:
    """
    Write a GraphSum to `path` as a JSON document or DOT graphs.

    Args:
        path: Destination file; parent directories are created.
        s: The sum to export.
        fmt: "json" or "dot".
        title: Optional DOT graph-name prefix.

    Returns:
        {"ok": True, "path": "<path>", "format": fmt, "terms": <count>}
    """
    from backend.tools.dot_tools import graph_sum_to_dot

    p = Path(path)
    if fmt == "json":
        write_json_atomic(p, dump_graph_sum(s))
    elif fmt == "dot":
        write_text_atomic(p, graph_sum_to_dot(s, title or "G"))
    else:
        raise ValueError(f"unknown export format {fmt!r}; expected 'json' or 'dot'")
    return {"ok": True, "path": str(p), "format": fmt, "terms": len(s)}


def tool_import_graph_sum(path: str) -> GraphSum:
    """Read back a JSON export written by `tool_export_graph_sum`."""
    p = Path(path)
    if not p.exists():
        raise GraphError(f"no such export: {p}")
    return load_graph_sum(p.read_bytes())


def iter_records(lines: Iterable[str]) -> Iterator[Dict[str, Any]]:
    """Parse JSON lines, skipping blank lines and the summary footer."""
    for line in lines:
        if not line.strip():
            continue
        record = orjson.loads(line)
        if "summary" not in record:
            yield record

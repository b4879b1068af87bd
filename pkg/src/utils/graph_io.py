"""Graph file utilities: plain-text edge lists and metadata sidecars.

Edge-list format: first line "n d m_edges", then one "u v" pair per line,
0-indexed, each undirected edge listed once. Blank lines and lines starting
with '#' are ignored.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.core.errors import GraphFormatError
from src.models.graph import BoundedDegreeGraph
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append((lineno, line))
    return lines


def parse_graph(text: str) -> BoundedDegreeGraph:
    """Parse edge-list text into a checked graph.

    Raises:
        GraphFormatError: On malformed input, duplicate or self-loop edges, or degree violations
    """
    lines = _content_lines(text)
    if not lines:
        raise GraphFormatError("Graph file is empty")

    header_no, header = lines[0]
    try:
        n, d, m_edges = (int(x) for x in header.split())
    except ValueError:
        raise GraphFormatError(f"Line {header_no}: header must be 'n d m_edges', got {header!r}")
    if n < 1 or d < 1 or m_edges < 0:
        raise GraphFormatError(f"Line {header_no}: need n >= 1, d >= 1, m_edges >= 0")

    body = lines[1:]
    if len(body) != m_edges:
        raise GraphFormatError(f"Header announces {m_edges} edges but file lists {len(body)}")

    edges = []
    seen = set()
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"Line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"Line {lineno}: vertex ids must be integers")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"Line {lineno}: edge ({u}, {v}) listed twice")
        seen.add(key)
        edges.append((u, v))

    return BoundedDegreeGraph.from_edges(n, d, edges)


def format_graph(graph: BoundedDegreeGraph) -> str:
    edges = list(graph.edges())
    lines = [f"{graph.n} {graph.d} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def load_graph(path: Path) -> BoundedDegreeGraph:
    """Load a graph from an edge-list file.

    Raises:
        GraphFormatError: If the file is missing or invalid
    """
    path = Path(path)
    if not path.is_file():
        raise GraphFormatError(f"Graph file not found: {path}")
    graph = parse_graph(path.read_text(encoding="utf-8"))
    logger.info(f"Loaded graph from {path}", n=graph.n, d=graph.d, edges=graph.edge_count)
    return graph


def save_graph(graph: BoundedDegreeGraph, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_graph(graph), encoding="utf-8")
    logger.info(f"Graph written to {path}", n=graph.n, edges=graph.edge_count)
    return path


def metadata_path(graph_path: Path) -> Path:
    graph_path = Path(graph_path)
    return graph_path.with_name(graph_path.name + ".meta.json")


def write_metadata(metadata: Dict[str, Any], graph_path: Path) -> Path:
    """Write the JSON sidecar next to a graph file."""
    path = metadata_path(graph_path)
    path.write_text(json.dumps(metadata, indent=2, sort_keys=True), encoding="utf-8")
    logger.debug(f"Metadata written to {path}")
    return path


def read_metadata(graph_path: Path) -> Optional[Dict[str, Any]]:
    """The sidecar of a generated graph, or None for graphs without one.

    Raises:
        GraphFormatError: If the sidecar is not a JSON object
    """
    path = metadata_path(graph_path)
    if not path.exists():
        return None
    try:
        metadata = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"{path}: invalid metadata JSON: {e}")
    if not isinstance(metadata, dict):
        raise GraphFormatError(f"{path}: metadata must be a JSON object")
    return metadata

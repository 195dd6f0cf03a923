"""
Readers and writers for instance files.

Graph files::

    # comment
    p <n> <m>
    e <u> <v> [length]
    c <v> <decimal cost>
    c label <v> <text>
    s <v1> <v2> ...

Vertex ids are 0-indexed; missing costs default to 1. Tree decompositions
use the PACE layout (``s td <bags> <max bag size> <n>``, ``b <id> <v...>``,
then bag-tree edges) with 1-indexed bag ids and the graph's vertex ids.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Tuple, Union

from pydantic import ValidationError

from .graph import SCALE, CostVector, Graph, InstanceError, SiteList, format_fixed, parse_fixed
from .hardness import HSInstance
from .schemas import HSInstanceModel
from .treewidth import TreeDecomposition

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ParseError(InstanceError):
    """Raised when an input file line is malformed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class GraphFile:
    """Parsed graph file."""

    graph: Graph
    costs: CostVector
    sites: Optional[SiteList]
    labels: Dict[int, str] = field(default_factory=dict)


def _ints(tokens: List[str], line: int, what: str) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as e:
        raise ParseError(line, f"expected integers in {what}, got {' '.join(tokens)!r}") from e


def parse_graph(lines: Iterable[str]) -> GraphFile:
    """
    Parse the graph format.

    Args:
        lines: File lines

    Returns:
        GraphFile

    Raises:
        ParseError: On a malformed line, with its 1-based line number
        InstanceError: If the graph itself is invalid (e.g. disconnected)
    """
    n: Optional[int] = None
    m = 0
    edges: List[Tuple[int, int]] = []
    weights: List[Optional[int]] = []
    costs: Dict[int, int] = {}
    labels: Dict[int, str] = {}
    sites: Optional[List[int]] = None

    for k, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        tokens = text.split()
        kind = tokens[0]
        if kind == "p":
            if n is not None:
                raise ParseError(k, "duplicate header")
            if len(tokens) != 3:
                raise ParseError(k, "header must be 'p <n> <m>'")
            n, m = _ints(tokens[1:], k, "header")
            if n < 1 or m < 0:
                raise ParseError(k, "header needs n >= 1 and m >= 0")
            continue
        if n is None:
            raise ParseError(k, f"'{kind}' line before the 'p' header")
        if kind == "e":
            if len(tokens) not in (3, 4):
                raise ParseError(k, "edge must be 'e <u> <v> [length]'")
            values = _ints(tokens[1:], k, "edge")
            u, v = values[0], values[1]
            for x in (u, v):
                if not 0 <= x < n:
                    raise ParseError(k, f"vertex {x} outside 0..{n - 1}")
            edges.append((u, v))
            weights.append(values[2] if len(values) == 3 else None)
        elif kind == "c":
            if len(tokens) >= 3 and tokens[1] == "label":
                (v,) = _ints(tokens[2:3], k, "label")
                if not 0 <= v < n:
                    raise ParseError(k, f"vertex {v} outside 0..{n - 1}")
                labels[v] = " ".join(tokens[3:])
                continue
            if len(tokens) != 3:
                raise ParseError(k, "cost must be 'c <v> <decimal>'")
            (v,) = _ints(tokens[1:2], k, "cost")
            if not 0 <= v < n:
                raise ParseError(k, f"vertex {v} outside 0..{n - 1}")
            if v in costs:
                raise ParseError(k, f"duplicate cost for vertex {v}")
            try:
                costs[v] = parse_fixed(tokens[2])
            except InstanceError as e:
                raise ParseError(k, str(e)) from e
        elif kind == "s":
            if sites is not None:
                raise ParseError(k, "more than one site line")
            sites = _ints(tokens[1:], k, "site list")
            if len(set(sites)) != len(sites):
                raise ParseError(k, "sites must be pairwise different vertices")
            for v in sites:
                if not 0 <= v < n:
                    raise ParseError(k, f"site {v} outside 0..{n - 1}")
        else:
            raise ParseError(k, f"unknown line type {kind!r}")

    if n is None:
        raise ParseError(0, "missing 'p <n> <m>' header")
    if len(edges) != m:
        raise InstanceError(f"Header announces {m} edges but {len(edges)} were given")
    given = [w for w in weights if w is not None]
    if given and len(given) != len(weights):
        raise InstanceError("Either every edge has a length or none does")
    graph = Graph.from_edges(n, edges, given or None)
    values = [costs.get(v, SCALE) for v in range(n)]
    return GraphFile(
        graph=graph,
        costs=CostVector.from_fixed(values),
        sites=SiteList(tuple(sites)) if sites else None,
        labels=labels,
    )


def read_graph(path: PathLike) -> GraphFile:
    with open(path, "r", encoding="utf-8") as fh:
        parsed = parse_graph(fh)
    logger.info(f"Read graph {path}: n={parsed.graph.n}, m={parsed.graph.m}")
    return parsed


def write_graph(
    out: TextIO,
    graph: Graph,
    costs: Optional[CostVector] = None,
    sites: Optional[SiteList] = None,
    labels: Optional[Dict[int, str]] = None,
) -> None:
    """Write a graph file; unit costs are omitted."""
    out.write(f"p {graph.n} {graph.m}\n")
    for u, v, w in graph.edge_list():
        out.write(f"e {u} {v} {w}\n" if graph.weighted else f"e {u} {v}\n")
    if costs is not None:
        for v, value in enumerate(costs.values.tolist()):
            if value != SCALE:
                out.write(f"c {v} {format_fixed(value)}\n")
    for v, text in sorted((labels or {}).items()):
        out.write(f"c label {v} {text}\n")
    if sites is not None and len(sites):
        out.write("s " + " ".join(str(v) for v in sites) + "\n")


def parse_costs(lines: Iterable[str], n: int) -> CostVector:
    """One decimal cost per vertex in order, whitespace separated; '#' starts a comment."""
    values: List[int] = []
    for k, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0]
        for token in text.split():
            try:
                values.append(parse_fixed(token))
            except InstanceError as e:
                raise ParseError(k, str(e)) from e
    if len(values) != n:
        raise InstanceError(f"Expected {n} costs, got {len(values)}")
    return CostVector.from_fixed(values)


def parse_sites(text: str, n: int) -> SiteList:
    """Comma- or space-separated site ids in priority order."""
    tokens = text.replace(",", " ").split()
    try:
        ids = [int(t) for t in tokens]
    except ValueError as e:
        raise InstanceError(f"Malformed site list: {text!r}") from e
    return SiteList.of(ids, n)


def parse_tree_decomposition(lines: Iterable[str], n: Optional[int] = None) -> TreeDecomposition:
    """
    Parse a PACE-style tree decomposition.

    Raises:
        ParseError: On malformed lines or inconsistent counts
    """
    header: Optional[Tuple[int, int, int]] = None
    bags: Dict[int, frozenset] = {}
    edges: List[Tuple[int, int]] = []
    for k, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("c") or text.startswith("#"):
            continue
        tokens = text.split()
        if tokens[0] == "s":
            if header is not None:
                raise ParseError(k, "duplicate header")
            if len(tokens) != 5 or tokens[1] != "td":
                raise ParseError(k, "header must be 's td <bags> <max bag size> <n>'")
            count, size, vertices = _ints(tokens[2:], k, "header")
            header = (count, size, vertices)
            if n is not None and vertices != n:
                raise ParseError(k, f"decomposition is for {vertices} vertices, graph has {n}")
            continue
        if header is None:
            raise ParseError(k, "line before the 's td' header")
        if tokens[0] == "b":
            values = _ints(tokens[1:], k, "bag")
            if not values:
                raise ParseError(k, "bag line without an id")
            bag_id = values[0]
            if not 1 <= bag_id <= header[0]:
                raise ParseError(k, f"bag id {bag_id} outside 1..{header[0]}")
            if bag_id in bags:
                raise ParseError(k, f"duplicate bag {bag_id}")
            if len(values) - 1 > header[1]:
                raise ParseError(k, f"bag {bag_id} exceeds the announced size {header[1]}")
            bags[bag_id] = frozenset(values[1:])
        else:
            values = _ints(tokens, k, "bag-tree edge")
            if len(values) != 2:
                raise ParseError(k, "bag-tree edge must be '<i> <j>'")
            for b in values:
                if not 1 <= b <= header[0]:
                    raise ParseError(k, f"bag id {b} outside 1..{header[0]}")
            edges.append((values[0] - 1, values[1] - 1))
    if header is None:
        raise ParseError(0, "missing 's td' header")
    if len(bags) != header[0]:
        raise InstanceError(f"Header announces {header[0]} bags but {len(bags)} were given")
    return TreeDecomposition(
        bags=tuple(bags[i] for i in range(1, header[0] + 1)),
        edges=tuple(edges),
    )


def read_tree_decomposition(path: PathLike, n: Optional[int] = None) -> TreeDecomposition:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tree_decomposition(fh, n)


def write_tree_decomposition(out: TextIO, td: TreeDecomposition, n: int) -> None:
    out.write(f"s td {len(td.bags)} {td.width + 1} {n}\n")
    for i, bag in enumerate(td.bags, start=1):
        out.write(" ".join(["b", str(i)] + [str(v) for v in sorted(bag)]) + "\n")
    for a, b in td.edges:
        out.write(f"{a + 1} {b + 1}\n")


def hs_from_json(text: str) -> HSInstance:
    """
    Parse an HS instance document.

    Raises:
        InstanceError: If the document does not match the schema
    """
    try:
        model = HSInstanceModel.model_validate_json(text)
    except ValidationError as e:
        raise InstanceError(f"Invalid HS instance: {e.errors()[0]['msg']}") from e
    return HSInstance.of(model.universe, model.a, model.b)


def hs_to_json(inst: HSInstance) -> str:
    model = HSInstanceModel(
        universe=list(inst.universe),
        a=[sorted(s) for s in inst.a],
        b=[sorted(s) for s in inst.b],
    )
    return json.dumps(model.model_dump(by_alias=True), indent=2)


def read_hs(path: PathLike) -> HSInstance:
    return hs_from_json(Path(path).read_text(encoding="utf-8"))

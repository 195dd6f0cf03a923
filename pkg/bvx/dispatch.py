"""Instance loading, graph class detection and solver dispatch with certification."""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

from .config import get_settings
from .elementary import solve_clique, solve_cycle, solve_diameter_two, solve_path
from .fileio import PathLike, parse_costs, parse_sites, read_graph, read_tree_decomposition
from .graph import (
    CostVector,
    Graph,
    InstanceError,
    NotAClassError,
    PreconditionError,
    SiteList,
    diameter_at_most_two,
    format_fixed,
    is_complete,
    is_cycle,
    is_path,
    is_tree,
)
from .interval import RecognitionError, UmbrellaOrder, recognize_proper_interval, solve_proper_interval
from .schemas import CheckResult, SiteLoad, SolveRequest, SolveResponse, ValidationReport, VoronoiResponse
from .tree import solve_tree
from .treewidth import (
    TreeDecomposition,
    heuristic_tree_decomposition,
    solve_treewidth,
    validate_tree_decomposition,
)
from .validation import validate_instance
from .voronoi import (
    SolveResult,
    brute_force_balanced_vertex,
    owners_as_sites,
    prioritized_voronoi,
    witness_load,
)

logger = logging.getLogger(__name__)


@dataclass
class ProblemInstance:
    """A validated Balanced Vertex instance plus optional solver hints."""

    graph: Graph
    costs: CostVector
    sites: SiteList
    td: Optional[TreeDecomposition] = None
    declared: Optional[str] = None
    labels: Dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.costs) != self.graph.n:
            raise InstanceError(f"Expected {self.graph.n} costs, got {len(self.costs)}")
        for v in self.sites:
            if not 0 <= v < self.graph.n:
                raise InstanceError(f"Site {v} outside 0..{self.graph.n - 1}")


def parse_instance(
    graph_path: PathLike,
    costs_path: Optional[PathLike] = None,
    sites: Optional[str] = None,
    td_path: Optional[PathLike] = None,
    declared: Optional[str] = None,
) -> ProblemInstance:
    """
    Load an instance from files and flags.

    ``costs_path`` and ``sites`` override the cost and site lines of the
    graph file.

    Raises:
        ParseError: On a malformed line
        InstanceError: On an invalid graph, cost vector or site list
    """
    parsed = read_graph(graph_path)
    g = parsed.graph
    costs = parsed.costs
    if costs_path is not None:
        with open(costs_path, "r", encoding="utf-8") as fh:
            costs = parse_costs(fh, g.n)
    site_list = parse_sites(sites, g.n) if sites is not None else parsed.sites
    if site_list is None or len(site_list) == 0:
        raise InstanceError("no sites")
    td = read_tree_decomposition(td_path, g.n) if td_path is not None else None
    return ProblemInstance(
        graph=g, costs=costs, sites=site_list, td=td, declared=declared, labels=parsed.labels
    )


def instance_from_request(request: SolveRequest) -> ProblemInstance:
    """Build an instance from an HTTP request body."""
    g = Graph.from_edges(request.n, request.edges, request.weights)
    costs = (
        CostVector.from_values(request.costs)
        if request.costs is not None
        else CostVector.unit(request.n)
    )
    td = None
    if request.bags is not None and request.bag_edges is not None:
        td = TreeDecomposition(
            bags=tuple(frozenset(b) for b in request.bags),
            edges=tuple((int(a), int(b)) for a, b in request.bag_edges),
        )
    return ProblemInstance(
        graph=g,
        costs=costs,
        sites=SiteList.of(request.sites, request.n),
        td=td,
        declared=request.algorithm,
    )


@dataclass
class Dispatch:
    """Chosen algorithm with whatever its detector already computed."""

    algorithm: str
    order: Optional[UmbrellaOrder] = None
    td: Optional[TreeDecomposition] = None


def _diam2_allowed(g: Graph, assume_diam2: bool) -> bool:
    """Verify diameter two within the budget, or trust the caller's flag."""
    budget = get_settings().diam2_budget
    if g.n * g.m <= budget:
        return diameter_at_most_two(g)
    return assume_diam2


def detect_class(inst: ProblemInstance, assume_diam2: bool = False) -> Dispatch:
    """
    Pick the most specific solver whose class membership is verified.

    Order: complete, path, cycle, tree, proper interval, diameter two,
    bounded treewidth, brute force. A declared class skips detection; its
    solver still verifies membership.
    """
    if inst.declared is not None and inst.declared != "auto":
        logger.info(f"Using declared class {inst.declared}")
        return Dispatch(inst.declared, td=inst.td)
    g = inst.graph
    settings = get_settings()
    if not g.weighted:
        if is_complete(g):
            return Dispatch("clique")
        if is_path(g):
            return Dispatch("path")
        if is_cycle(g):
            return Dispatch("cycle")
        if is_tree(g):
            return Dispatch("tree")
        try:
            return Dispatch("proper-interval", order=recognize_proper_interval(g))
        except RecognitionError as e:
            logger.debug(f"Not proper interval: {e}")
        if _diam2_allowed(g, assume_diam2):
            return Dispatch("diam2")

    td = inst.td if inst.td is not None else heuristic_tree_decomposition(g)
    if td.width <= settings.treewidth_max_width and len(inst.sites) <= settings.treewidth_max_sites:
        return Dispatch("treewidth", td=td)
    logger.warning(
        f"No specialized solver applies (width {td.width}, {len(inst.sites)} sites); "
        f"falling back to brute force"
    )
    return Dispatch("brute")


def _solve_diam2(inst: ProblemInstance, assume_diam2: bool) -> SolveResult:
    g = inst.graph
    budget = get_settings().diam2_budget
    if g.n * g.m <= budget:
        if not diameter_at_most_two(g):
            raise NotAClassError("Graph has diameter greater than two")
    elif not assume_diam2:
        raise PreconditionError(
            f"n*m = {g.n * g.m} exceeds the diameter-two check budget {budget}; "
            f"pass --assume-diam2 to trust the input"
        )
    return solve_diameter_two(g, inst.costs, inst.sites)


def run_solver(
    inst: ProblemInstance,
    algorithm: str = "auto",
    assume_diam2: bool = False,
    centroid_mode: str = "count",
) -> SolveResult:
    """
    Solve with a named algorithm, or detect one for "auto".

    Raises:
        NotAClassError: If the graph is not in the named algorithm's class
        PreconditionError: If a precondition cannot be verified
        InstanceError: On an invalid instance
    """
    g, costs, s = inst.graph, inst.costs, inst.sites
    td = inst.td
    order = None
    if algorithm == "auto":
        choice = detect_class(inst, assume_diam2)
        algorithm, order, td = choice.algorithm, choice.order, choice.td or td
        logger.info(f"Auto dispatch chose {algorithm} (n={g.n}, m={g.m}, |S|={len(s)})")

    solvers: Dict[str, Callable[[], SolveResult]] = {
        "brute": lambda: brute_force_balanced_vertex(g, costs, s),
        "clique": lambda: solve_clique(g, costs, s),
        "path": lambda: solve_path(g, costs, s),
        "cycle": lambda: solve_cycle(g, costs, s),
        "tree": lambda: solve_tree(g, costs, s, centroid_mode=centroid_mode),
        "diam2": lambda: _solve_diam2(inst, assume_diam2),
        "proper-interval": lambda: solve_proper_interval(g, costs, s, order),
        "treewidth": lambda: solve_treewidth(
            g, td if td is not None else heuristic_tree_decomposition(g), costs, s
        ),
    }
    if algorithm not in solvers:
        raise InstanceError(f"Unknown algorithm {algorithm!r}")
    return solvers[algorithm]()


def certify(inst: ProblemInstance, result: SolveResult) -> bool:
    """Recompute L(S+v) for the returned vertex from scratch and compare."""
    load, _ = witness_load(inst.graph, inst.costs, inst.sites, result.best_vertex)
    if load != result.best_load:
        logger.error(
            f"Certification failed for {result.algorithm}: reported {result.best_load}, "
            f"witness {load} at vertex {result.best_vertex}"
        )
        return False
    logger.info(f"Certified {result.algorithm} result at vertex {result.best_vertex}")
    return True


def solve_command(
    inst: ProblemInstance,
    algorithm: str = "auto",
    assume_diam2: bool = False,
    centroid_mode: str = "count",
) -> SolveResponse:
    """Solve, certify and render the JSON result."""
    start = time.perf_counter()
    result = run_solver(inst, algorithm, assume_diam2, centroid_mode)
    wall_ms = (time.perf_counter() - start) * 1000.0
    return SolveResponse(
        best_vertex=result.best_vertex,
        best_load=format_fixed(result.best_load),
        site_loads=[SiteLoad(site=v, load=format_fixed(x)) for v, x in result.site_loads],
        certified=certify(inst, result),
        algorithm=result.algorithm,
        wall_ms=wall_ms,
    )


def voronoi_command(inst: ProblemInstance) -> VoronoiResponse:
    diagram = prioritized_voronoi(inst.graph, inst.sites, inst.costs)
    return VoronoiResponse(
        sites=list(inst.sites),
        owner=owners_as_sites(diagram),
        dist=diagram.dist.tolist(),
        loads=[
            SiteLoad(site=v, load=format_fixed(x))
            for v, x in zip(inst.sites, diagram.loads.tolist())
        ],
        max_load=format_fixed(diagram.max_load),
        total_cost=format_fixed(inst.costs.total),
    )


def validate_command(inst: ProblemInstance) -> ValidationReport:
    """Invariant suite over Vor(G, S), plus the decomposition when one is given."""
    report = validate_instance(inst.graph, inst.costs, inst.sites)
    if inst.td is not None:
        try:
            width = validate_tree_decomposition(inst.graph, inst.td)
            report.checks.append(CheckResult(name="tree-decomposition", passed=True, detail=f"width {width}"))
        except InstanceError as e:
            report.checks.append(CheckResult(name="tree-decomposition", passed=False, detail=str(e)))
    return report

"""Invariant checks over prioritized Voronoi diagrams, reported per check."""

import logging
from typing import Callable, List, Optional

import networkx as nx
import numpy as np

from .config import get_settings
from .graph import CostVector, Graph, InstanceError, SiteList
from .schemas import CheckResult, ValidationReport
from .voronoi import VoronoiDiagram, prioritized_voronoi, site_loads_from

logger = logging.getLogger(__name__)


def all_pairs_distances(g: Graph) -> np.ndarray:
    """n×n int64 distance matrix from networkx Floyd–Warshall."""
    matrix = nx.floyd_warshall_numpy(g.to_networkx(), nodelist=range(g.n), weight="weight")
    return np.rint(matrix).astype(np.int64)


def _result(name: str, failure: Optional[str]) -> CheckResult:
    return CheckResult(name=name, passed=failure is None, detail=failure)


def check_partition(g: Graph, costs: CostVector, diagram: VoronoiDiagram) -> Optional[str]:
    p = len(diagram.sites)
    owner = diagram.owner
    if owner.shape[0] != g.n:
        return f"owner array has {owner.shape[0]} entries for {g.n} vertices"
    bad = np.flatnonzero((owner < 0) | (owner >= p))
    if bad.size:
        v = int(bad[0])
        return f"vertex {v} has owner index {int(owner[v])} outside 0..{p - 1}"
    loads = site_loads_from(owner, costs, p)
    for i in range(p):
        if int(loads[i]) != int(diagram.loads[i]):
            return f"site {diagram.sites[i]} reports load {int(diagram.loads[i])}, territory sums to {int(loads[i])}"
    if int(loads.sum()) != costs.total:
        return f"loads sum to {int(loads.sum())}, total cost is {costs.total}"
    return None


def check_sites(diagram: VoronoiDiagram) -> Optional[str]:
    for i, site in enumerate(diagram.sites):
        if int(diagram.owner[site]) != i:
            return f"site {site} is owned by index {int(diagram.owner[site])}, expected {i}"
    return None


def check_distances(site_dist: np.ndarray, diagram: VoronoiDiagram) -> Optional[str]:
    """``site_dist[i]`` holds the distances from the i-th site."""
    expected = site_dist.min(axis=0)
    bad = np.flatnonzero(expected != diagram.dist)
    if bad.size:
        v = int(bad[0])
        return f"vertex {v}: d(v, S) is {int(expected[v])}, diagram says {int(diagram.dist[v])}"
    return None


def check_priority(site_dist: np.ndarray, diagram: VoronoiDiagram) -> Optional[str]:
    closest = site_dist.min(axis=0)
    first = np.argmax(site_dist == closest, axis=0)
    bad = np.flatnonzero(first != diagram.owner)
    if bad.size:
        v = int(bad[0])
        return (
            f"vertex {v} owned by site {diagram.owner_site(v)}, "
            f"first closest site is {diagram.sites[int(first[v])]}"
        )
    return None


def check_connectivity(g: Graph, diagram: VoronoiDiagram) -> Optional[str]:
    nxg = g.to_networkx()
    for i, site in enumerate(diagram.sites):
        territory = diagram.territory(i).tolist()
        if territory and not nx.is_connected(nxg.subgraph(territory)):
            parts = sorted(nx.connected_components(nxg.subgraph(territory)), key=min)
            return f"territory of site {site} splits into {len(parts)} parts, e.g. {sorted(parts[-1])}"
    return None


def check_metric_interval(dist: np.ndarray, diagram: VoronoiDiagram) -> Optional[str]:
    """Every vertex on a shortest path from v to its site shares v's owner."""
    owner = diagram.owner
    for v in range(dist.shape[0]):
        site = diagram.owner_site(v)
        on_path = dist[v] + dist[site] == dist[v, site]
        bad = np.flatnonzero(on_path & (owner != owner[v]))
        if bad.size:
            return (
                f"vertex {int(bad[0])} lies on a shortest path from {v} to its site "
                f"{site} but is owned by site {diagram.owner_site(int(bad[0]))}"
            )
    return None


def check_struct_territory(
    g: Graph, s: SiteList, dist: np.ndarray, diagram: VoronoiDiagram
) -> Optional[str]:
    """T(v, S+v) equals the vertices strictly closer to v than to their old site."""
    p = len(s)
    for v in range(g.n):
        if v in s:
            continue
        after = prioritized_voronoi(g, s.with_site(v))
        direct = after.owner == p
        from_parts = dist[v] < diagram.dist
        bad = np.flatnonzero(direct != from_parts)
        if bad.size:
            return f"new site {v}: vertex {int(bad[0])} disagrees between the diagram and the territory union"
    return None


def validate_instance(
    g: Graph,
    costs: CostVector,
    s: SiteList,
    diagram: Optional[VoronoiDiagram] = None,
    max_n: Optional[int] = None,
) -> ValidationReport:
    """
    Run every invariant check on Vor(G, S) and report them individually.

    Args:
        g: Graph
        costs: Vertex costs
        s: Site list
        diagram: Diagram to check; computed when omitted (tests pass
            corrupted diagrams here)
        max_n: Largest n for the all-pairs checks (settings default)

    Returns:
        ValidationReport, with a counterexample in ``detail`` for each failure
    """
    if len(costs) != g.n:
        raise InstanceError(f"Expected {g.n} costs, got {len(costs)}")
    if max_n is None:
        max_n = get_settings().validate_max_n
    if diagram is None:
        diagram = prioritized_voronoi(g, s, costs)

    checks: List[CheckResult] = []

    def run(name: str, check: Callable[[], Optional[str]]) -> None:
        outcome = _result(name, check())
        if not outcome.passed:
            logger.warning(f"Check {name} failed: {outcome.detail}")
        checks.append(outcome)

    run("partition", lambda: check_partition(g, costs, diagram))
    structural = checks[-1].passed
    run("sites", lambda: check_sites(diagram))
    if not structural:
        return ValidationReport(n=g.n, m=g.m, checks=checks)

    run("connectivity", lambda: check_connectivity(g, diagram))
    if g.n > max_n:
        logger.info(f"Skipping all-pairs checks: n={g.n} exceeds {max_n}")
        for name in ("distances", "priority", "metric-interval", "struct-territory"):
            checks.append(CheckResult(name=name, passed=True, detail=f"skipped: n > {max_n}"))
        return ValidationReport(n=g.n, m=g.m, checks=checks)

    dist = all_pairs_distances(g)
    site_dist = dist[list(s)]
    run("distances", lambda: check_distances(site_dist, diagram))
    run("priority", lambda: check_priority(site_dist, diagram))
    run("metric-interval", lambda: check_metric_interval(dist, diagram))
    run("struct-territory", lambda: check_struct_territory(g, s, dist, diagram))
    report = ValidationReport(n=g.n, m=g.m, checks=checks)
    logger.info(f"Validation: {sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return report

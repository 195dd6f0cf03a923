"""Prioritized Voronoi diagrams, load evaluation and the brute-force solver."""

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .graph import (
    CostVector,
    Graph,
    InstanceError,
    SiteList,
    shortest_paths,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VoronoiDiagram:
    """
    Prioritized Voronoi diagram Vor(G, S).

    ``owner[v]`` is the index i of the site s_i whose territory holds v,
    ``dist[v]`` is d(v, S) and ``loads[i]`` is the cost of T(s_i, S).
    """

    sites: SiteList
    owner: np.ndarray
    dist: np.ndarray
    loads: np.ndarray

    @property
    def max_load(self) -> int:
        return int(self.loads.max()) if self.loads.size else 0

    def owner_site(self, v: int) -> int:
        return self.sites[int(self.owner[v])]

    def territory(self, i: int) -> np.ndarray:
        """Vertices of T(s_i, S) in ascending order."""
        return np.flatnonzero(self.owner == i)


@dataclass(frozen=True)
class SolveResult:
    """Optimal new site with its load and the per-site breakdown of Vor(G, S+v)."""

    best_vertex: int
    best_load: int
    site_loads: Tuple[Tuple[int, int], ...]
    algorithm: str = "brute"


def site_loads_from(
    owner: np.ndarray, costs: CostVector, p: int
) -> np.ndarray:
    """Per-site sums of costs, exact in int64."""
    loads = np.zeros(p, dtype=np.int64)
    np.add.at(loads, owner, costs.values)
    return loads


def prioritized_voronoi(
    g: Graph, s: SiteList, costs: Optional[CostVector] = None
) -> VoronoiDiagram:
    """
    Compute Vor(G, S) by one multi-source search seeded with every site.

    Args:
        g: Graph
        s: Site list in priority order
        costs: Vertex costs for the loads (unit costs when omitted)

    Returns:
        VoronoiDiagram

    Raises:
        InstanceError: If the site list is empty
    """
    if len(s) == 0:
        raise InstanceError("no sites")
    if costs is None:
        costs = CostVector.unit(g.n)
    if len(costs) != g.n:
        raise InstanceError(f"Expected {g.n} costs, got {len(costs)}")
    dist, owner = shortest_paths(g, list(s))
    loads = site_loads_from(owner, costs, len(s))
    return VoronoiDiagram(sites=s, owner=owner, dist=dist, loads=loads)


def witness_load(
    g: Graph, costs: CostVector, s: SiteList, v: int
) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """
    Evaluate L(S+v) from scratch.

    Args:
        g: Graph
        costs: Vertex costs
        s: Current site list
        v: Candidate new site

    Returns:
        (max load, ((site, load), ...)) with v listed last

    Raises:
        InstanceError: If v is already a site
    """
    if v in s:
        raise InstanceError(f"Vertex {v} is already a site")
    extended = s.with_site(v)
    diagram = prioritized_voronoi(g, extended, costs)
    breakdown = tuple(
        (site, int(load)) for site, load in zip(extended, diagram.loads.tolist())
    )
    return diagram.max_load, breakdown


def new_site_territory(g: Graph, dist_s: np.ndarray, v: int) -> Tuple[List[int], List[int]]:
    """
    Vertices strictly closer to v than to every site, T(v, S+v).

    The search only expands inside the territory: every vertex on a shortest
    path from v to a territory vertex is itself in the territory.

    Args:
        g: Graph
        dist_s: d(u, S) for every u
        v: New site (not in S)

    Returns:
        (territory vertices, their distances from v)
    """
    limit = dist_s.tolist() if isinstance(dist_s, np.ndarray) else list(dist_s)
    if g.weighted:
        best = {v: 0}
        heap = [(0, v)]
        order: List[int] = []
        dists: List[int] = []
        while heap:
            d, u = heapq.heappop(heap)
            if d > best[u]:
                continue
            order.append(u)
            dists.append(d)
            for w, length in g.weighted_neighbors(u):
                nd = d + length
                if nd < limit[w] and nd < best.get(w, nd + 1):
                    best[w] = nd
                    heapq.heappush(heap, (nd, w))
        return order, dists

    seen = {v: 0}
    queue = deque([v])
    adj = g.adjacency()
    while queue:
        u = queue.popleft()
        nd = seen[u] + 1
        for w in adj[u]:
            if w not in seen and nd < limit[w]:
                seen[w] = nd
                queue.append(w)
    return list(seen.keys()), list(seen.values())


def insertion_loads(
    g: Graph, costs: CostVector, diagram: VoronoiDiagram, v: int
) -> Tuple[int, np.ndarray]:
    """
    Loads of Vor(G, S+v) derived from Vor(G, S).

    Returns:
        (load of v, loads of the old sites after the insertion)
    """
    territory, _ = new_site_territory(g, diagram.dist, v)
    idx = np.asarray(territory, dtype=np.int64)
    taken = np.zeros(len(diagram.sites), dtype=np.int64)
    np.add.at(taken, diagram.owner[idx], costs.values[idx])
    return int(costs.values[idx].sum()), diagram.loads - taken


def select_best(scores: np.ndarray, site_mask: np.ndarray) -> int:
    """Smallest-id vertex minimizing ``scores`` among non-sites."""
    masked = np.where(site_mask, np.iinfo(np.int64).max, scores)
    return int(np.argmin(masked))


def finish(
    g: Graph,
    costs: CostVector,
    s: SiteList,
    scores: np.ndarray,
    algorithm: str,
) -> SolveResult:
    """
    Turn per-vertex L(S+v) scores into a SolveResult.

    The reported load is the solver's own score; the breakdown comes from an
    independent diagram evaluation so a wrong score stays detectable.
    """
    site_mask = s.mask(g.n)
    if site_mask.all():
        raise InstanceError("no candidate vertex")
    best = select_best(scores, site_mask)
    _, breakdown = witness_load(g, costs, s, best)
    logger.info(
        f"{algorithm}: best vertex {best} with load {int(scores[best])} "
        f"(n={g.n}, m={g.m}, |S|={len(s)})"
    )
    return SolveResult(
        best_vertex=best,
        best_load=int(scores[best]),
        site_loads=breakdown,
        algorithm=algorithm,
    )


def check_candidates(g: Graph, costs: CostVector, s: SiteList) -> None:
    if len(costs) != g.n:
        raise InstanceError(f"Expected {g.n} costs, got {len(costs)}")
    if len(s) == 0:
        raise InstanceError("no sites")
    if len(s) >= g.n:
        raise InstanceError("no candidate vertex")


def brute_force_scores(g: Graph, costs: CostVector, s: SiteList) -> np.ndarray:
    """L(S+v) for every vertex, sites scored with the int64 maximum."""
    diagram = prioritized_voronoi(g, s, costs)
    scores = np.full(g.n, np.iinfo(np.int64).max, dtype=np.int64)
    site_mask = s.mask(g.n)
    for v in range(g.n):
        if site_mask[v]:
            continue
        own, rest = insertion_loads(g, costs, diagram, v)
        scores[v] = max(own, int(rest.max()))
    return scores


def brute_force_balanced_vertex(
    g: Graph, costs: CostVector, s: SiteList
) -> SolveResult:
    """
    Exact Balanced Vertex optimum by evaluating every candidate.

    Args:
        g: Graph
        costs: Vertex costs
        s: Site list

    Returns:
        SolveResult with the smallest-id optimal vertex

    Raises:
        InstanceError: If there are no sites or every vertex is a site
    """
    check_candidates(g, costs, s)
    scores = brute_force_scores(g, costs, s)
    return finish(g, costs, s, scores, "brute")


def diagram_summary(diagram: VoronoiDiagram) -> List[Tuple[int, int]]:
    """(site, load) pairs in priority order."""
    return [(site, int(load)) for site, load in zip(diagram.sites, diagram.loads.tolist())]


def owners_as_sites(diagram: VoronoiDiagram) -> List[int]:
    sites: Sequence[int] = diagram.sites.sites
    return [sites[i] for i in diagram.owner.tolist()]

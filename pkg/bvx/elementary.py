"""Linear-time Balanced Vertex solvers for cliques, diameter-two graphs, paths and cycles."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import (
    CostVector,
    Graph,
    NotAClassError,
    SiteList,
    is_complete,
    is_cycle,
    is_path,
    require_unweighted,
)
from .voronoi import (
    SolveResult,
    VoronoiDiagram,
    check_candidates,
    finish,
    prioritized_voronoi,
)

logger = logging.getLogger(__name__)

UNSET = np.iinfo(np.int64).max


def clique_scores(g: Graph, costs: CostVector, s: SiteList) -> np.ndarray:
    """
    L(S+v) for every non-site v of a complete graph.

    A new site only takes itself; s_1 keeps everything that is not a site.
    """
    pi = costs.values
    later = [int(pi[x]) for x in s.sites[1:]]
    cap = max(later, default=0)
    first_load = costs.total - sum(later)
    scores = np.maximum(np.maximum(pi, cap), first_load - pi)
    scores[s.mask(g.n)] = UNSET
    return scores


def solve_clique(g: Graph, costs: CostVector, s: SiteList) -> SolveResult:
    """
    Solve Balanced Vertex on a complete graph in O(n).

    Raises:
        NotAClassError: If the graph is not complete
    """
    check_candidates(g, costs, s)
    require_unweighted(g, "clique")
    if not is_complete(g):
        raise NotAClassError(f"Graph is not complete (m={g.m}, n={g.n})")
    return finish(g, costs, s, clique_scores(g, costs, s), "clique")


def diameter_two_scores(g: Graph, costs: CostVector, s: SiteList) -> np.ndarray:
    """
    L(S+v) for every non-site v of a graph with diameter at most two.

    Vertices at distance two from S all belong to s_1, and a new site v takes
    itself plus its neighbors at distance two from S.
    """
    diagram = prioritized_voronoi(g, s, costs)
    pi = costs.values.tolist()
    dist = diagram.dist.tolist()
    owner = diagram.owner.tolist()
    loads = diagram.loads.tolist()
    p = len(s)

    # Two largest loads among s_2..s_p with their indices, for mu_i.
    ranked = sorted(range(1, p), key=lambda i: loads[i], reverse=True)[:2]

    def cap_without(i: int) -> int:
        for j in ranked:
            if j != i:
                return loads[j]
        return 0

    cap_all = cap_without(-1)
    scores = np.full(g.n, UNSET, dtype=np.int64)
    adj = g.adjacency()
    for v in range(g.n):
        if dist[v] == 0:
            continue
        far = sum(pi[u] for u in adj[v] if dist[u] >= 2)
        own = far + pi[v]
        i = owner[v]
        if i == 0:
            score = max(own, loads[0] - far - pi[v], cap_all)
        else:
            score = max(own, loads[0] - far, loads[i] - pi[v], cap_without(i))
        scores[v] = score
    return scores


def solve_diameter_two(g: Graph, costs: CostVector, s: SiteList) -> SolveResult:
    """
    Solve Balanced Vertex on a diameter-two graph in O(n + m).

    The diameter bound is the caller's responsibility; see the dispatcher.
    """
    check_candidates(g, costs, s)
    require_unweighted(g, "diameter-two")
    return finish(g, costs, s, diameter_two_scores(g, costs, s), "diam2")


@dataclass(frozen=True)
class PathComponent:
    """
    One component C_i of G minus S, closed under its neighboring sites.

    ``nodes`` is the subpath w_0..w_{t-1}; an end is a site when the matching
    flag is set. ``prefix[k]`` is the cost of w_0..w_{k-1} (so prefix[0] = 0).
    """

    nodes: Tuple[int, ...]
    left_site: bool
    right_site: bool
    prefix: Tuple[int, ...]
    cap: int

    @property
    def inner(self) -> Tuple[int, int]:
        """Index range [start, stop) of the component's own vertices."""
        start = 1 if self.left_site else 0
        stop = len(self.nodes) - 1 if self.right_site else len(self.nodes)
        return start, stop

    def component_prefix(self) -> List[int]:
        """Prefix sums lambda(i, j) at the component's own positions."""
        start, stop = self.inner
        return [self.prefix[j + 1] for j in range(start, stop)]


@dataclass(frozen=True)
class PathDecomposition:
    """Canonical walk order plus the components of G minus S along it."""

    order: Tuple[int, ...]
    components: Tuple[PathComponent, ...]


def walk_order(g: Graph, start: int, first_step: Optional[int] = None) -> List[int]:
    """Vertices of a path or cycle in walk order from ``start``."""
    adj = g.adjacency()
    order = [start]
    prev = -1
    cur = start
    nxt = first_step
    while True:
        if nxt is None:
            options = [w for w in adj[cur] if w != prev]
            if not options:
                break
            nxt = min(options)
        if nxt == start:
            break
        order.append(nxt)
        prev, cur = cur, nxt
        nxt = None
        if len(order) > g.n:
            raise NotAClassError("Walk did not terminate; graph is not a path or cycle")
    return order


def _top_sites(diagram: VoronoiDiagram, count: int = 3) -> List[Tuple[int, int]]:
    loads = diagram.loads.tolist()
    ranked = sorted(range(len(loads)), key=lambda i: loads[i], reverse=True)
    return [(diagram.sites[i], loads[i]) for i in ranked[:count]]


def _cap(top: Sequence[Tuple[int, int]], excluded: Sequence[int]) -> int:
    for site, load in top:
        if site not in excluded:
            return load
    return 0


def _make_component(
    nodes: List[int],
    left_site: bool,
    right_site: bool,
    pi: Sequence[int],
    top: Sequence[Tuple[int, int]],
) -> PathComponent:
    prefix = [0]
    for w in nodes:
        prefix.append(prefix[-1] + pi[w])
    ends = []
    if left_site:
        ends.append(nodes[0])
    if right_site:
        ends.append(nodes[-1])
    return PathComponent(
        nodes=tuple(nodes),
        left_site=left_site,
        right_site=right_site,
        prefix=tuple(prefix),
        cap=_cap(top, ends),
    )


def decompose_path(
    g: Graph, costs: CostVector, s: SiteList, diagram: Optional[VoronoiDiagram] = None
) -> PathDecomposition:
    """
    Split a path into the components of G minus S, each with its end sites.

    The walk starts at the smaller-id degree-1 vertex.
    """
    if not is_path(g):
        raise NotAClassError("Graph is not a path")
    if diagram is None:
        diagram = prioritized_voronoi(g, s, costs)
    start = min(v for v in range(g.n) if g.degree(v) == 1)
    order = walk_order(g, start)
    site_mask = s.mask(g.n)
    pi = costs.values.tolist()
    top = _top_sites(diagram)

    components = []
    k = 0
    n = len(order)
    while k < n:
        if site_mask[order[k]]:
            k += 1
            continue
        end = k
        while end < n and not site_mask[order[end]]:
            end += 1
        lo = k - 1 if k > 0 else k
        hi = end if end < n else end - 1
        components.append(
            _make_component(order[lo:hi + 1], k > 0, end < n, pi, top)
        )
        k = end
    return PathDecomposition(order=tuple(order), components=tuple(components))


def _score_between_sites(
    comp: PathComponent,
    owner: Sequence[int],
    loads_by_vertex: Dict[int, int],
    scores: np.ndarray,
) -> None:
    nodes = comp.nodes
    prefix = comp.prefix
    t = len(nodes)
    left_owner = owner[nodes[0]]
    j_lim = 0
    while j_lim + 1 < t and owner[nodes[j_lim + 1]] == left_owner:
        j_lim += 1
    left_load = loads_by_vertex[nodes[0]]
    right_load = loads_by_vertex[nodes[-1]]
    for j in range(1, t - 1):
        j_left = j // 2 + 1
        j_right = (t + j) // 2 - 1
        own = prefix[j_right + 1] - prefix[j_left]
        left_taken = max(0, prefix[j_lim + 1] - prefix[j_left])
        right_taken = max(0, prefix[j_right + 1] - prefix[j_lim + 1])
        scores[nodes[j]] = max(comp.cap, own, left_load - left_taken, right_load - right_taken)


def _score_open_end(
    nodes: Sequence[int],
    pi: Sequence[int],
    cap: int,
    site_load: int,
    scores: np.ndarray,
) -> None:
    # nodes[-1] is the only site; the walk starts at the free end.
    t = len(nodes)
    prefix = [0]
    for w in nodes:
        prefix.append(prefix[-1] + pi[w])
    for j in range(t - 1):
        j_right = (t + j) // 2 - 1
        own = prefix[j_right + 1]
        scores[nodes[j]] = max(cap, own, site_load - own)


def _score_components(
    components: Sequence[PathComponent],
    diagram: VoronoiDiagram,
    pi: Sequence[int],
    n: int,
) -> np.ndarray:
    owner = diagram.owner.tolist()
    loads_by_vertex = {
        site: int(load) for site, load in zip(diagram.sites, diagram.loads.tolist())
    }
    scores = np.full(n, UNSET, dtype=np.int64)
    for comp in components:
        if comp.left_site and comp.right_site:
            _score_between_sites(comp, owner, loads_by_vertex, scores)
        elif comp.right_site:
            _score_open_end(comp.nodes, pi, comp.cap, loads_by_vertex[comp.nodes[-1]], scores)
        else:
            reverse = comp.nodes[::-1]
            _score_open_end(reverse, pi, comp.cap, loads_by_vertex[reverse[-1]], scores)
    return scores


def path_scores(g: Graph, costs: CostVector, s: SiteList) -> np.ndarray:
    diagram = prioritized_voronoi(g, s, costs)
    decomposition = decompose_path(g, costs, s, diagram)
    logger.debug(f"path: {len(decomposition.components)} components")
    return _score_components(decomposition.components, diagram, costs.values.tolist(), g.n)


def solve_path(g: Graph, costs: CostVector, s: SiteList) -> SolveResult:
    """
    Solve Balanced Vertex on a path in O(n).

    Raises:
        NotAClassError: If the graph is not a path
    """
    check_candidates(g, costs, s)
    require_unweighted(g, "path")
    if not is_path(g):
        raise NotAClassError("Graph is not a path")
    return finish(g, costs, s, path_scores(g, costs, s), "path")


def cycle_components(
    g: Graph, costs: CostVector, s: SiteList, diagram: VoronoiDiagram
) -> List[PathComponent]:
    """Subpaths between consecutive sites around the cycle (two or more sites)."""
    base = walk_order(g, 0)
    site_mask = s.mask(g.n)
    first = next(k for k, v in enumerate(base) if site_mask[v])
    order = base[first:] + base[:first]
    order.append(order[0])
    pi = costs.values.tolist()
    top = _top_sites(diagram)
    components = []
    k = 0
    while k < len(order) - 1:
        end = k + 1
        while not site_mask[order[end]]:
            end += 1
        if end > k + 1:
            components.append(_make_component(order[k:end + 1], True, True, pi, top))
        k = end
    return components


def _single_site_cycle_scores(g: Graph, costs: CostVector, s: SiteList) -> np.ndarray:
    n = g.n
    order = walk_order(g, s[0])
    pi = costs.values.tolist()
    forward = [0]
    for v in order:
        forward.append(forward[-1] + pi[v])
    mirrored = [order[0]] + order[:0:-1]
    backward = [0]
    for v in mirrored:
        backward.append(backward[-1] + pi[v])

    scores = np.full(n, UNSET, dtype=np.int64)
    for i in range(1, n):
        if 2 * i <= n:
            k, prefix = i, forward
        else:
            k, prefix = n - i, backward
        lo = k // 2 + 1
        hi = (n + k + 1) // 2 - 1
        window = prefix[hi + 1] - prefix[lo]
        scores[order[i]] = max(window, costs.total - window)
    return scores


def cycle_scores(g: Graph, costs: CostVector, s: SiteList) -> np.ndarray:
    if len(s) == 1:
        return _single_site_cycle_scores(g, costs, s)
    diagram = prioritized_voronoi(g, s, costs)
    components = cycle_components(g, costs, s, diagram)
    return _score_components(components, diagram, costs.values.tolist(), g.n)


def solve_cycle(g: Graph, costs: CostVector, s: SiteList) -> SolveResult:
    """
    Solve Balanced Vertex on a cycle in O(n).

    Raises:
        NotAClassError: If the graph is not a cycle
    """
    check_candidates(g, costs, s)
    require_unweighted(g, "cycle")
    if not is_cycle(g):
        raise NotAClassError("Graph is not a cycle")
    return finish(g, costs, s, cycle_scores(g, costs, s), "cycle")

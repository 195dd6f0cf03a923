"""Centroid-decomposition Balanced Vertex solver for trees."""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import (
    CostVector,
    Graph,
    NotAClassError,
    SiteList,
    adjacency_bfs,
    is_tree,
    require_unweighted,
)
from .voronoi import SolveResult, check_candidates, finish

logger = logging.getLogger(__name__)

UNSET = np.iinfo(np.int64).max

Adjacency = List[List[int]]


class TreeInvariantError(AssertionError):
    """Raised when an instrumented tree solve breaks a recursion identity."""
    pass


def _bfs_tree(adj: Sequence[Sequence[int]], root: int) -> Tuple[List[int], List[int], List[int]]:
    """BFS order, parent (root is its own parent) and depth from ``root``."""
    n = len(adj)
    parent = [-1] * n
    depth = [0] * n
    parent[root] = root
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if parent[w] == -1:
                parent[w] = u
                depth[w] = depth[u] + 1
                order.append(w)
                queue.append(w)
    return order, parent, depth


@dataclass(frozen=True, eq=False)
class RootedTreeIndex:
    """
    A tree rooted at ``root`` with subtree costs and binary-lifting tables.

    ``up[k][v]`` is the ancestor 2^k levels above v, saturating at the root.
    """

    root: int
    order: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    subtree_cost: np.ndarray
    up: np.ndarray

    @classmethod
    def build(
        cls, adj: Sequence[Sequence[int]], root: int, costs: np.ndarray
    ) -> "RootedTreeIndex":
        order_l, parent_l, depth_l = _bfs_tree(adj, root)
        order = np.array(order_l, dtype=np.int64)
        parent = np.array(parent_l, dtype=np.int64)
        depth = np.array(depth_l, dtype=np.int64)

        sub = np.asarray(costs, dtype=np.int64).copy()
        max_depth = int(depth.max()) if depth.size else 0
        by_depth = depth[order]
        # Children before parents, one vectorized scatter per level.
        for level in range(max_depth, 0, -1):
            nodes = order[by_depth == level]
            np.add.at(sub, parent[nodes], sub[nodes])

        levels = max(1, max_depth.bit_length())
        up = np.empty((levels, len(adj)), dtype=np.int64)
        up[0] = parent
        for k in range(1, levels):
            up[k] = up[k - 1][up[k - 1]]
        return cls(root=root, order=order, parent=parent, depth=depth, subtree_cost=sub, up=up)

    def level_ancestors(self, nodes: np.ndarray, depths: np.ndarray) -> np.ndarray:
        """Ancestor of each node at the given depth (depths must not exceed the node's)."""
        steps = self.depth[nodes] - depths
        cur = np.asarray(nodes, dtype=np.int64).copy()
        for k in range(self.up.shape[0]):
            bit = ((steps >> k) & 1).astype(bool)
            if bit.any():
                cur[bit] = self.up[k][cur[bit]]
        return cur


def _centroid(adj: Sequence[Sequence[int]], weights: np.ndarray) -> int:
    order_l, parent_l, _ = _bfs_tree(adj, 0)
    order = np.array(order_l, dtype=np.int64)
    parent = np.array(parent_l, dtype=np.int64)
    sub = np.asarray(weights, dtype=np.int64).copy()
    for v in reversed(order_l[1:]):
        sub[parent_l[v]] += sub[v]
    total = int(sub[0])
    heaviest_child = np.zeros(len(adj), dtype=np.int64)
    children = order[1:]
    np.maximum.at(heaviest_child, parent[children], sub[children])
    worst = np.maximum(heaviest_child, total - sub)
    return int(np.argmin(worst))


def centroid(tree: Graph, node_weights: Optional[Sequence[int]] = None) -> int:
    """
    Weighted centroid: every component of the tree minus it weighs at most W/2.

    Args:
        tree: Tree graph
        node_weights: Nonnegative weights (unit weights when omitted)

    Returns:
        Smallest-id vertex minimizing the heaviest remaining component
    """
    if node_weights is None:
        weights = np.ones(tree.n, dtype=np.int64)
    else:
        weights = np.asarray(node_weights, dtype=np.int64)
    return _centroid(tree.adjacency(), weights)


def _alpha(adj: Sequence[Sequence[int]], root: int, pi: np.ndarray) -> np.ndarray:
    # v at depth 2q+e takes exactly the subtree of its ancestor at depth q+1.
    index = RootedTreeIndex.build(adj, root, pi)
    depth = index.depth
    nodes = np.arange(len(adj), dtype=np.int64)
    target = np.minimum(depth // 2 + 1, depth)
    alpha = index.subtree_cost[index.level_ancestors(nodes, target)]
    alpha[root] = 0
    return alpha


def alpha_all(tree: Graph, s: int, costs: CostVector) -> np.ndarray:
    """
    alpha(v) = cost of the vertices strictly closer to v than to s.

    Args:
        tree: Tree graph
        s: Reference vertex
        costs: Vertex costs

    Returns:
        Array indexed by vertex
    """
    return _alpha(tree.adjacency(), s, costs.values)


def _components(adj: Sequence[Sequence[int]], c: int) -> Tuple[List[int], List[int]]:
    """Distance from c and the index of the branch at c holding each vertex (-1 for c)."""
    order, parent, depth = _bfs_tree(adj, c)
    comp = [-1] * len(adj)
    branch = {w: k for k, w in enumerate(adj[c])}
    for v in order[1:]:
        p = parent[v]
        comp[v] = branch[v] if p == c else comp[p]
    return depth, comp


def _suffix_weights(diff: np.ndarray, dist_c: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Per vertex v: sum of pi(x) over the given x with diff[x] > dist_c[v]."""
    cap = int(dist_c.max()) + 1
    buckets = np.zeros(cap + 2, dtype=np.int64)
    np.add.at(buckets, np.clip(diff, 0, cap), pi)
    above = np.cumsum(buckets[::-1])[::-1]
    return above[dist_c + 1]


def _beta(
    adj: Sequence[Sequence[int]],
    c: int,
    dist_s: np.ndarray,
    pi: np.ndarray,
    dist_c: Optional[np.ndarray] = None,
    comp: Optional[np.ndarray] = None,
) -> np.ndarray:
    if dist_c is None or comp is None:
        depth, comp_l = _components(adj, c)
        dist_c = np.array(depth, dtype=np.int64)
        comp = np.array(comp_l, dtype=np.int64)
    diff = dist_s - dist_c
    beta = _suffix_weights(diff, dist_c, pi)
    # Remove the contribution of v's own branch: c lies on no path inside it.
    branches = len(adj[c])
    order = np.argsort(comp, kind="stable")
    bounds = np.searchsorted(comp[order], np.arange(branches + 1), side="left")
    for k in range(branches):
        members = order[bounds[k]:bounds[k + 1]]
        if members.size:
            beta[members] -= _suffix_weights(diff[members], dist_c[members], pi[members])
    beta[c] = 0
    return beta


def beta_all(tree: Graph, c: int, s: SiteList, costs: CostVector) -> np.ndarray:
    """
    beta(v) = cost of the x with c on the v-x path and d(x, v) < d(x, S).

    Args:
        tree: Tree graph
        c: Internal vertex
        s: Site list
        costs: Vertex costs

    Returns:
        Array indexed by vertex (0 at c)
    """
    dist_s, _ = adjacency_bfs(tree.adjacency(), list(s))
    return _beta(tree.adjacency(), c, np.array(dist_s, dtype=np.int64), costs.values)


def _gamma(
    c: int,
    owner: Sequence[int],
    dist_s: Sequence[int],
    dist_c: Sequence[int],
    comp: Sequence[int],
    loads: Sequence[int],
    site_nodes: Sequence[int],
    pi: Sequence[int],
) -> np.ndarray:
    n = len(owner)
    gamma = np.zeros(n, dtype=np.int64)
    home = owner[c]
    others = [i for i in range(len(loads)) if i != home]
    if not others:
        return gamma

    lam = list(loads)
    site_comp = [comp[x] for x in site_nodes]
    max_d = max(dist_c)
    buckets: List[List[int]] = [[] for _ in range(max_d + 1)]
    for x in range(n):
        i = owner[x]
        if x == c or i == home:
            continue
        gap = dist_s[x] - dist_c[x]
        if gap > 0:
            lam[i] -= pi[x]
            if gap <= max_d:
                buckets[gap].append(x)

    def runner_up(candidates: Sequence[int], avoid: int) -> Optional[int]:
        pick = None
        for i in candidates:
            if site_comp[i] != avoid and (pick is None or lam[i] > lam[pick]):
                pick = i
        return pick

    best = max(others, key=lam.__getitem__)
    second = runner_up(others, site_comp[best])
    record = [(0, 0, 0)] * (max_d + 1)
    record[0] = (lam[best], site_comp[best], lam[second] if second is not None else 0)
    for j in range(1, max_d + 1):
        touched = set()
        for x in buckets[j]:
            i = owner[x]
            lam[i] += pi[x]
            touched.add(i)
        previous = {best}
        if second is not None:
            previous.add(second)
        best = max(touched | {best}, key=lam.__getitem__)
        second = runner_up(sorted(touched | previous), site_comp[best])
        record[j] = (lam[best], site_comp[best], lam[second] if second is not None else 0)

    for v in range(n):
        if v == c:
            continue
        top, top_comp, other = record[dist_c[v]]
        gamma[v] = top if top_comp != comp[v] else other
    return gamma


def gamma_all(tree: Graph, c: int, s: SiteList, costs: CostVector) -> np.ndarray:
    """
    gamma(v) = largest load, after inserting v, of a site whose territory avoids c
    and whose path to v passes through c (0 when there is none).

    Args:
        tree: Tree graph
        c: Internal vertex
        s: Site list
        costs: Vertex costs

    Returns:
        Array indexed by vertex (0 at c)
    """
    adj = tree.adjacency()
    dist_s, owner = adjacency_bfs(adj, list(s))
    loads = [0] * len(s)
    pi = costs.values.tolist()
    for v, i in enumerate(owner):
        loads[i] += pi[v]
    depth, comp = _components(adj, c)
    return _gamma(c, owner, dist_s, depth, comp, loads, list(s), pi)


@dataclass
class _Frame:
    """One subtree of the recursion with its carried lambda and cap values."""

    nodes: np.ndarray
    adj: Adjacency
    pi: np.ndarray
    sites: List[int]
    lam: np.ndarray
    cap: np.ndarray
    depth: int


def _insertion(
    adj: Adjacency,
    dist_s: Sequence[int],
    owner: Sequence[int],
    loads: Sequence[int],
    pi: Sequence[int],
    v: int,
) -> Tuple[int, int]:
    """(load of v, largest old-site load) after inserting v."""
    seen = {v: 0}
    queue = deque([v])
    own = pi[v]
    taken = [0] * len(loads)
    taken[owner[v]] += pi[v]
    while queue:
        u = queue.popleft()
        nd = seen[u] + 1
        for w in adj[u]:
            if w not in seen and nd < dist_s[w]:
                seen[w] = nd
                own += pi[w]
                taken[owner[w]] += pi[w]
                queue.append(w)
    rest = max((load - t for load, t in zip(loads, taken)), default=0)
    return own, rest


def _own_load(frame: _Frame, v: int) -> int:
    """Load of v after inserting it into the frame's own problem."""
    pi = frame.pi.tolist()
    if not frame.sites:
        return sum(pi)
    dist_s, owner = adjacency_bfs(frame.adj, frame.sites)
    loads = [0] * len(frame.sites)
    own, _ = _insertion(frame.adj, dist_s, owner, loads, pi, v)
    return own


class _TreeSolver:
    """Runs the centroid recursion and collects R(v) per vertex."""

    def __init__(
        self,
        g: Graph,
        costs: CostVector,
        s: SiteList,
        centroid_mode: str = "count",
        instrument: bool = False,
    ):
        if centroid_mode not in ("count", "sites"):
            raise ValueError(f"Unknown centroid mode: {centroid_mode}")
        self.g = g
        self.costs = costs
        self.s = s
        self.centroid_mode = centroid_mode
        self.instrument = instrument
        self.global_sites = s.mask(g.n)
        self.scores = np.full(g.n, UNSET, dtype=np.int64)
        self.max_depth = 0
        self.max_site_depth = 0

    def run(self) -> np.ndarray:
        n = self.g.n
        stack = [
            _Frame(
                nodes=np.arange(n, dtype=np.int64),
                adj=[list(a) for a in self.g.adjacency()],
                pi=self.costs.values.astype(np.int64).copy(),
                sites=list(self.s),
                lam=np.zeros(n, dtype=np.int64),
                cap=np.zeros(n, dtype=np.int64),
                depth=0,
            )
        ]
        while stack:
            frame = stack.pop()
            self.max_depth = max(self.max_depth, frame.depth)
            if frame.sites:
                self.max_site_depth = max(self.max_site_depth, frame.depth)
            stack.extend(self._step(frame))
        return self.scores

    def _write(self, frame: _Frame, local: np.ndarray, values: np.ndarray) -> None:
        glob = frame.nodes[local]
        keep = ~self.global_sites[glob]
        self.scores[glob[keep]] = values[keep]

    def _step(self, frame: _Frame) -> List[_Frame]:
        size = len(frame.adj)
        site_mask = np.zeros(size, dtype=bool)
        site_mask[frame.sites] = True
        free = np.flatnonzero(~site_mask)
        if free.size == 0:
            return []

        if not frame.sites:
            total = int(frame.pi.sum())
            self._write(frame, free, np.maximum(frame.lam[free] + total, frame.cap[free]))
            return []

        dist_l, owner_l = adjacency_bfs(frame.adj, frame.sites)
        pi_l = frame.pi.tolist()
        loads = [0] * len(frame.sites)
        for v, i in enumerate(owner_l):
            loads[i] += pi_l[v]

        if free.size == 1:
            v = int(free[0])
            own, rest = _insertion(frame.adj, dist_l, owner_l, loads, pi_l, v)
            value = max(own + int(frame.lam[v]), int(frame.cap[v]), rest)
            self._write(frame, free, np.array([value], dtype=np.int64))
            return []

        weights = (
            site_mask.astype(np.int64)
            if self.centroid_mode == "sites"
            else np.ones(size, dtype=np.int64)
        )
        c = _centroid(frame.adj, weights)
        if not site_mask[c]:
            own, rest = _insertion(frame.adj, dist_l, owner_l, loads, pi_l, c)
            value = max(own + int(frame.lam[c]), int(frame.cap[c]), rest)
            self._write(frame, np.array([c]), np.array([value], dtype=np.int64))

        home = owner_l[c]
        home_site = frame.sites[home]
        owner = np.array(owner_l, dtype=np.int64)
        dist_s = np.array(dist_l, dtype=np.int64)
        in_home = owner == home

        alpha = _alpha(frame.adj, home_site, np.where(in_home, frame.pi, 0))
        masked_pi = np.where(in_home, 0, frame.pi)

        depth_l, comp_l = _components(frame.adj, c)
        dist_c = np.array(depth_l, dtype=np.int64)
        comp = np.array(comp_l, dtype=np.int64)
        beta = _beta(frame.adj, c, dist_s, masked_pi, dist_c, comp)
        gamma = _gamma(c, owner_l, dist_l, depth_l, comp_l, loads, frame.sites, pi_l)

        lam = frame.lam + alpha + beta
        cap = np.maximum(np.maximum(frame.cap, loads[home] - alpha), gamma)
        logger.debug(
            f"tree frame depth={frame.depth} size={size} sites={len(frame.sites)} "
            f"centroid={int(frame.nodes[c])}"
        )
        children = self._split(frame, c, comp_l, masked_pi, lam, cap, home_site)
        if self.instrument:
            self._check_identity(frame, children, dist_l, owner_l, lam)
        return children

    def _split(
        self,
        frame: _Frame,
        c: int,
        comp: Sequence[int],
        masked_pi: np.ndarray,
        lam: np.ndarray,
        cap: np.ndarray,
        home_site: int,
    ) -> List[_Frame]:
        branches = len(frame.adj[c])
        members: List[List[int]] = [[] for _ in range(branches)]
        for v in range(len(frame.adj)):
            if v != c:
                members[comp[v]].append(v)
        local = [-1] * len(frame.adj)
        for group in members:
            for k, v in enumerate(group):
                local[v] = k
        site_rank = {x: r for r, x in enumerate(frame.sites)}
        children = []
        for group in members:
            idx = np.array(group, dtype=np.int64)
            adj = [[local[w] for w in frame.adj[v] if w != c] for v in group]
            sites = sorted(
                (v for v in group if v in site_rank and v != home_site),
                key=site_rank.__getitem__,
            )
            children.append(
                _Frame(
                    nodes=frame.nodes[idx],
                    adj=adj,
                    pi=masked_pi[idx],
                    sites=[local[v] for v in sites],
                    lam=lam[idx],
                    cap=cap[idx],
                    depth=frame.depth + 1,
                )
            )
        return children

    def _check_identity(
        self,
        frame: _Frame,
        children: List[_Frame],
        dist_l: Sequence[int],
        owner_l: Sequence[int],
        new_lam: np.ndarray,
    ) -> None:
        pi_l = frame.pi.tolist()
        loads = [0] * len(frame.sites)
        position = {int(g): k for k, g in enumerate(frame.nodes.tolist())}
        for child in children:
            for k, glob in enumerate(child.nodes.tolist()):
                v = position[glob]
                if v in frame.sites:
                    continue
                parent_side = int(frame.lam[v]) + _insertion(
                    frame.adj, dist_l, owner_l, loads, pi_l, v
                )[0]
                child_side = int(new_lam[v]) + _own_load(child, k)
                if parent_side != child_side:
                    raise TreeInvariantError(
                        f"Chained load identity broken at vertex {glob}: "
                        f"{parent_side} != {child_side}"
                    )


def tree_scores(
    g: Graph,
    costs: CostVector,
    s: SiteList,
    centroid_mode: str = "count",
    instrument: bool = False,
    stats: Optional[Dict[str, int]] = None,
) -> np.ndarray:
    """L(S+v) for every non-site vertex of a tree."""
    solver = _TreeSolver(g, costs, s, centroid_mode, instrument)
    scores = solver.run()
    if stats is not None:
        stats["max_depth"] = solver.max_depth
        stats["max_site_depth"] = solver.max_site_depth
    return scores


def solve_tree(
    g: Graph,
    costs: CostVector,
    s: SiteList,
    centroid_mode: str = "count",
    instrument: bool = False,
) -> SolveResult:
    """
    Solve Balanced Vertex on a tree in O(n log n) up to the lifting factor.

    Args:
        g: Tree graph
        costs: Vertex costs
        s: Site list
        centroid_mode: "count" for node-count centroids, "sites" to balance sites
        instrument: Check the recursion's load identity at every frame

    Raises:
        NotAClassError: If the graph is not a tree
    """
    check_candidates(g, costs, s)
    require_unweighted(g, "tree")
    if not is_tree(g):
        raise NotAClassError(f"Graph is not a tree (m={g.m}, n={g.n})")
    scores = tree_scores(g, costs, s, centroid_mode, instrument)
    return finish(g, costs, s, scores, "tree")

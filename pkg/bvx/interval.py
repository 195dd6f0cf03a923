"""
Balanced Vertex on proper interval graphs.

Recognition by repeated LexBFS, a σ ordering that turns distances into layer
arithmetic, and two layer sweeps: one for the new site's load and one for
the heaviest old site after the insertion.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import get_settings
from .graph import (
    CostVector,
    Graph,
    PreconditionError,
    SiteList,
    multi_source_bfs,
    require_unweighted,
)
from .structures import AddressableMaxHeap, FenwickTree
from .voronoi import SolveResult, check_candidates, finish, prioritized_voronoi

logger = logging.getLogger(__name__)

UNSET = np.iinfo(np.int64).max


class RecognitionError(PreconditionError):
    """Raised when a graph is not a proper interval graph."""

    def __init__(self, message: str, triple: Optional[Tuple[int, int, int]] = None):
        super().__init__(message)
        self.triple = triple


class SigmaValidationError(PreconditionError):
    """Raised when a σ ordering violates the layer distance formula."""
    pass


class SweepInvariantError(AssertionError):
    """Raised when an instrumented sweep finds its state out of sync."""
    pass


@dataclass(frozen=True, eq=False)
class UmbrellaOrder:
    """
    Vertex order in which every closed neighborhood is a contiguous range.

    ``lo[p]``/``hi[p]`` bound the closed neighborhood of the vertex at
    position p; both are nondecreasing.
    """

    order: np.ndarray
    position: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def x0(self) -> int:
        return int(self.order[0])


@dataclass(frozen=True, eq=False)
class SigmaOrdering:
    """
    Layers ℓ(v) = d(v, x0) and a total order σ (ranks 0..n-1).

    For ℓ(u) < ℓ(v): d(u, v) = ℓ(v) - ℓ(u) when σ(v) < σ(u), otherwise one more.
    """

    layer: np.ndarray
    sigma: np.ndarray

    @property
    def depth(self) -> int:
        return int(self.layer.max()) if self.layer.size else 0

    def expected_distances(self, u: int) -> np.ndarray:
        """Distances from u predicted by the layer formula."""
        lu, su = int(self.layer[u]), int(self.sigma[u])
        gap = np.abs(self.layer - lu)
        deeper = self.layer > lu
        shallower = self.layer < lu
        exact = (deeper & (self.sigma < su)) | (shallower & (self.sigma > su))
        out = gap + np.where(exact, 0, 1)
        out[u] = 0
        return out


def _sorted_adjacency(g: Graph, rank: np.ndarray) -> List[List[int]]:
    """Neighbor lists ordered by ``rank``."""
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    dst = g.indices.astype(np.int64)
    order = np.lexsort((rank[dst], src))
    dst_sorted = dst[order].tolist()
    indptr = g.indptr.tolist()
    return [dst_sorted[indptr[v]:indptr[v + 1]] for v in range(g.n)]


def lex_bfs(g: Graph, initial: Sequence[int]) -> List[int]:
    """
    Lexicographic BFS by partition refinement.

    Ties are broken toward the vertex that comes first in ``initial``; passing
    a reversed previous sweep gives the LexBFS+ variant.

    Args:
        g: Graph
        initial: Every vertex once, the tie-breaking order

    Returns:
        Visit order
    """
    n = g.n
    rank = np.empty(n, dtype=np.int64)
    rank[np.asarray(initial, dtype=np.int64)] = np.arange(n, dtype=np.int64)
    adj = _sorted_adjacency(g, rank)

    # Circular doubly linked list over vertices with sentinel n.
    nxt = [0] * (n + 1)
    prv = [0] * (n + 1)
    seq = [n] + [int(v) for v in initial] + [n]
    for a, b in zip(seq, seq[1:]):
        nxt[a] = b
        prv[b] = a
    cls = [0] * n
    head = [seq[1]]
    size = [n]
    visited = bytearray(n)
    out: List[int] = []

    def unlink(v: int) -> None:
        nxt[prv[v]] = nxt[v]
        prv[nxt[v]] = prv[v]

    def insert_before(v: int, anchor: int) -> None:
        p = prv[anchor]
        nxt[p] = v
        prv[v] = p
        nxt[v] = anchor
        prv[anchor] = v

    while nxt[n] != n:
        p = nxt[n]
        c = cls[p]
        size[c] -= 1
        if size[c]:
            head[c] = nxt[p]
        unlink(p)
        visited[p] = 1
        out.append(p)
        split: Dict[int, int] = {}
        for w in adj[p]:
            if visited[w]:
                continue
            c = cls[w]
            fresh = split.get(c)
            if fresh is None:
                fresh = len(head)
                split[c] = fresh
                head.append(w)
                size.append(0)
            if head[c] == w:
                head[c] = nxt[w]
            else:
                unlink(w)
                insert_before(w, head[c])
            cls[w] = fresh
            size[c] -= 1
            size[fresh] += 1
    return out


def _umbrella_violation(g: Graph, order: Sequence[int]) -> Optional[Tuple[int, int, int]]:
    """A triple i < j < k (by position) with ik an edge and ij or jk missing."""
    n = g.n
    pos = np.empty(n, dtype=np.int64)
    pos[np.asarray(order, dtype=np.int64)] = np.arange(n, dtype=np.int64)
    adj = g.adjacency()
    for p, v in enumerate(order):
        nb = [int(pos[w]) for w in adj[v]] + [p]
        lo, hi = min(nb), max(nb)
        if hi - lo + 1 == len(nb):
            continue
        present = set(nb)
        j = next(q for q in range(lo, hi + 1) if q not in present)
        if j < p:
            return (int(order[lo]), int(order[j]), int(v))
        return (int(v), int(order[j]), int(order[hi]))
    return None


def recognize_proper_interval(g: Graph) -> UmbrellaOrder:
    """
    Find an umbrella order with three LexBFS sweeps.

    Args:
        g: Connected graph

    Returns:
        UmbrellaOrder starting at an end vertex

    Raises:
        RecognitionError: With a vertex triple certifying a violation
    """
    first = lex_bfs(g, list(range(g.n)))
    second = lex_bfs(g, first[::-1])
    third = lex_bfs(g, second[::-1])
    triple = _umbrella_violation(g, third)
    if triple is not None:
        raise RecognitionError(
            f"Not a proper interval graph: {triple[0]}-{triple[2]} is an edge "
            f"but {triple[1]} between them breaks the neighborhood range",
            triple,
        )
    n = g.n
    order = np.asarray(third, dtype=np.int64)
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n, dtype=np.int64)
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    nb_pos = position[g.indices]
    lo = position.copy()
    hi = position.copy()
    np.minimum.at(lo, src, nb_pos)
    np.maximum.at(hi, src, nb_pos)
    logger.debug(f"Umbrella order found for n={n}, x0={third[0]}")
    return UmbrellaOrder(order=order, position=position, lo=lo[order], hi=hi[order])


def _preorder_ranks(order: UmbrellaOrder, layer_of_pos: np.ndarray) -> np.ndarray:
    """
    σ as the preorder of the greedy-reach trie.

    Node (q, t) for the vertex at position q in layer t has parent F(q) when
    that reaches layer t+1, otherwise the "behind" node of time t+1. Children
    are listed by position with the behind node first.
    """
    n = layer_of_pos.shape[0]
    depth = int(layer_of_pos[-1])
    last = np.zeros(depth + 1, dtype=np.int64)
    last[layer_of_pos] = np.arange(n, dtype=np.int64)
    reach = order.hi.tolist()
    layers = layer_of_pos.tolist()
    last_l = last.tolist()

    # Behind node of time t (1..depth+1) is n + t - 1; root is n + depth.
    children: List[List[int]] = [[] for _ in range(n + depth + 1)]
    for t in range(2, depth + 2):
        children[n + t - 1].append(n + t - 2)
    for q in range(n):
        t = layers[q]
        f = reach[q]
        if f > last_l[t]:
            children[f].append(q)
        else:
            children[n + t].append(q)

    rank = np.empty(n, dtype=np.int64)
    counter = 0
    stack = [n + depth]
    while stack:
        node = stack.pop()
        if node < n:
            rank[node] = counter
            counter += 1
        stack.extend(reversed(children[node]))
    return rank


def validate_sigma(
    g: Graph,
    sig: SigmaOrdering,
    full_check_n: Optional[int] = None,
    samples: Optional[int] = None,
    seed: int = 0,
) -> int:
    """
    Compare the layer formula with BFS distances.

    Every source is checked when n is at most ``full_check_n``, otherwise a
    seeded sample of ``samples`` sources.

    Returns:
        Number of sources checked

    Raises:
        SigmaValidationError: On the first violating pair
    """
    settings = get_settings()
    full_check_n = settings.sigma_full_check_n if full_check_n is None else full_check_n
    samples = settings.sigma_samples if samples is None else samples
    if g.n <= full_check_n:
        sources = np.arange(g.n)
    else:
        rng = np.random.default_rng(seed)
        sources = rng.choice(g.n, size=min(samples, g.n), replace=False)
    adj = g.adjacency()
    for u in sources.tolist():
        dist = np.asarray(_bfs(adj, u), dtype=np.int64)
        bad = np.flatnonzero(dist != sig.expected_distances(u))
        if bad.size:
            v = int(bad[0])
            raise SigmaValidationError(
                f"σ ordering predicts d({u}, {v}) = {int(sig.expected_distances(u)[v])} "
                f"but the graph distance is {int(dist[v])}"
            )
    return int(sources.shape[0])


def _bfs(adj: Sequence[Sequence[int]], source: int) -> List[int]:
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] == -1:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def sigma_ordering(g: Graph, order: UmbrellaOrder, validate: bool = True) -> SigmaOrdering:
    """
    Build layers from x0 and the σ ordering for an umbrella order.

    Args:
        g: Proper interval graph
        order: Umbrella order of g
        validate: Check the distance formula against BFS

    Returns:
        SigmaOrdering

    Raises:
        SigmaValidationError: If validation finds a violating pair
    """
    dist, _ = multi_source_bfs(g, [order.x0])
    layer_of_pos = dist[order.order]
    if np.any(np.diff(layer_of_pos) < 0):
        raise SigmaValidationError("BFS layers are not contiguous in the umbrella order")
    rank_by_pos = _preorder_ranks(order, layer_of_pos)
    sigma = np.empty(g.n, dtype=np.int64)
    sigma[order.order] = rank_by_pos
    sig = SigmaOrdering(layer=dist, sigma=sigma)
    if validate:
        checked = validate_sigma(g, sig)
        logger.debug(f"σ ordering validated from {checked} sources")
    return sig


def _by_layer(keys: np.ndarray, members: np.ndarray, depth: int) -> List[List[int]]:
    """Bucket ``members`` by ``keys``, dropping keys outside 0..depth."""
    out: List[List[int]] = [[] for _ in range(depth + 2)]
    for v, k in zip(members.tolist(), keys.tolist()):
        if 0 <= k <= depth + 1:
            out[k].append(v)
    return out


def _sweep_inputs(
    g: Graph, sig: SigmaOrdering, costs: CostVector, s: SiteList
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    diagram = prioritized_voronoi(g, s, costs)
    return diagram.dist, diagram.owner, diagram.loads, costs.values


def territory_loads(
    g: Graph,
    sig: SigmaOrdering,
    costs: CostVector,
    s: SiteList,
    check: bool = False,
) -> np.ndarray:
    """
    ℓ(v, S+v) for every v outside S.

    A forward sweep over layers counts vertices in earlier layers that join
    v, a backward sweep those in later layers; same-layer vertices join when
    they are farther than one step from their site.

    Args:
        g: Proper interval graph
        sig: Its σ ordering
        costs: Vertex costs
        s: Site list
        check: Recompute the sweep state from scratch at every layer

    Returns:
        int64 array, sites filled with the int64 maximum
    """
    dist, _, _, pi = _sweep_inputs(g, sig, costs, s)
    layer, sigma = sig.layer, sig.sigma
    depth = sig.depth
    n = g.n
    pi_l = pi.tolist()
    sigma_l = sigma.tolist()
    out = np.zeros(n, dtype=np.int64)
    layers = _by_layer(layer, np.arange(n), depth)
    site_mask = s.mask(n)
    idx = np.arange(n)

    # Earlier layers: u joins v in layer j outright while j < ℓ(u)+d(u)-1,
    # and iff σ(v) < σ(u) when j equals it.
    end = layer + dist - 1
    far = idx[dist >= 3]
    near = idx[dist >= 2]
    lam_in = _by_layer(layer[far] + 1, far, depth)
    lam_out = _by_layer(end[far], far, depth)
    fen_in = _by_layer(end[near], near, depth)
    fen_out = _by_layer(end[near] + 1, near, depth)
    lam = 0
    fw = FenwickTree(n)
    for j in range(depth + 1):
        for u in lam_in[j]:
            lam += pi_l[u]
        for u in lam_out[j]:
            lam -= pi_l[u]
        for u in fen_in[j]:
            fw.add(sigma_l[u], pi_l[u])
        for u in fen_out[j]:
            fw.add(sigma_l[u], -pi_l[u])
        if check:
            _check_forward(j, lam, fw, layer, dist, sigma, pi)
        for v in layers[j]:
            if not site_mask[v]:
                out[v] += lam + fw.above(sigma_l[v])

    # Later layers, mirrored: joins outright while j > ℓ(u)-d(u)+1.
    start = layer - dist + 1
    lam_in = _by_layer(layer[far] - 1, far, depth)
    lam_out = _by_layer(start[far], far, depth)
    fen_in = _by_layer(start[near], near, depth)
    fen_out = _by_layer(start[near] - 1, near, depth)
    lam = 0
    fw = FenwickTree(n)
    for j in range(depth, -1, -1):
        for u in lam_in[j]:
            lam += pi_l[u]
        for u in lam_out[j]:
            lam -= pi_l[u]
        for u in fen_in[j]:
            fw.add(sigma_l[u], pi_l[u])
        for u in fen_out[j]:
            fw.add(sigma_l[u], -pi_l[u])
        if check:
            _check_backward(j, lam, fw, layer, dist, sigma, pi)
        for v in layers[j]:
            if not site_mask[v]:
                out[v] += lam + fw.below(sigma_l[v])

    for j in range(depth + 1):
        members = np.asarray(layers[j], dtype=np.int64)
        if not members.size:
            continue
        same = int(pi[members][dist[members] > 1].sum())
        for v in layers[j]:
            if not site_mask[v]:
                out[v] += same + (pi_l[v] if dist[v] == 1 else 0)
    out[site_mask] = UNSET
    return out


def _check_forward(
    j: int,
    lam: int,
    fw: FenwickTree,
    layer: np.ndarray,
    dist: np.ndarray,
    sigma: np.ndarray,
    pi: np.ndarray,
) -> None:
    earlier = layer < j
    expect_lam = int(pi[earlier & (dist > j - layer + 1)].sum())
    if lam != expect_lam:
        raise SweepInvariantError(f"layer {j}: counter {lam}, expected {expect_lam}")
    held = earlier & (dist == j - layer + 1) & (dist > 0)
    for u in range(layer.shape[0]):
        want = int(pi[u]) if held[u] else 0
        if fw.value(int(sigma[u])) != want:
            raise SweepInvariantError(f"layer {j}: vertex {u} has the wrong Fenwick weight")


def _check_backward(
    j: int,
    lam: int,
    fw: FenwickTree,
    layer: np.ndarray,
    dist: np.ndarray,
    sigma: np.ndarray,
    pi: np.ndarray,
) -> None:
    later = layer > j
    expect_lam = int(pi[later & (dist > layer - j + 1)].sum())
    if lam != expect_lam:
        raise SweepInvariantError(f"layer {j}: backward counter {lam}, expected {expect_lam}")
    held = later & (dist == layer - j + 1)
    for u in range(layer.shape[0]):
        want = int(pi[u]) if held[u] else 0
        if fw.value(int(sigma[u])) != want:
            raise SweepInvariantError(
                f"layer {j}: vertex {u} has the wrong backward Fenwick weight"
            )

def site_loads_max(
    g: Graph,
    sig: SigmaOrdering,
    costs: CostVector,
    s: SiteList,
    check: bool = False,
) -> np.ndarray:
    """
    max over old sites of ℓ(s, S+v) for every v outside S.

    Each site carries a heap key equal to its load minus the vertices that
    any new site in the current layer takes for sure; the σ-dependent
    frontier is applied and rolled back while scanning the layer in σ order.

    Args:
        g: Proper interval graph
        sig: Its σ ordering
        costs: Vertex costs
        s: Site list
        check: Recompute every key from scratch at every layer

    Returns:
        int64 array, sites filled with the int64 maximum
    """
    dist, owner, loads, pi = _sweep_inputs(g, sig, costs, s)
    layer, sigma = sig.layer, sig.sigma
    depth = sig.depth
    n = g.n
    pi_l = pi.tolist()
    owner_l = owner.tolist()
    dist_l = dist.tolist()
    sigma_l = sigma.tolist()
    site_mask = s.mask(n)
    idx = np.arange(n)
    out = np.full(n, UNSET, dtype=np.int64)

    heap = AddressableMaxHeap({i: int(load) for i, load in enumerate(loads.tolist())})
    near = idx[dist >= 2]
    take = _by_layer(np.maximum(0, layer[near] - dist[near] + 2), near, depth)
    give = _by_layer(layer[near] + dist[near] - 1, near, depth)
    front_lo = _by_layer(layer[near] + dist[near] - 1, near, depth)
    front_hi = _by_layer(layer[near] - dist[near] + 1, near, depth)
    layers = _by_layer(layer, idx, depth)

    for j in range(depth + 1):
        for u in take[j]:
            heap.adjust(owner_l[u], -pi_l[u])
        for u in give[j]:
            heap.adjust(owner_l[u], pi_l[u])
        if check:
            _check_keys(j, heap, layer, dist, owner, loads, pi)

        lower, upper = front_lo[j], front_hi[j]
        for u in lower:
            heap.adjust(owner_l[u], -pi_l[u])
        events: List[Tuple[int, int, int]] = [(sigma_l[u], 0, u) for u in lower]
        events += [(sigma_l[u], 1, u) for u in upper]
        events += [(sigma_l[v], 2, v) for v in layers[j] if not site_mask[v]]
        events.sort()
        for _, kind, u in events:
            if kind == 0:
                heap.adjust(owner_l[u], pi_l[u])
            elif kind == 1:
                heap.adjust(owner_l[u], -pi_l[u])
            elif dist_l[u] == 1:
                home = owner_l[u]
                heap.adjust(home, -pi_l[u])
                out[u] = heap.max_key()
                heap.adjust(home, pi_l[u])
            else:
                out[u] = heap.max_key()
        for u in upper:
            heap.adjust(owner_l[u], pi_l[u])
    return out


def _check_keys(
    j: int,
    heap: AddressableMaxHeap,
    layer: np.ndarray,
    dist: np.ndarray,
    owner: np.ndarray,
    loads: np.ndarray,
    pi: np.ndarray,
) -> None:
    sure = (dist > np.abs(j - layer) + 1) & (dist > 0)
    taken = np.zeros(loads.shape[0], dtype=np.int64)
    np.add.at(taken, owner[sure], pi[sure])
    for i, expected in enumerate((loads - taken).tolist()):
        if heap[i] != expected:
            raise SweepInvariantError(f"layer {j}: key of site {i} is {heap[i]}, expected {expected}")


def proper_interval_scores(
    g: Graph,
    costs: CostVector,
    s: SiteList,
    sig: Optional[SigmaOrdering] = None,
    check: Optional[bool] = None,
) -> np.ndarray:
    """L(S+v) for every vertex, sites scored with the int64 maximum."""
    if sig is None:
        sig = sigma_ordering(g, recognize_proper_interval(g))
    if check is None:
        check = get_settings().debug_checks and g.n <= 80
    own = territory_loads(g, sig, costs, s, check=check)
    rest = site_loads_max(g, sig, costs, s, check=check)
    return np.maximum(own, rest)


def solve_proper_interval(
    g: Graph, costs: CostVector, s: SiteList, order: Optional[UmbrellaOrder] = None
) -> SolveResult:
    """
    Balanced Vertex on a proper interval graph.

    Args:
        g: Connected graph with unit edge lengths
        costs: Vertex costs
        s: Site list
        order: Umbrella order from an earlier recognition, if any

    Returns:
        SolveResult

    Raises:
        RecognitionError: If g is not a proper interval graph
        SigmaValidationError: If the σ ordering fails self-validation
    """
    check_candidates(g, costs, s)
    require_unweighted(g, "proper interval")
    if order is None:
        order = recognize_proper_interval(g)
    sig = sigma_ordering(g, order)
    logger.info(f"Proper interval solver: {sig.depth + 1} layers, n={g.n}, |S|={len(s)}")
    return finish(g, costs, s, proper_interval_scores(g, costs, s, sig), "proper-interval")

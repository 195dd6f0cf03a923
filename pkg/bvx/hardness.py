"""Hitting Set instances, their normalizing reductions and the hardness graph."""

import logging
import random
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Set, Tuple

from .graph import SCALE, CostVector, Graph, InstanceError, SiteList

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HSInstance:
    """Two lists of subsets of a universe; elements are strings."""

    universe: Tuple[str, ...]
    a: Tuple[FrozenSet[str], ...]
    b: Tuple[FrozenSet[str], ...]

    def __post_init__(self) -> None:
        if len(set(self.universe)) != len(self.universe):
            raise InstanceError("Universe elements must be distinct")
        known = set(self.universe)
        for name, sets in (("A", self.a), ("B", self.b)):
            for i, subset in enumerate(sets):
                stray = subset - known
                if stray:
                    raise InstanceError(
                        f"Set {i} of {name} has elements outside the universe: {sorted(stray)}"
                    )

    @classmethod
    def of(
        cls,
        universe: Iterable[object],
        a: Iterable[Iterable[object]],
        b: Iterable[Iterable[object]],
    ) -> "HSInstance":
        """Build from arbitrary element values, which are turned into strings."""
        return cls(
            universe=tuple(str(e) for e in universe),
            a=tuple(frozenset(str(e) for e in s) for s in a),
            b=tuple(frozenset(str(e) for e in s) for s in b),
        )


def _fresh(base: str, taken: Set[str]) -> str:
    """A name starting with ``base`` that is not in ``taken``; reserves it."""
    name = base
    k = 0
    while name in taken:
        k += 1
        name = f"{base}~{k}"
    taken.add(name)
    return name


def brute_force_hitting_set(inst: HSInstance) -> Tuple[bool, Optional[FrozenSet[str]]]:
    """
    Look for a set of A that intersects every set of B.

    Args:
        inst: HS instance

    Returns:
        (found, the first such set of A or None)
    """
    for a in inst.a:
        if all(a & b for b in inst.b):
            return True, a
    return False, None


def reduce_halving(inst: HSInstance) -> HSInstance:
    """
    Two disjoint copies where each B-set meets exactly half of the B-sets.

    A-sets of one copy are padded with the whole universe of the other copy,
    B-sets are tagged with a marker element per copy.

    Args:
        inst: HS instance

    Returns:
        Equivalent instance with twice as many sets
    """
    taken: Set[str] = set()
    copies = []
    for side in (0, 1):
        mapping = {e: _fresh(f"{e}@{side}", taken) for e in inst.universe}
        copies.append(mapping)
    markers = [_fresh("x0", taken), _fresh("x1", taken)]
    universes = [frozenset(c.values()) for c in copies]

    def rename(subset: FrozenSet[str], side: int) -> FrozenSet[str]:
        return frozenset(copies[side][e] for e in subset)

    a = [rename(s, 0) | universes[1] for s in inst.a]
    a += [rename(s, 1) | universes[0] for s in inst.a]
    b = [rename(s, 0) | {markers[0]} for s in inst.b]
    b += [rename(s, 1) | {markers[1]} for s in inst.b]
    universe = [copies[0][e] for e in inst.universe]
    universe += [copies[1][e] for e in inst.universe]
    universe += markers
    return HSInstance(universe=tuple(universe), a=tuple(a), b=tuple(b))


def reduce_cardinality(inst: HSInstance, alpha: int, beta: int) -> HSInstance:
    """
    Pad so every A-set has size t and the universe has size alpha*t + beta.

    Args:
        inst: HS instance with a nonempty A
        alpha: Integer at least 2
        beta: Integer offset

    Returns:
        Equivalent instance

    Raises:
        InstanceError: If alpha < 2 or A is empty
    """
    if alpha < 2:
        raise InstanceError(f"alpha must be at least 2, got {alpha}")
    if not inst.a:
        raise InstanceError("Cannot equalize set sizes of an empty list A")
    taken = set(inst.universe)
    big = max(len(s) for s in inst.a)
    small = min(len(s) for s in inst.a)
    dummies = [_fresh(f"d{i}", taken) for i in range(1, big - small + 1)]
    a = [s | frozenset(dummies[: big - len(s)]) for s in inst.a]
    universe = list(inst.universe) + dummies

    target = alpha * big + beta
    if target > len(universe):
        universe += [_fresh(f"e{i}", taken) for i in range(target - len(universe))]
    elif target < len(universe):
        q, r = divmod(len(universe) - target, alpha - 1)
        xs = [_fresh(f"p{i}", taken) for i in range(alpha - 1 - r)]
        ys = [_fresh(f"q{i}", taken) for i in range(q + 1)]
        universe += xs + ys
        a = [s | frozenset(ys) for s in a]
    return HSInstance(universe=tuple(universe), a=tuple(a), b=inst.b)


def set_size(inst: HSInstance) -> int:
    """Common size of the A-sets."""
    sizes = {len(s) for s in inst.a}
    if len(sizes) != 1:
        raise InstanceError(f"A-sets have differing sizes {sorted(sizes)}")
    return sizes.pop()


@dataclass(frozen=True, eq=False)
class HardnessGraph:
    """
    Balanced Vertex instance encoding a normalized HS instance.

    ``threshold`` is in whole cost units: a new site with load at most the
    threshold exists exactly when the instance has a hitting set, provided
    ``thresholds_valid`` holds.
    """

    graph: Graph
    sites: SiteList
    costs: CostVector
    labels: Tuple[str, ...]
    instance: HSInstance
    n: int
    t: int
    threshold: int
    thresholds_valid: bool

    S_VERTEX = 0
    X_VERTEX = 1
    Y_VERTEX = 2

    @property
    def threshold_fixed(self) -> int:
        return self.threshold * SCALE

    def vertices(self, prefix: str) -> List[int]:
        """Vertex ids whose label starts with ``prefix`` (e.g. "a#")."""
        return [v for v, label in enumerate(self.labels) if label.startswith(prefix)]


def _equalize(inst: HSInstance) -> HSInstance:
    """Repeat the last set of the shorter list until |A| = |B|."""
    if not inst.a or not inst.b:
        raise InstanceError("Both set lists must be nonempty")
    a, b = list(inst.a), list(inst.b)
    while len(a) < len(b):
        a.append(a[-1])
    while len(b) < len(a):
        b.append(b[-1])
    return HSInstance(universe=inst.universe, a=tuple(a), b=tuple(b))


def build_hardness_graph(inst: HSInstance) -> HardnessGraph:
    """
    Normalize an HS instance and encode it as a Balanced Vertex instance.

    Vertices are s, x, y, then one per universe element, A-set and B-set.
    U ∪ {x, y} is a clique, s is adjacent to x and y, every A-set to y and
    its elements, every B-set to its elements. The only site is s.

    Args:
        inst: Any HS instance with nonempty lists

    Returns:
        HardnessGraph
    """
    reduced = reduce_cardinality(reduce_halving(_equalize(inst)), 2, -1)
    n = len(reduced.a)
    t = (len(reduced.universe) + 1) // 2

    labels = ["s", "x", "y"]
    labels += [f"u#{e}" for e in reduced.universe]
    labels += [f"a#{i}" for i in range(n)]
    labels += [f"b#{j}" for j in range(len(reduced.b))]
    elem = {e: 3 + i for i, e in enumerate(reduced.universe)}
    a0 = 3 + len(reduced.universe)
    b0 = a0 + n

    clique = [1, 2] + list(elem.values())
    edges: List[Tuple[int, int]] = [(0, 1), (0, 2)]
    edges += [(u, v) for i, u in enumerate(clique) for v in clique[i + 1:]]
    for i, subset in enumerate(reduced.a):
        edges.append((2, a0 + i))
        edges += [(elem[e], a0 + i) for e in subset]
    for j, subset in enumerate(reduced.b):
        edges += [(elem[e], b0 + j) for e in subset]

    graph = Graph.from_edges(len(labels), edges)
    valid = 2 < t and 2 * t < n + 4
    logger.info(
        f"Hardness graph: n={n}, t={t}, {graph.n} vertices, {graph.m} edges, "
        f"thresholds {'valid' if valid else 'not guaranteed'}"
    )
    return HardnessGraph(
        graph=graph,
        sites=SiteList((0,)),
        costs=CostVector.unit(graph.n),
        labels=tuple(labels),
        instance=reduced,
        n=n,
        t=t,
        threshold=n + t + 1,
        thresholds_valid=valid,
    )


def random_hs_instance(
    rng: random.Random,
    sets: int,
    universe: int,
    density: float = 0.5,
) -> HSInstance:
    """
    Random instance with ``sets`` sets per list over ``universe`` elements.

    Every set is nonempty; each element joins a set with probability ``density``.
    """
    if sets < 1 or universe < 1:
        raise InstanceError("Need at least one set and one element")
    elements = [str(i) for i in range(universe)]

    def draw() -> FrozenSet[str]:
        chosen = {e for e in elements if rng.random() < density}
        if not chosen:
            chosen = {rng.choice(elements)}
        return frozenset(chosen)

    return HSInstance(
        universe=tuple(elements),
        a=tuple(draw() for _ in range(sets)),
        b=tuple(draw() for _ in range(sets)),
    )


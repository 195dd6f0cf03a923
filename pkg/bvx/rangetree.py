"""Weighted k-dimensional orthogonal range tree for box sum queries."""

import logging
from bisect import bisect_left, bisect_right
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

# Stand-ins for unbounded sides; coordinates are distances, far inside these.
NEG_INF = -(1 << 62)
POS_INF = 1 << 62

Bound = Optional[Tuple[int, bool]]


class RangeTreeError(ValueError):
    """Raised when points or query bounds have inconsistent dimensions."""
    pass


class _Line:
    """Last dimension: sorted coordinates with prefix sums of weights."""

    __slots__ = ("coords", "prefix")

    def __init__(self, coords: List[int], weights: List[int]):
        self.coords = coords
        prefix = [0]
        for w in weights:
            prefix.append(prefix[-1] + w)
        self.prefix = prefix

    def total(self) -> int:
        return self.prefix[-1]

    def query(self, lo: int, hi: int) -> int:
        i = bisect_left(self.coords, lo)
        j = bisect_right(self.coords, hi)
        return self.prefix[j] - self.prefix[i] if j > i else 0


class _Node:
    """Node over a slice of points sorted on one dimension, with the next level attached."""

    __slots__ = ("lo", "hi", "left", "right", "assoc")

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi
        self.left: Optional["_Node"] = None
        self.right: Optional["_Node"] = None
        self.assoc: Union["_Node", _Line, None] = None


class KRangeTree:
    """
    Static range tree over integer k-tuples with integer weights.

    Every node on dimension d carries a tree over dimensions d+1.. of its
    points; the last dimension is a sorted array with prefix sums.
    """

    def __init__(self, points: Sequence[Sequence[int]], weights: Sequence[int], k: Optional[int] = None):
        if k is None:
            if not points:
                raise RangeTreeError("Dimension is required for an empty point set")
            k = len(points[0])
        if k < 1:
            raise RangeTreeError("Dimension must be at least 1")
        if len(points) != len(weights):
            raise RangeTreeError(f"Got {len(weights)} weights for {len(points)} points")
        for p in points:
            if len(p) != k:
                raise RangeTreeError(f"All points must have {k} dimensions, got {len(p)}")
        self.k = k
        self.size = len(points)
        self.coords = np.asarray(points, dtype=np.int64).reshape(len(points), k)
        self.weights = np.asarray(weights, dtype=np.int64)
        self._root: Union[_Node, _Line, None] = None
        if self.size:
            order = np.argsort(self.coords[:, 0], kind="stable")
            self._root = self._build(order, 0)

    @classmethod
    def build(
        cls,
        points: Sequence[Sequence[int]],
        weights: Sequence[int],
        k: Optional[int] = None,
    ) -> "KRangeTree":
        """
        Build the index.

        Args:
            points: Integer k-tuples (duplicates allowed)
            weights: One integer weight per point
            k: Dimension, required when ``points`` is empty

        Returns:
            KRangeTree

        Raises:
            RangeTreeError: On mixed dimensions
        """
        return cls(points, weights, k)

    def _build(self, order: np.ndarray, dim: int) -> Union[_Node, _Line]:
        """``order`` lists point indices sorted by coordinate ``dim``."""
        column = self.coords[order, dim]
        if dim == self.k - 1:
            return _Line(column.tolist(), self.weights[order].tolist())
        node = _Node(int(column[0]), int(column[-1]))
        nxt = order[np.argsort(self.coords[order, dim + 1], kind="stable")]
        node.assoc = self._build(nxt, dim + 1)
        if order.shape[0] > 1 and node.lo != node.hi:
            mid = order.shape[0] // 2
            node.left = self._build(order[:mid], dim)
            node.right = self._build(order[mid:], dim)
        return node

    def query(
        self,
        lower: Sequence[Bound],
        upper: Optional[Sequence[Optional[int]]] = None,
    ) -> int:
        """
        Sum of weights inside a box.

        Args:
            lower: Per dimension ``(value, strict)`` meaning ``> value`` when
                strict and ``>= value`` otherwise, or None for no bound
            upper: Optional inclusive upper bound per dimension

        Returns:
            Total weight of the points in the box
        """
        if len(lower) != self.k or (upper is not None and len(upper) != self.k):
            raise RangeTreeError(f"Query must have {self.k} bounds")
        if self._root is None:
            return 0
        lo = []
        for bound in lower:
            if bound is None:
                lo.append(NEG_INF)
            else:
                value, strict = bound
                lo.append(int(value) + 1 if strict else int(value))
        hi = [POS_INF if upper is None or upper[d] is None else int(upper[d]) for d in range(self.k)]
        return self._query(self._root, 0, lo, hi)

    def _query(self, node: Union[_Node, _Line], dim: int, lo: List[int], hi: List[int]) -> int:
        if isinstance(node, _Line):
            return node.query(lo[dim], hi[dim])
        if node.hi < lo[dim] or node.lo > hi[dim]:
            return 0
        if lo[dim] <= node.lo and node.hi <= hi[dim]:
            assert node.assoc is not None
            return self._query(node.assoc, dim + 1, lo, hi)
        total = 0
        if node.left is not None:
            total += self._query(node.left, dim, lo, hi)
        if node.right is not None:
            total += self._query(node.right, dim, lo, hi)
        return total

    def total(self) -> int:
        return int(self.weights.sum()) if self.size else 0

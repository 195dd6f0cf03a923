"""Sweep data structures: a Fenwick tree over positions and an addressable max-heap."""

import logging
from typing import Dict, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)


class FenwickTree:
    """
    Binary indexed tree over positions 0..size-1 holding integer weights.

    ``add`` and the prefix queries run in O(log size).
    """

    __slots__ = ("size", "_tree", "_values")

    def __init__(self, size: int):
        self.size = size
        self._tree = [0] * (size + 1)
        self._values = [0] * size

    def add(self, i: int, delta: int) -> None:
        """Add ``delta`` to the weight at position ``i``."""
        self._values[i] += delta
        i += 1
        tree, n = self._tree, self.size
        while i <= n:
            tree[i] += delta
            i += i & (-i)

    def prefix(self, i: int) -> int:
        """Sum of weights at positions < i."""
        s = 0
        tree = self._tree
        while i > 0:
            s += tree[i]
            i -= i & (-i)
        return s

    def range_sum(self, lo: int, hi: int) -> int:
        """Sum of weights at positions lo..hi-1."""
        if hi <= lo:
            return 0
        return self.prefix(hi) - self.prefix(lo)

    def below(self, i: int) -> int:
        return self.prefix(i)

    def above(self, i: int) -> int:
        """Sum of weights at positions > i."""
        return self.prefix(self.size) - self.prefix(i + 1)

    def total(self) -> int:
        return self.prefix(self.size)

    def value(self, i: int) -> int:
        return self._values[i]


class _Entry:
    __slots__ = "key", "item"

    def __init__(self, item: int, key: int):
        self.item = item
        self.key = key

    def __lt__(self, other: "_Entry") -> bool:
        # Larger keys first; ties resolved toward the smaller item.
        if self.key != other.key:
            return self.key > other.key
        return self.item < other.item


class AddressableMaxHeap:
    """
    Binary max-heap whose entries can be found and re-keyed in place.

    Keys are set through subscription (``heap[item] = key``) or shifted with
    ``adjust``; the heap keeps an item-to-position map so both run in
    O(log size).
    """

    def __init__(self, items: Optional[Dict[int, int]] = None):
        self._heap: List[_Entry] = []
        self._index_map: Dict[int, int] = {}
        if items is not None:
            for item, key in items.items():
                self[item] = key

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, item: object) -> bool:
        return item in self._index_map

    def __getitem__(self, item: int) -> int:
        return self._heap[self._index_map[item]].key

    def __setitem__(self, item: int, key: int) -> None:
        """Updates an existing entry, or inserts a new one."""
        pos = self._index_map.get(item)
        if pos is None:
            pos = len(self._heap)
            entry = _Entry(item, key)
            self._heap.append(entry)
            self._siftup(pos, entry)
            return
        entry = self._heap[pos]
        old = entry.key
        entry.key = key
        if key > old:
            self._siftup(pos, entry)
        elif key < old:
            self._siftdown(pos, entry)

    def adjust(self, item: int, delta: int) -> None:
        self[item] = self[item] + delta

    def top(self) -> Tuple[int, int]:
        """(item, key) with the largest key."""
        if not self._heap:
            raise IndexError("top of an empty heap")
        entry = self._heap[0]
        return entry.item, entry.key

    def max_key(self, default: int = 0) -> int:
        return self._heap[0].key if self._heap else default

    def items(self) -> Iterable[Tuple[int, int]]:
        return ((e.item, e.key) for e in self._heap)

    def _siftdown(self, pos: int, entry: _Entry) -> None:
        heap, imap = self._heap, self._index_map
        size = len(heap)
        child = 2 * pos + 1
        while child < size:
            right = child + 1
            if right < size and heap[right] < heap[child]:
                child = right
            if not heap[child] < entry:
                break
            heap[pos] = heap[child]
            imap[heap[pos].item] = pos
            pos = child
            child = 2 * pos + 1
        heap[pos] = entry
        imap[entry.item] = pos

    def _siftup(self, pos: int, entry: _Entry) -> None:
        """Swaps an entry with its parent until the heap is restored."""
        heap, imap = self._heap, self._index_map
        while pos > 0:
            parent_pos = (pos - 1) // 2
            parent_entry = heap[parent_pos]
            if not entry < parent_entry:
                break
            heap[pos] = parent_entry
            imap[parent_entry.item] = pos
            pos = parent_pos
        heap[pos] = entry
        imap[entry.item] = pos

"""Addressable binary max-heap over integer keys 0..m-1."""

from __future__ import annotations

from typing import Sequence


class IndexedMaxHeap:
    """Binary max-heap whose entries are addressed by key.

    Ties on value go to the smaller key, so ``top()`` is deterministic.
    ``ops`` counts sift swaps and comparisons-free key writes.
    """

    __slots__ = ("val", "heap", "pos", "ops")

    def __init__(self, values: Sequence[int]) -> None:
        self.val = list(values)
        self.heap = list(range(len(self.val)))
        self.pos = list(range(len(self.val)))
        self.ops = 0
        for i in range(len(self.heap) // 2 - 1, -1, -1):
            self._down(i)
        self.ops = 0

    def _better(self, a: int, b: int) -> bool:
        va, vb = self.val[a], self.val[b]
        return va > vb or (va == vb and a < b)

    def _swap(self, i: int, j: int) -> None:
        h = self.heap
        h[i], h[j] = h[j], h[i]
        self.pos[h[i]] = i
        self.pos[h[j]] = j
        self.ops += 1

    def _up(self, i: int) -> None:
        h = self.heap
        while i > 0:
            p = (i - 1) >> 1
            if not self._better(h[i], h[p]):
                break
            self._swap(i, p)
            i = p

    def _down(self, i: int) -> None:
        h = self.heap
        n = len(h)
        while True:
            best = i
            for c in (2 * i + 1, 2 * i + 2):
                if c < n and self._better(h[c], h[best]):
                    best = c
            if best == i:
                return
            self._swap(i, best)
            i = best

    def __len__(self) -> int:
        return len(self.heap)

    def __getitem__(self, key: int) -> int:
        return self.val[key]

    def update(self, key: int, value: int) -> None:
        """Set the value stored under ``key`` and restore heap order."""
        self.ops += 1
        old = self.val[key]
        self.val[key] = value
        if value > old:
            self._up(self.pos[key])
        elif value < old:
            self._down(self.pos[key])

    def top(self) -> tuple[int, int]:
        """(value, key) of the maximum; raises IndexError when empty."""
        k = self.heap[0]
        return self.val[k], k

    def copy(self) -> "IndexedMaxHeap":
        other = IndexedMaxHeap.__new__(IndexedMaxHeap)
        other.val = list(self.val)
        other.heap = list(self.heap)
        other.pos = list(self.pos)
        other.ops = 0
        return other

    def check(self) -> bool:
        h = self.heap
        return all(self.pos[k] == i for i, k in enumerate(h)) and all(
            not self._better(h[i], h[(i - 1) >> 1]) for i in range(1, len(h))
        )

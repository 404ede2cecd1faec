"""Disjoint sets over the integers 0..n-1."""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import numpy as np


class UnionFind:
    """Union by rank with path compression over dense integer ids.

    Attributes
    ----------
      parent: Parent pointer of each element; roots point at themselves.
      rank: Upper bound of the tree height below each root.
      merges: Number of successful unions so far.

    """

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.rank = [0] * n
        self.merges = 0

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of `x` and `y`; returns False if already merged."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        self.merges += 1
        return True

    def roots(self) -> np.ndarray:
        """Root of every element as an int64 array."""
        return np.fromiter(
            (self.find(x) for x in range(len(self.parent))),
            dtype=np.int64,
            count=len(self.parent),
        )

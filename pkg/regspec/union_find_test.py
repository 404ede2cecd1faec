"""Unit tests for regspec.union_find."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

from regspec.union_find import UnionFind


def test_union_find_merges_and_roots() -> None:
    sets = UnionFind(6)
    assert sets.union(0, 1)
    assert sets.union(2, 3)
    assert sets.union(1, 3)
    assert not sets.union(0, 2)
    assert sets.merges == 3
    roots = sets.roots()
    assert len(set(roots[:4].tolist())) == 1
    assert len(set(roots.tolist())) == 3


def test_find_compresses_paths() -> None:
    sets = UnionFind(4)
    sets.parent = [0, 0, 1, 2]
    assert sets.find(3) == 0
    assert sets.parent == [0, 0, 0, 0]

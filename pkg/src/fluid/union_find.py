"""Union-find with stable, order-independent representatives."""
from __future__ import annotations

from typing import Iterable, Iterator


class MinUnionFind:
    """Disjoint sets over strings; the representative of a component is its
    lexicographically smallest member, so merge order never shows."""

    def __init__(self) -> None:
        self._parent: dict[str, str] = {}
        self._min: dict[str, str] = {}
        self._members: dict[str, set[str]] = {}

    def __contains__(self, x: str) -> bool:
        return x in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    def add(self, x: str) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._min[x] = x
            self._members[x] = {x}

    def _find(self, x: str) -> str:
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        self.add(a)
        self.add(b)
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return
        if len(self._members[ra]) < len(self._members[rb]):
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._members[ra].update(self._members.pop(rb))
        rb_min = self._min.pop(rb)
        if rb_min < self._min[ra]:
            self._min[ra] = rb_min

    def union_all(self, xs: Iterable[str]) -> None:
        it = iter(xs)
        first = next(it, None)
        if first is None:
            return
        self.add(first)
        for x in it:
            self.union(first, x)

    def canonical(self, x: str) -> str:
        """Smallest member of x's component; x itself when never linked."""
        if x not in self._parent:
            return x
        return self._min[self._find(x)]

    def same(self, a: str, b: str) -> bool:
        return self.canonical(a) == self.canonical(b)

    def members(self, x: str) -> set[str]:
        """Component of x (a borrowed set; do not mutate)."""
        if x not in self._parent:
            return {x}
        return self._members[self._find(x)]

    def components(self) -> Iterator[set[str]]:
        for root, members in self._members.items():
            if self._parent[root] == root:
                yield members

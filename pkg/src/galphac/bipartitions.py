"""Canonical bipartitions ``S|S̄`` of ``n`` parties.

Each unordered split is represented once: ``S`` is the smaller side, and when
both sides have ``n/2`` parties ``S`` is the one containing party 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator

from .errors import InvalidArgumentError, InvalidPartitionError


@dataclass(frozen=True, order=True)
class Bipartition:
    """One side ``S`` of a split of parties ``0 .. n-1``.

    Use :meth:`of` to build a bipartition from either side of a split; the
    constructor only accepts the canonical side.
    """

    n: int
    parties: tuple[int, ...]

    def __post_init__(self) -> None:
        parties = tuple(self.parties)
        if self.n < 2:
            raise InvalidPartitionError(f"a bipartition needs n >= 2 parties, got n={self.n}")
        if list(parties) != sorted(set(parties)):
            raise InvalidPartitionError(f"parties must be sorted and distinct: {parties}")
        if not parties or len(parties) >= self.n:
            raise InvalidPartitionError("S must be a nonempty proper subset")
        if parties[0] < 0 or parties[-1] >= self.n:
            raise InvalidPartitionError(f"party index out of range for n={self.n}: {parties}")
        k = len(parties)
        if 2 * k > self.n or (2 * k == self.n and parties[0] != 0):
            raise InvalidPartitionError(f"{parties} is not the canonical side of its split")
        object.__setattr__(self, "parties", parties)

    @classmethod
    def of(cls, side: Iterable[int], n: int) -> "Bipartition":
        """Canonical bipartition for the split with ``side`` on one side."""
        s = tuple(sorted(set(int(p) for p in side)))
        if not s or len(s) >= n or s[0] < 0 or s[-1] >= n:
            raise InvalidPartitionError(f"{s} is not a nonempty proper subset of range({n})")
        rest = tuple(p for p in range(n) if p not in s)
        if len(rest) < len(s) or (len(rest) == len(s) and s[0] != 0):
            s = rest
        return cls(n, s)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.n) if p not in self.parties)

    @property
    def size(self) -> int:
        return len(self.parties)

    def label(self) -> str:
        """Render as ``"S|S̄"``, e.g. ``"0|123"`` or ``"01|23"``."""
        sep = "," if self.n > 10 else ""
        return sep.join(map(str, self.parties)) + "|" + sep.join(map(str, self.complement))

    def __str__(self) -> str:
        return self.label()


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"need an integer n >= 2 parties, got {n!r}")


def cardinality(n: int) -> int:
    """Number of bipartitions of ``n`` parties, the root ``c(β)`` of the geometric mean.

    Evaluates the odd/even binomial sum directly; the middle binomial for even
    ``n`` counts each balanced split twice, hence the halving.
    """
    _check_n(n)
    if n % 2:
        return sum(comb(n, m) for m in range(1, (n - 1) // 2 + 1))
    return sum(comb(n, m) for m in range(1, (n - 2) // 2 + 1)) + comb(n, n // 2) // 2


def _iter_canonical(n: int) -> Iterator[Bipartition]:
    for k in range(1, n // 2 + 1):
        for side in itertools.combinations(range(n), k):
            if 2 * k == n and side[0] != 0:
                continue
            yield Bipartition(n, side)


@lru_cache(maxsize=32)
def _enumerate(n: int) -> tuple[Bipartition, ...]:
    return tuple(_iter_canonical(n))


@dataclass(frozen=True)
class BipartitionSet:
    n: int
    members: tuple[Bipartition, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Bipartition]:
        return iter(self.members)

    def __getitem__(self, i: int) -> Bipartition:
        return self.members[i]


def enumerate_bipartitions(n: int) -> BipartitionSet:
    """All canonical bipartitions of ``n`` parties, ordered by ``|S|`` then lexicographically."""
    _check_n(n)
    return BipartitionSet(int(n), _enumerate(int(n)))


def size_classes(n: int) -> list[tuple[int, int]]:
    """``(|S|, number of cuts with that |S|)`` for each cut-size class."""
    _check_n(n)
    out = [(k, comb(n, k)) for k in range(1, (n + 1) // 2)]
    if n % 2 == 0:
        out.append((n // 2, comb(n, n // 2) // 2))
    return out

import itertools
from math import comb

import pytest
from hypothesis import given, strategies as st

from galphac.bipartitions import (
    Bipartition,
    cardinality,
    enumerate_bipartitions,
    size_classes,
)
from galphac.errors import InvalidArgumentError, InvalidPartitionError


def test_n3_single_party_cuts():
    parts = enumerate_bipartitions(3)
    assert [b.parties for b in parts] == [(0,), (1,), (2,)]
    assert len(parts) == 3


def test_n4_hand_enumeration():
    # every 2-subset containing party 0, plus the four singletons
    pairs = [s for s in itertools.combinations(range(4), 2) if 0 in s]
    expected = [(0,), (1,), (2,), (3,)] + pairs
    assert [b.parties for b in enumerate_bipartitions(4)] == expected
    assert expected[4:] == [(0, 1), (0, 2), (0, 3)]


def test_n2():
    assert [b.parties for b in enumerate_bipartitions(2)] == [(0,)]


@pytest.mark.parametrize("n, expected", [(2, 1), (3, 3), (4, 7), (5, 15)])
def test_cardinality_values(n, expected):
    assert cardinality(n) == expected


@pytest.mark.parametrize("n", range(2, 17))
def test_cardinality_closed_form_matches_enumeration(n):
    assert cardinality(n) == 2 ** (n - 1) - 1 == len(enumerate_bipartitions(n))


@pytest.mark.parametrize("n", [0, 1, -3])
def test_rejects_small_n(n):
    with pytest.raises(InvalidArgumentError):
        enumerate_bipartitions(n)
    with pytest.raises(InvalidArgumentError):
        cardinality(n)


@given(st.integers(min_value=2, max_value=11))
def test_enumeration_properties(n):
    parts = enumerate_bipartitions(n)
    assert list(parts) == list(enumerate_bipartitions(n))
    # no duplicates as unordered splits
    splits = {frozenset([b.parties, b.complement]) for b in parts}
    assert len(splits) == len(parts)
    # sorted by |S| then lexicographically
    keys = [(b.size, b.parties) for b in parts]
    assert keys == sorted(keys)
    covered = set().union(*(b.parties for b in parts))
    # for n = 2 the single split {0}|{1} never puts party 1 on the S side
    assert covered == (set(range(n)) if n >= 3 else {0})


@given(st.integers(min_value=2, max_value=9), st.data())
def test_of_canonicalizes_either_side(n, data):
    side = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    b = Bipartition.of(side, n)
    rest = set(range(n)) - side
    assert Bipartition.of(rest, n) == b
    assert {frozenset(b.parties), frozenset(b.complement)} == {frozenset(side), frozenset(rest)}
    assert b in set(enumerate_bipartitions(n))


@pytest.mark.parametrize("n, parties", [(4, (1, 2)), (4, (0, 1, 2)), (3, ()), (3, (0, 3)), (3, (1, 0))])
def test_non_canonical_rejected(n, parties):
    with pytest.raises(InvalidPartitionError):
        Bipartition(n, parties)


def test_labels():
    assert Bipartition(4, (0,)).label() == "0|123"
    assert Bipartition(4, (0, 1)).label() == "01|23"


@pytest.mark.parametrize("n", range(2, 12))
def test_size_classes_sum_to_cardinality(n):
    classes = size_classes(n)
    assert sum(w for _, w in classes) == cardinality(n)
    if n % 2 == 0:
        assert classes[-1] == (n // 2, comb(n, n // 2) // 2)

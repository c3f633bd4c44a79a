from fractions import Fraction

import pytest

from impulse_reach.errors import DomainError
from impulse_reach.intervals import (
    Cell,
    Interval,
    Partition,
    cell_complement,
    cell_intersect,
    cell_union,
    common_refinement,
    eta,
    is_finer,
    partition_from_cuts,
    uniform_partition,
)

from conftest import UNIT, membership_samples, rand_cell, rand_partition


def cell_of(*specs) -> Cell:
    """specs: (lo, hi, lo_closed, hi_closed) tuples or single points."""
    ivs = []
    for s in specs:
        if not isinstance(s, tuple):
            ivs.append(Interval.point(s))
        else:
            ivs.append(Interval.make(*s))
    return Cell.from_intervals(ivs)


def same_membership(a: Cell, b: Cell) -> bool:
    for t in membership_samples(UNIT, a, b):
        if a.contains(t) != b.contains(t):
            return False
    return True


# -- interval / cell construction --------------------------------------------

def test_interval_validation():
    with pytest.raises(DomainError):
        Interval.make(1, 0)
    with pytest.raises(DomainError):
        Interval.make("1/2", "1/2", True, False)
    assert Interval.point("1/2").contains("1/2")


def test_cell_normalization_is_canonical():
    a = cell_of((0, "1/2", True, False), ("1/2", 1, True, True))
    b = cell_of((0, 1, True, True))
    assert a == b
    c = cell_of((0, "1/4"), ("1/4", "1/2", False, False))
    d = cell_of((0, "1/2", True, False))
    assert c == d
    assert cell_of((0, "1/4", True, False), ("1/4", "1/2")) == cell_of((0, "1/2"))


# -- cell_intersect -----------------------------------------------------------

def test_intersect_halfopen_with_closed():
    got = cell_intersect(cell_of((0, "1/2", True, False)), cell_of(("1/4", 1)))
    assert got == cell_of(("1/4", "1/2", True, False))


def test_intersect_with_empty_is_absorbing(rng):
    for _ in range(20):
        x = rand_cell(rng)
        assert cell_intersect(x, Cell.empty()) == Cell.empty()


def test_intersect_two_part_cell_against_interval():
    a = cell_of((0, "1/4"), ("1/2", 1))
    b = cell_of(("1/4", "3/4"))
    got = cell_intersect(a, b)
    # dense-sample membership oracle
    for t in membership_samples(UNIT, a, b, got):
        assert got.contains(t) == (a.contains(t) and b.contains(t))
    assert got == cell_of("1/4", ("1/2", "3/4"))


def test_intersect_matches_membership_oracle(rng):
    for _ in range(150):
        a, b = rand_cell(rng), rand_cell(rng)
        got = cell_intersect(a, b)
        for t in membership_samples(UNIT, a, b, got):
            assert got.contains(t) == (a.contains(t) and b.contains(t))


# -- cell_complement ----------------------------------------------------------

def test_complement_basic():
    dom = UNIT
    assert cell_complement(cell_of((0, "1/2", True, False)), dom) == cell_of(("1/2", 1))
    assert cell_complement(Cell.empty(), dom) == cell_of((0, 1))


def test_complement_point_and_tail():
    a = cell_of("1/3", ("2/3", 1, False, True))
    got = cell_complement(a, UNIT)
    assert got == cell_of((0, "1/3", True, False), ("1/3", "2/3", False, True))
    for t in membership_samples(UNIT, a, got):
        assert got.contains(t) == (UNIT.contains(t) and not a.contains(t))


def test_complement_requires_containment():
    with pytest.raises(DomainError):
        cell_complement(cell_of((0, 2)), UNIT)


def test_complement_union_restores_domain(rng):
    for _ in range(100):
        a = rand_cell(rng)
        comp = cell_complement(a, UNIT)
        assert cell_union(a, comp) == Cell((UNIT,))
        assert cell_intersect(a, comp) == Cell.empty()


# -- eta ----------------------------------------------------------------------

def test_eta_examples():
    assert eta(cell_of(("1/4", "1/2", True, False))) == Fraction(1, 4)
    assert eta(cell_of("1/2")) == 0
    assert eta(cell_of((0, "1/4"), ("1/2", 1))) == Fraction(3, 4)


def test_eta_modularity(rng):
    for _ in range(100):
        a, b = rand_cell(rng), rand_cell(rng)
        assert eta(a) + eta(b) == eta(cell_union(a, b)) + eta(cell_intersect(a, b))


def test_eta_additive_over_partitions(rng):
    for _ in range(50):
        p = rand_partition(rng)
        assert sum(eta(c) for c in p.cells) == eta(p.domain)


# -- partitions and refinement -------------------------------------------------

def test_partition_validation():
    with pytest.raises(DomainError):
        Partition((cell_of((0, "1/2")), cell_of(("1/2", 1))), UNIT)  # overlap {1/2}
    with pytest.raises(DomainError):
        Partition((cell_of((0, "1/2", True, False)),), UNIT)  # gap
    Partition((cell_of((0, "1/2", True, False)), cell_of(("1/2", 1))), UNIT)


def test_is_finer_examples():
    p = partition_from_cuts(UNIT, ["1/2"])
    assert is_finer(p, p)
    fine = partition_from_cuts(UNIT, ["1/4", "1/2"])
    assert is_finer(fine, p)
    other = partition_from_cuts(UNIT, ["1/3"])
    assert not is_finer(other, p)
    assert not is_finer(p, fine)


def test_common_refinement_idempotent(rng):
    for _ in range(20):
        p = rand_partition(rng)
        assert common_refinement(p, p) == p


def test_common_refinement_example():
    a = partition_from_cuts(UNIT, ["1/2"])
    b = partition_from_cuts(UNIT, ["1/3"])
    got = common_refinement(a, b)
    assert got == partition_from_cuts(UNIT, ["1/3", "1/2"])


def test_common_refinement_bounds_both(rng):
    for _ in range(80):
        a, b = rand_partition(rng), rand_partition(rng)
        r = common_refinement(a, b)
        assert len(r) <= len(a) * len(b)
        assert is_finer(r, a) and is_finer(r, b)


def test_refinement_transitive(rng):
    for _ in range(40):
        p1 = rand_partition(rng, max_cuts=3)
        p2 = common_refinement(p1, rand_partition(rng, max_cuts=3))
        p3 = common_refinement(p2, rand_partition(rng, max_cuts=3))
        assert is_finer(p2, p1) and is_finer(p3, p2)
        assert is_finer(p3, p1)


def test_uniform_partition():
    p = uniform_partition(UNIT, 4)
    assert len(p) == 4
    assert p.cells[0] == cell_of((0, "1/4", True, False))
    assert p.cells[-1] == cell_of(("3/4", 1))


def test_partition_json_roundtrip(rng):
    p = rand_partition(rng)
    assert Partition.from_json(p.to_json()) == p

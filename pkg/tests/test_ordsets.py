import pytest

from relcx.ordsets import (
    AlmostDisjointFamily,
    FiniteOrderedSet,
    InvalidArgument,
    OrderedSurjection,
    associated_partition,
    is_pseudo_segmentation,
    merged_order,
    partition_from_subset,
    segment,
    subsets,
)

R = FiniteOrderedSet.range


def bounds(ivs):
    return [(iv.init, iv.term) for iv in ivs]


@pytest.mark.parametrize(
    "n, sigma, expected",
    [
        (5, {2, 4}, [(1, 2), (2, 4), (4, 5)]),
        (3, set(), [(1, 3)]),
        (4, {2, 3}, [(1, 2), (2, 3), (3, 4)]),
    ],
)
def test_segment_examples(n, sigma, expected):
    assert bounds(segment(R(1, n), sigma)) == expected


def test_segment_rejects_endpoints():
    with pytest.raises(InvalidArgument):
        segment(R(1, 4), {1})
    with pytest.raises(InvalidArgument):
        segment(R(1, 1), set())


def test_segments_overlap_exactly_in_cut_points():
    I = R(1, 6)
    for sigma in subsets(I.interior()):
        segs = segment(I, sigma)
        shared = [a.term for a, b in zip(segs, segs[1:]) if a.term == b.init]
        assert tuple(shared) == sigma


@pytest.mark.parametrize(
    "n, P, blocks",
    [
        (8, {1, 2, 3, 6, 7}, [(1, 2, 3), (4,), (5,), (6, 7), (8,)]),
        (3, set(), [(1,), (2,), (3,)]),
        (4, {1, 2, 3, 4}, [(1, 2, 3, 4)]),
    ],
)
def test_partition_from_subset(n, P, blocks):
    part = partition_from_subset(n, P)
    assert part.blocks == blocks
    assert [x for b in part.blocks for x in b] == list(range(1, n + 1))


def _fam(parent, pairs):
    return AlmostDisjointFamily(parent, tuple(parent.interval(a, b) for a, b in pairs))


def test_associated_partition_example():
    parent = R(1, 12)
    fam = _fam(parent, [(1, 3), (3, 4), (6, 7), (9, 10), (10, 12)])
    assert associated_partition(fam).blocks == [(1, 2), (3,), (4, 5)]


def test_associated_partition_extremes():
    parent = R(1, 9)
    assert associated_partition(_fam(parent, [(1, 2), (4, 5), (7, 8)])).blocks == [(1,), (2,), (3,)]
    seg = AlmostDisjointFamily(parent, tuple(segment(parent, {3, 6})))
    assert associated_partition(seg).blocks == [(1, 2, 3)]


def test_almost_disjoint_validation():
    with pytest.raises(InvalidArgument):
        _fam(R(1, 5), [(1, 3), (2, 4)])
    with pytest.raises(InvalidArgument):
        AlmostDisjointFamily(R(1, 5), (R(2, 2),))


def test_pseudo_segmentation():
    parent = R(1, 5)
    assert is_pseudo_segmentation(AlmostDisjointFamily(parent, tuple(segment(parent, {3}))))
    assert not is_pseudo_segmentation(_fam(parent, [(1, 2), (4, 5)]))
    assert is_pseudo_segmentation(_fam(parent, [(1, 2), (3, 5)]))


def test_merged_order_figure_instance():
    parent = R(1, 20)
    fam_I = _fam(parent, [(1, 3), (3, 5), (8, 10), (13, 14), (14, 16)])
    fam_J = _fam(parent, [(5, 6), (6, 8), (12, 13)])
    m = merged_order(fam_I, fam_J)
    assert m.labels() == ["1", "2", "1′", "2′", "3", "3′", "4", "5"]
    blocks = [[m.labels()[m.order.position(t)] for t in b] for b in m.partition.blocks]
    assert blocks == [["1", "2", "1′", "2′", "3"], ["3′", "4", "5"]]


def test_merged_order_degenerate_cases():
    parent = R(1, 9)
    fam_I = _fam(parent, [(1, 2), (2, 3), (5, 6)])
    empty = AlmostDisjointFamily(parent, ())
    m = merged_order(fam_I, empty)
    assert [t for t in m.order] == [("I", 1), ("I", 2), ("I", 3)]
    assert [len(b) for b in m.partition.blocks] == [len(b) for b in associated_partition(fam_I).blocks]
    m2 = merged_order(_fam(parent, [(1, 2)]), _fam(parent, [(4, 5)]))
    assert [len(b) for b in m2.partition.blocks] == [1, 1]
    with pytest.raises(InvalidArgument):
        merged_order(_fam(parent, [(1, 4)]), _fam(parent, [(2, 5)]))


def test_opaque_labels_keep_their_order():
    I = FiniteOrderedSet(("k", ("k", 1), ("k", 2), "z"))
    assert I.interior() == (("k", 1), ("k", 2))
    assert I.sort(["z", "k"]) == ("k", "z")
    assert I.interval(("k", 1), "z").elements == (("k", 1), ("k", 2), "z")


def test_surjection_validation_and_composition():
    with pytest.raises(InvalidArgument):
        OrderedSurjection.from_dict(R(1, 3), R(1, 2), {1: 2, 2: 1, 3: 2})
    with pytest.raises(InvalidArgument):
        OrderedSurjection.from_dict(R(1, 3), R(1, 3), {1: 1, 2: 2, 3: 2})
    a = OrderedSurjection.from_dict(R(1, 4), R(1, 3), {1: 1, 2: 2, 3: 2, 4: 3})
    b = OrderedSurjection.from_dict(R(1, 3), R(1, 2), {1: 1, 2: 1, 3: 2})
    c = OrderedSurjection.from_dict(R(1, 2), R(1, 1), {1: 1, 2: 1})
    assert c.compose(b.compose(a)) == c.compose(b).compose(a)
    assert b.compose(a).table == {1: 1, 2: 1, 3: 1, 4: 2}


@pytest.mark.parametrize("m, n", [(4, 2), (5, 3), (5, 2), (3, 3)])
def test_elementary_factors_recompose(m, n):
    from itertools import combinations

    for cuts in combinations(range(1, m), n - 1):
        table, block = {}, 1
        for x in range(1, m + 1):
            if block - 1 < len(cuts) and x > cuts[block - 1]:
                block += 1
            table[x] = block
        lam = OrderedSurjection.from_dict(R(1, m), R(1, n), table)
        factors = lam.elementary_factors()
        total = factors[-1]
        for f in reversed(factors[:-1]):
            total = f.compose(total)
        assert total.table == lam.table
        for f in factors:
            assert sum(1 for y in f.target if len(f.fiber(y)) > 1) <= 1

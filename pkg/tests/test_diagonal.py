from math import comb

import pytest

from relcx.diagonal import (
    DiagonalEngine,
    check_delta_props,
    check_diag_compat,
    constant_model,
    delta_element,
    diag,
    surjections,
)
from relcx.funcx import FunctionComplexes
from relcx.homalg.complexes import ChainMap
from relcx.ordsets import FiniteOrderedSet, InvalidArgument, OrderedSurjection

R = FiniteOrderedSet.range


@pytest.fixture(scope="module")
def engine(const_variety):
    return DiagonalEngine(constant_model(const_variety, 4, ("s", "t"), ("s", "t", "u")))


def test_surjection_count():
    for m in range(1, 6):
        for n in range(1, m + 1):
            assert len(surjections(m, n)) == comb(m - 1, n - 1)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_diagonal_cycle_properties(engine, k):
    fc = engine.base
    I = fc.interval(tuple(range(1, k + 1)))
    rep = check_delta_props(fc, I)
    assert rep.ok, rep
    assert delta_element(fc, I).is_cocycle(fc)


def test_diagonal_needs_constant_sequence(model4):
    with pytest.raises(InvalidArgument):
        delta_element(FunctionComplexes(model4))


def test_diagonal_cycle_is_nonzero(engine):
    D = delta_element(engine.base, engine.base.interval((1, 2, 3)))
    assert D.vector and all(len(sigma) <= 1 for sigma in D.per_sigma)


def test_identity_surjection_is_identity(engine):
    lam = surjections(3, 3)[0]
    D = diag(engine, lam)
    assert D.same_as(ChainMap.identity(D.src))


def test_diag_is_chain_map_for_small_surjections(engine):
    for m in range(2, 5):
        for n in range(2, min(m, 3) + 1):
            for lam in surjections(m, n):
                assert diag(engine, lam).commutation_witness() is None, lam.table


def test_diag_is_functorial(engine):
    maps = {lam: diag(engine, lam) for m in range(2, 5) for n in range(2, min(m, 3) + 1) for lam in surjections(m, n)}
    checked = 0
    for outer, D_out in maps.items():
        for inner, D_in in maps.items():
            if inner.target == outer.source:
                composite = diag(engine, outer.compose(inner))
                assert composite.same_as(D_in @ D_out), (outer.table, inner.table)
                checked += 1
    assert checked > 0


def test_diag_compatibilities(engine):
    for lam in surjections(4, 3) + surjections(3, 2) + surjections(4, 2):
        for ell in lam.source.interior():
            rep = check_diag_compat(engine, lam, ell)
            assert rep.ok, (lam.table, ell, rep)


def test_compat_rejects_endpoint(engine):
    lam = surjections(3, 2)[0]
    with pytest.raises(InvalidArgument):
        check_diag_compat(engine, lam, 1)


def test_perturbed_diag_fails_chain_map_check(engine):
    lam = OrderedSurjection.from_dict(R(1, 3), R(1, 2), {1: 1, 2: 1, 3: 2})
    D = diag(engine, lam)
    assert D.commutation_witness() is None
    g = next(g for g, v in D.table.items() if v and D.src.d.get(g))
    table = dict(D.table)
    table[g] = {h: -x for h, x in table[g].items()}
    broken = ChainMap(D.src, D.tgt, table, validate=False)
    assert broken.commutation_witness() is not None

import pytest

from conftest import two_base_model
from relcx.funcx import (
    FunctionComplexes,
    Symbol,
    lemma_tot,
    segmentation_hat_equals,
    structure_law_problems,
    symbol_complex,
    symbol_dims,
)
from relcx.geomodel import Variety
from relcx.homalg.complexes import ChainMap, FreeComplex, is_quasi_iso, shift
from relcx.ordsets import InvalidArgument, subsets


def nonzero(C):
    return [(h.degree, h.betti, h.torsion) for h in C.homology_all() if not h.is_zero]


def test_fcal_resolves_closed_set(fc4):
    for I in [fc4.interval((1, 2)), fc4.interval((1, 2, 3)), fc4.interval()]:
        for J in subsets(I.interior()):
            C = fc4.fcal(I, J).complex
            assert is_quasi_iso(fc4.iota(I, J))
            assert C.homology(0).betti == len(fc4.closed_set(I))


@pytest.mark.parametrize("n", [3, 4])
def test_fcal_sigma_acyclic_off_the_full_interior(n):
    fc = FunctionComplexes(two_base_model(n))
    I = fc.interval()
    for Sigma in subsets(I.interior()):
        T = fc.fcal_sigma_total(I, Sigma)
        if Sigma == I.interior():
            assert not T.is_acyclic()
        else:
            assert T.is_acyclic(), Sigma


def test_fcal_total_acyclic_and_length_two_case(fc4):
    assert fc4.fcal_total(fc4.interval()).is_acyclic()
    I = fc4.interval((2, 3))
    assert nonzero(fc4.fcal_total(I)) == nonzero(shift(fc4.fcal(I, ()).complex, -1))


def test_sigma_and_r_are_quasi_isomorphisms(fc4):
    I = fc4.interval()
    for S in subsets(I.interior()):
        for S2 in subsets(I.interior()):
            if set(S) <= set(S2):
                assert is_quasi_iso(fc4.sigma(I, S, S2)), (S, S2)
    for Sigma in subsets(I.interior()):
        free = [k for k in I.interior() if k not in Sigma]
        for J in subsets(free):
            for J2 in subsets(free):
                if set(J) <= set(J2):
                    assert is_quasi_iso(fc4.r_sigma(I, J, J2, Sigma))


def test_structure_laws_hold(fc4):
    assert structure_law_problems(fc4, fc4.interval()) == []
    assert structure_law_problems(fc4, fc4.interval((1, 2, 3))) == []


def test_filtration_by_cut_count(fc4):
    I = fc4.interval()
    assert all(fc4.filtration_ok(I, S) for S in subsets(I.interior()))


def test_sigma_sequences_exact(fc4):
    I = fc4.interval()
    for R in subsets(I.interior()):
        for J in subsets([k for k in I.interior() if k not in R]):
            if J:
                assert fc4.check_sigma_exactness(I, R, J).exact
    with pytest.raises(InvalidArgument):
        fc4.check_sigma_exactness(I, (2,), ())
    with pytest.raises(InvalidArgument):
        fc4.check_sigma_exactness(I, (2,), (2,))


def test_phi_psi_square(fc4):
    I = fc4.interval()
    for K in [(2,), (3,), (2, 3)]:
        rep = fc4.check_prop_phi_psi(I, K)
        assert rep.equal, (K, rep.witness)


def test_segmentations_match_restricted_products(fc4):
    I = fc4.interval()
    for S in subsets(I.interior()):
        if S:
            assert segmentation_hat_equals(fc4, I, S)


def test_index_validation(fc4):
    with pytest.raises(InvalidArgument):
        fc4.fcal(fc4.interval(), (1,))
    with pytest.raises(InvalidArgument):
        fc4.sigma(fc4.interval(), (2, 3), (2,))


def test_empty_variety_gives_zero_complexes():
    from relcx.geomodel import PointModel
    from relcx.ordsets import FiniteOrderedSet

    vs = {1: Variety("A", (("a", "s"),)), 2: Variety("E", ()), 3: Variety("B", (("b", "s"),))}
    fc = FunctionComplexes(PointModel(("s",), ("s",), vs, [0, 0], FiniteOrderedSet.range(1, 3)))
    assert fc.F().rank() == 0
    assert fc.fcal_total(fc.interval()).rank() == 0


def test_lemma_tot_rejects_non_commuting_cube():
    Z = {S: FreeComplex({"z": 0}, {}) for S in subsets((0, 1))}

    def step(S, k):
        c = 2 if (S, k) == ((), 0) else 1
        return ChainMap(Z[S], Z[tuple(sorted(S + (k,)))], {"z": {"z": c}})

    with pytest.raises(InvalidArgument):
        lemma_tot((0, 1), Z, step)


def test_lemma_tot_of_identity_square_is_acyclic():
    Z = {S: FreeComplex({"z": 0}, {}) for S in subsets((0, 1))}
    tot = lemma_tot((0, 1), Z, lambda S, k: ChainMap(Z[S], Z[tuple(sorted(S + (k,)))], {"z": {"z": 1}}))
    assert tot.is_acyclic()
    assert tot.degree[((0, 1), "z")] == 2


def test_symbol_complexes_are_direct_sums():
    X = Variety("X", (("p", "s"),), dim=1)
    Y = Variety("Y", (("q", "s"), ("r", "s")), dim=2)
    assert symbol_dims([(X, 0), (Y, 1), (X, 0)]) == [2 - 1 + 0, 1 - 0 + 1]
    bundle = symbol_complex(("s",), ("s",), [Symbol.of((X, 0), (Y, 1)), Symbol.of((X, 0))])
    assert len(bundle.components) == 2
    total = bundle.F()
    assert total.rank() == sum(fc.F(None, ()).rank() for _, fc in bundle.components)
    with pytest.raises(InvalidArgument):
        symbol_complex(("s",), ("s",), [Symbol.of((X, 0))])

import pytest

from relcx.cli import load_scenario
from relcx.geomodel import (
    FiberingSequence,
    ModelError,
    PointMap,
    PointModel,
    TableModel,
    Variety,
    interval_key,
    parse_key,
    pullback,
    pushforward,
)
from relcx.homalg.complexes import FreeComplex
from relcx.ordsets import FiniteOrderedSet, InvalidArgument


def test_point_model_validation():
    good = Variety("X", (("a", "s"),), (("b", "u"),))
    PointModel(("s",), ("s", "u"), {1: good, 2: good}, [0])
    with pytest.raises(ModelError) as err:
        PointModel(("s",), ("s", "u"), {1: Variety("Y", (("a", "u"),)), 2: good}, [0])
    assert "outside S" in str(err.value)
    with pytest.raises(ModelError):
        PointModel(("s",), ("s", "u"), {1: Variety("Y", (("a", "s"),), (("b", "s"),)), 2: good}, [0])
    with pytest.raises(ModelError):
        PointModel(("s",), ("s", "u"), {1: good, 2: good}, [0, 0])


def test_empty_variety_is_allowed():
    empty = Variety("E", ())
    m = PointModel(("s",), ("s",), {1: empty, 2: Variety("X", (("a", "s"),))}, [0])
    assert m.fiber_product(m.order) == []


def test_fiber_product_and_agreement(model4):
    I = FiniteOrderedSet((1, 2))
    fp = model4.fiber_product(I)
    assert sorted(fp) == [("a", "c"), ("b", "d")]
    J = FiniteOrderedSet((1, 3))
    assert sorted(model4.fiber_product(J)) == [("a", "e"), ("a", "f")]
    assert len(model4.product_space(I, bar=(1,))) == 3 * 2


def test_restrict_and_dims():
    v = Variety("X", (("a", "s"),), dim=2)
    m = PointModel(("s",), ("s",), {1: v, 2: v, 3: v, 4: v}, [5, 6, 7])
    assert m.a_I(FiniteOrderedSet((1, 2))) == 5
    # gluing at an interior index subtracts its dimension
    assert m.a_I(m.order) == 5 + 6 + 7 - 2 - 2
    r = m.restrict([1, 3, 4])
    assert r.dims_a == (5 + 6 - 2, 7)


def test_push_pull_on_points():
    f = PointMap.from_dict(("x1", "x2", "x3"), ("y1", "y2"), {"x1": "y1", "x2": "y1", "x3": "y2"})
    push = pushforward(f)
    pull = pullback(f)
    assert pull.table == {"y1": {"x1": 1, "x2": 1}, "y2": {"x3": 1}}
    composite = push @ pull
    assert composite.table == {"y1": {"y1": 2}, "y2": {"y2": 1}}
    with pytest.raises(InvalidArgument):
        pushforward(PointMap.from_dict(("x",), ("y",), {"x": "y"}, projective=False))
    with pytest.raises(InvalidArgument):
        pullback(PointMap.from_dict(("x",), ("y",), {"x": "y"}, smooth=False))


def test_point_map_composition():
    f = PointMap.from_dict((1, 2), ("a",), {1: "a", 2: "a"})
    g = PointMap.from_dict(("a",), ("z",), {"a": "z"}, smooth=False)
    h = g.compose(f)
    assert h(1) == "z" and not h.smooth and h.projective


def fibering():
    spaces = [("p", "q"), ("r", "s", "t"), ("u",)]
    right = [{"p": 0, "q": 1}, {"r": "*", "s": "*", "t": "*"}]
    left = [{"r": 0, "s": 1, "t": 1}, {"u": "*"}]
    return FiberingSequence(spaces, right, left)


def test_fibering_sequence_spaces():
    seq = fibering()
    assert seq.fiber_space(1, 2) == [("p", "r"), ("q", "s"), ("q", "t")]
    assert len(seq.fiber_space(1, 3)) == 3
    proj = seq.projection(1, 3, (2, 3))
    assert proj(("q", "t", "u")) == ("t", "u")
    assert seq.glue([(1, 1), (2, 3)], [("q",), ("s", "u")]) == ("q", "s", "u")
    assert seq.glue([(1, 1), (2, 3)], [("p",), ("s", "u")]) is None
    with pytest.raises(InvalidArgument):
        seq.fiber_space(2, 4)
    with pytest.raises(InvalidArgument):
        FiberingSequence([("p",), ("r",)], [{"p": 0}], [])


def test_interval_keys_round_trip():
    for lo, hi in [(1, 1), (2, 5)]:
        assert parse_key(interval_key(lo, hi)) == (lo, hi)


def test_table_sample_loads_and_has_strict_restriction():
    sc = load_scenario("examples/table_sample.json")
    model = sc.model
    assert isinstance(model, TableModel)
    sub, full = model.restricted_tensor(["1", "2"])
    assert len(sub.degree) < len(full.degree)
    assert model.product("1-2", "3", "ab", "f") == {"abf": 1}
    with pytest.raises(InvalidArgument):
        model.product("1", "2", "a", "e")


def test_table_model_rejects_unclosed_properness():
    Z = lambda *gens: FreeComplex({g: 0 for g in gens}, {})
    two = FreeComplex({"e": -1, "c": 0}, {"e": {"c": 1}})
    proper = {frozenset({("1", "a"), ("2", "e")})}
    with pytest.raises(ModelError) as err:
        TableModel(2, {"1": Z("a"), "2": two, "1-2": Z("z")}, {}, {}, proper)
    assert "closed under boundary" in str(err.value)


def test_table_model_rejects_nonassociative_products():
    Z = lambda *gens: FreeComplex({g: 0 for g in gens}, {})
    spaces = {"1": Z("a"), "2": Z("b"), "3": Z("c"), "1-2": Z("ab"), "2-3": Z("bc"), "1-3": Z("abc")}
    pairs = [("1", "a", "2", "b"), ("2", "b", "3", "c"), ("1-2", "ab", "3", "c"), ("1", "a", "2-3", "bc")]
    proper = {frozenset({(k1, g1), (k2, g2)}) for k1, g1, k2, g2 in pairs}
    proper.add(frozenset({("1", "a"), ("2", "b"), ("3", "c")}))
    products = {
        ("1", "2"): {("a", "b"): {"ab": 1}},
        ("2", "3"): {("b", "c"): {"bc": 1}},
        ("1-2", "3"): {("ab", "c"): {"abc": 1}},
        ("1", "2-3"): {("a", "bc"): {"abc": 2}},
    }
    with pytest.raises(ModelError) as err:
        TableModel(3, spaces, {}, products, proper)
    assert "not associative" in str(err.value)
    products[("1", "2-3")] = {("a", "bc"): {"abc": 1}}
    TableModel(3, spaces, {}, products, proper)

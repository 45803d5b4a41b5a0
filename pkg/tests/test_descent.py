import random
from pathlib import Path

import pytest

from hyperdescent.descent import (
    PresheafError,
    MissingValue,
    SetPresheaf,
    check_hypersheaf,
    check_sheaf,
    check_sheaf_on_basis,
    compare_cover_limits,
    compare_to_limit,
    constant_presheaf,
    enumerate_presheaves,
    hypercover_suite,
    limit_over_hypercover,
    limit_over_poset,
    maps_presheaf,
    random_presheaf,
    right_kan_extend,
    roundtrip_theorem_check,
    unit_comparison,
)
from hyperdescent.formats import load_presheaf, load_space
from hyperdescent.hypercover import cech_from_cover, refine_to_basis, trivial_hypercover
from hyperdescent.simplicial import TruncationError
from hyperdescent.topology import Basis, covers_of, minimal_basis, pseudocircle, sierpinski

from oracles import brute_hypercover_limit, brute_poset_limit

DATA = Path(__file__).resolve().parent.parent / "data"


def nonempty(space):
    return [U for U in space.opens if U]


def test_maps_presheaf_values():
    X = pseudocircle()
    F = maps_presheaf(X, nonempty(X))
    assert F.size(X.full) == 16
    assert F.size(X.mask("a")) == 2
    assert F.check_functorial() is None
    assert F.values[X.mask("ab")] == ("00", "01", "10", "11")


def test_composed_restrictions():
    X = pseudocircle()
    F = maps_presheaf(X, nonempty(X))
    res = F.res(X.full, X.mask("a"))
    assert [F.values[X.mask("a")][y] for y in res] == [F.values[X.full][x][0] for x in range(16)]


def test_missing_and_malformed():
    X = sierpinski()
    with pytest.raises(PresheafError):
        SetPresheaf(X, {X.full: ["x"], X.mask("p"): ["y"]}, {})
    with pytest.raises(PresheafError):
        SetPresheaf(X, {X.full: ["x"], X.mask("p"): ["y"]}, {(X.full, X.mask("p")): [3]})
    F = constant_presheaf(X, [X.full], ["x"])
    with pytest.raises(MissingValue):
        F.size(X.mask("p"))


def test_dict_roundtrip():
    X = pseudocircle()
    F = maps_presheaf(X, minimal_basis(X).members)
    again = SetPresheaf.from_dict(F.to_dict(), X)
    assert again.key() == F.key()


def test_with_restriction_can_break_functoriality():
    X = pseudocircle()
    F = maps_presheaf(X, nonempty(X))
    ab, a = X.mask("ab"), X.mask("a")
    G = F.with_restriction(ab, a, [0, 0, 0, 0])
    assert G.res(ab, a) == (0, 0, 0, 0)
    # composites through ab pick up the change
    assert G.res(X.full, a) == (0,) * 16


def random_presheaves(space, index, count, seed, cap=2):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        F = random_presheaf(space, index, cap, rng)
        if F is not None:
            out.append(F)
    return out


def test_poset_limit_matches_brute_force():
    X = pseudocircle()
    for F in random_presheaves(X, nonempty(X), 25, seed=1):
        for family in ([X.mask("a"), X.mask("b")], nonempty(X), [X.mask("abc"), X.mask("abd"), X.mask("ab")]):
            assert set(limit_over_poset(F, family).families) == brute_poset_limit(F, family)


def test_hypercover_limit_matches_brute_force():
    X = pseudocircle()
    B = minimal_basis(X)
    covers = [
        cech_from_cover(X, [X.mask("abc"), X.mask("abd")], 3),
        cech_from_cover(X, [X.mask("a"), X.mask("b")], 3, target=X.mask("ab")),
        trivial_hypercover(X, X.full, 3),
        refine_to_basis(cech_from_cover(X, [X.mask("abc"), X.mask("abd")], 2), B, 2),
    ]
    for F in random_presheaves(X, X.opens, 8, seed=2):
        for H in covers:
            lim = limit_over_hypercover(F, H)
            assert set(lim.families) == brute_hypercover_limit(F, H)


def test_hypercover_limit_needs_edges():
    X = sierpinski()
    F = constant_presheaf(X, [X.full], ["x"])
    with pytest.raises(TruncationError):
        limit_over_hypercover(F, trivial_hypercover(X, X.full, 0))


def test_compare_to_limit_witnesses():
    X = pseudocircle()
    F = constant_presheaf(X, nonempty(X), ["x", "y"])
    lim = limit_over_poset(F, [X.mask("a"), X.mask("b")])
    cmp = compare_to_limit(F, X.mask("ab"), lim)
    # two points, two values each: four families but only two elements
    assert not cmp.ok and cmp.witness["kind"] == "not-surjective"
    one = constant_presheaf(X, nonempty(X), ["x"])
    lim = limit_over_poset(one, [X.mask("a")])
    assert compare_to_limit(one, X.mask("a"), lim).ok


def test_maps_presheaf_is_a_sheaf():
    X = pseudocircle()
    G = maps_presheaf(X, X.opens)
    assert check_sheaf(G) == (True, None)


def test_constant_presheaf_not_a_sheaf():
    X = pseudocircle()
    ok, w = check_sheaf(constant_presheaf(X, X.opens, ["x", "y"]))
    assert not ok


def test_sheaf_restricts_to_sheaf_on_stable_basis():
    X = pseudocircle()
    members = [X.mask(s) for s in ("a", "b", "ab", "abc", "abd", "abcd")]
    B = Basis.of(X, members)
    for G in enumerate_presheaves(X, X.opens, 2, accept=None):
        if check_sheaf(G)[0]:
            assert check_sheaf_on_basis(G.restrict_to(members), B)[0]


def test_cover_limit_reduction():
    X = pseudocircle()
    for F in random_presheaves(X, X.opens, 15, seed=3):
        for U in nonempty(X):
            for cover in covers_of(nonempty(X), U):
                assert compare_cover_limits(F, list(cover)).ok


def test_extension_of_maps_is_sheaf():
    X = pseudocircle()
    B = minimal_basis(X)
    F = maps_presheaf(X, B.members)
    ext = right_kan_extend(F)
    assert ext.presheaf.size(X.full) == 16
    assert ext.presheaf.size(0) == 1
    assert check_sheaf(ext.presheaf)[0]
    assert unit_comparison(F, ext, B.members) == (True, None)


def test_suite_sizes():
    X = pseudocircle()
    assert len(hypercover_suite(minimal_basis(X))) == 14
    whole = hypercover_suite(Basis.all_opens(X), allow_empty=True)
    assert len(whole) == 74 and whole.check_empty


def test_suite_members_are_hypercovers():
    from hyperdescent.hypercover import check_hypercover

    X = pseudocircle()
    suite = hypercover_suite(minimal_basis(X))
    B = set(minimal_basis(X).members)
    for target, items in suite.items.items():
        for item in items:
            assert item.hypercover.target == target
            assert item.hypercover.opens_used() <= B
            assert check_hypercover(item.hypercover, 1)[0]


def test_every_minimal_basis_presheaf_is_hypersheaf():
    X = pseudocircle()
    B = minimal_basis(X)
    suite = hypercover_suite(B)
    for F in random_presheaves(X, B.members, 30, seed=4):
        assert check_hypersheaf(F, suite)[0]


def test_broken_restriction_rejected():
    X, _ = load_space(DATA / "pseudocircle.json")
    F = load_presheaf(DATA / "broken_restriction.json", X)
    suite = hypercover_suite(Basis.of(X, nonempty(X)))
    ok, w = check_hypersheaf(F, suite)
    assert not ok
    assert w["open"] == "{a,b}"
    assert w["kind"] == "not-injective"


def test_empty_open_needs_a_point():
    X = sierpinski()
    suite = hypercover_suite(Basis.all_opens(X), allow_empty=True)
    G = maps_presheaf(X, X.opens)
    assert check_hypersheaf(G, suite)[0]
    two = constant_presheaf(X, X.opens, ["x", "y"])
    ok, w = check_hypersheaf(two, suite)
    assert not ok and w["hypercover"] == "empty"


def test_hypersheaf_and_sheaf_filters_agree_on_sierpinski():
    X = sierpinski()
    suite = hypercover_suite(Basis.all_opens(X), allow_empty=True)
    for G in enumerate_presheaves(X, X.opens, 2):
        assert check_hypersheaf(G, suite)[0] == check_sheaf(G)[0]


@pytest.mark.parametrize("condition", ["sheaf", "hypersheaf"])
def test_sierpinski_roundtrip(condition):
    X = sierpinski()
    report = roundtrip_theorem_check(X, Basis.all_opens(X), cap=2, condition=condition)
    assert report.ok
    assert report.basis_accepted == report.space_accepted == 11


def test_sampled_roundtrip_is_seeded():
    X = pseudocircle()
    B = minimal_basis(X)
    a = roundtrip_theorem_check(X, B, cap=1, samples=10, seed=5).to_dict()
    b = roundtrip_theorem_check(X, B, cap=1, samples=10, seed=5).to_dict()
    assert a == b and a["ok"]


def test_supplied_non_hypersheaf_is_a_failure():
    X = pseudocircle()
    B = Basis.of(X, nonempty(X))
    bad = constant_presheaf(X, B.members, ["x", "y"])
    report = roundtrip_theorem_check(X, B, cap=0, supplied=[bad])
    assert not report.ok
    assert report.failures[0]["check"] == "supplied-not-hypersheaf"
    with pytest.raises(PresheafError):
        roundtrip_theorem_check(X, B, cap=0, supplied=[constant_presheaf(X, X.opens, ["x"])])

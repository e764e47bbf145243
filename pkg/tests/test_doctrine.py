import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqcompletion.doctrine import (Doctrine2Cell, DoctrineArrow, boxtimes, check_doctrine, check_elementary,
                                   check_one_arrow, check_two_arrow, enumerate_one_arrows, enumerate_two_cells,
                                   exists_along_diagonal, exists_along_e, identity_arrow)
from eqcompletion.examples import (blur, finset_sub, finset_weaksub, functions, nonfull_chain, terminal,
                                   two_chain)
from eqcompletion.fincat import FunctorData

import oracles

FS3 = finset_sub(3)
FS4 = finset_sub(4)
FUNS4 = functions(FS4.base)


@pytest.mark.parametrize("make", [terminal, two_chain, nonfull_chain, blur, lambda: finset_sub(2),
                                  lambda: finset_weaksub(2), lambda: FS4])
def test_fixtures_are_elementary(make):
    P = make()
    rep = check_doctrine(P)
    assert rep.ok, rep.to_text()
    rep = check_elementary(P)
    assert rep.ok, rep.to_text()
    assert rep.status_of("adjunction.diagonal") in ("pass", None)


@given(st.sampled_from(FS4.base.arrows), st.data())
@settings(max_examples=120, deadline=None)
def test_subset_reindexing_is_preimage(f, data):
    img = tuple(FUNS4[f])
    c = len(FS4.fibers[FS4.base.cod[f]].elements).bit_length() - 1
    mask = data.draw(st.integers(0, (1 << c) - 1))
    got = oracles.subset_of(int(FS4.rx(f)[mask]))
    assert got == oracles.preimage(img, oracles.subset_of(mask))


def test_equality_is_the_diagonal():
    for a in ("0", "1", "2"):
        n = int(a)
        assert FS4.delta[a] == oracles.label(oracles.diagonal_subset(n), n * n)


@given(st.sampled_from(["1", "2"]), st.data())
@settings(max_examples=20, deadline=None)
def test_exists_along_diagonal_is_image(a, data):
    n = int(a)
    sub = data.draw(st.frozensets(st.integers(0, n - 1)))
    got = exists_along_diagonal(FS4, a, oracles.label(sub, n))
    assert got == oracles.label(frozenset(i * n + i for i in sub), n * n)


def test_exists_along_e_is_image():
    # X = 1, A = 2: alpha on 1 x 2 = 2, image under <pr1, pr2, pr2> into 1 x 2 x 2 = 4
    e_img = tuple(FUNS4[FS4.base.tuple_map([1, 2, 2], ["1", "2"])])
    for mask in range(4):
        sub = oracles.subset_of(mask)
        got = exists_along_e(FS4, "1", "2", oracles.label(sub, 2))
        assert got == oracles.label(oracles.image(e_img, sub), 4)


def test_boxtimes_of_singletons():
    # {0} on 1 x 2 and {1} on 2 x 1 land in (1 x 2) x (2 x 1) = 4
    out = boxtimes(FS4, "s10", ("1", "2"), "s01", ("2", "1"))
    assert out == "s0010"


def test_reindex_mutant_fails_homomorphism():
    bad = FS3.with_changes(reindex={"2to2_10": [0, 2, 1, 1]})
    rep = check_doctrine(bad)
    assert rep.status_of("reindex.homomorphism") == "fail"
    assert rep.find("reindex.homomorphism")[0].witness["arrow"] == "2to2_10"


def test_non_functorial_reindex_fails():
    # a meet-preserving map that is not the preimage along the swap
    bad = FS3.with_changes(reindex={"2to2_10": [0, 1, 2, 3]})
    rep = check_doctrine(bad)
    assert rep.status_of("functor.composition") == "fail"


def test_wrong_equality_fails_adjunction():
    bad = FS3.with_changes(delta={"1": "s1"})  # 1 x 1 = 1, delta must be the top
    assert check_elementary(bad).ok
    bad = finset_sub(4).with_changes(delta={"2": "s1111"})
    rep = check_elementary(bad)
    assert rep.status_of("adjunction.diagonal") == "fail"


def test_weak_subobjects_are_elementary_with_comprehensive_base():
    W = finset_weaksub(2)
    assert check_elementary(W).ok
    for o in W.base.objects:
        assert len(W.fibers[o]) == 1 << int(o)


# -- 1-arrows and 2-arrows --------------------------------------------------------

def test_identity_arrow_checks():
    for P in (two_chain(), FS3, blur()):
        assert check_one_arrow(P, P, identity_arrow(P)).ok


def test_enumeration_matches_monotone_meet_maps():
    P = two_chain()
    arrows, exhaustive = enumerate_one_arrows(P, P)
    assert exhaustive
    # oracle: maps 2 -> 2 preserving order and binary meets
    el = [0, 1]
    count = sum(1 for m in itertools.product(el, repeat=2)
                if m[0] <= m[1] and all(m[min(a, b)] == min(m[a], m[b]) for a in el for b in el))
    assert len(arrows) == count == 3
    assert all(check_one_arrow(P, P, a).ok for a in arrows)


def test_bad_component_breaks_equality_preservation():
    P = finset_sub(2)
    ident = identity_arrow(P)
    b = dict(ident.b)
    # send everything on 1 x 1 = 1 to the top and keep the rest: a homomorphism, not natural
    b["1"] = np.array([1, 1])
    rep = check_one_arrow(P, P, DoctrineArrow(ident.F, b))
    assert not rep.ok
    assert rep.failures()[0].witness


def test_two_cells_between_identities():
    P = two_chain()
    ident = identity_arrow(P)
    cells = enumerate_two_cells(P, P, ident, ident)
    assert [c.theta for c in cells] == [{"0": "0<=0", "1": "1<=1"}]
    assert check_two_arrow(P, P, ident, ident, cells[0]).ok


def test_two_cell_along_order():
    P = two_chain()
    low = FunctorData({"0": "0", "1": "0"}, {"0<=0": "0<=0", "0<=1": "0<=0", "1<=1": "0<=0"})
    arrow_low = DoctrineArrow(low, {"0": np.array([0]), "1": np.array([0])})
    ident = identity_arrow(P)
    up = Doctrine2Cell({"0": "0<=0", "1": "0<=1"})
    assert check_two_arrow(P, P, arrow_low, ident, up).ok
    # no arrow 1 -> 0, so no 2-cell the other way
    assert enumerate_two_cells(P, P, ident, arrow_low) == []
    bad = Doctrine2Cell({"0": "0<=0", "1": "1<=1"})
    assert check_two_arrow(P, P, arrow_low, ident, bad).status_of("components.typed") == "fail"

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqcompletion.examples import blur_window, finset_window, functions, poset_window
from eqcompletion.fincat import (FunctorData, ProductUndefined, WindowError, check_category, check_essentially_surjective,
                                 check_full_faithful, check_functor, identity_functor)
from eqcompletion.infsl import InfSemilattice

import oracles

FS3 = finset_window(3)
ORACLE3 = oracles.finset_arrows(3)


def test_finset_window_matches_enumeration():
    # sum over m, c <= 3 of c**m, with 0**0 = 1
    assert len(FS3.arrows) == len(ORACLE3) == 1 + 4 + 15 + 40
    funs = functions(FS3)
    for a, (m, c, img) in ORACLE3.items():
        assert FS3.dom[a] == str(m) and FS3.cod[a] == str(c)
        assert tuple(funs[a]) == img


def test_finset_products_are_row_major():
    # in-window products only: a * b <= 3
    assert set(FS3.products) == {(a, b) for a in "0123" for b in "0123" if int(a) * int(b) <= 3}
    cell = FS3.product("1", "3")
    assert cell.apex == "3"
    with pytest.raises(ProductUndefined):
        FS3.product("2", "2")
    assert FS3.square("2") is None and FS3.square("1") == "1"


arrow_names = st.sampled_from(sorted(ORACLE3))


@given(arrow_names, st.data())
@settings(max_examples=150, deadline=None)
def test_composition_agrees_with_oracle(f, data):
    cod = FS3.cod[f]
    gs = FS3.hom(cod, data.draw(st.sampled_from("0123")))
    if not gs:
        return
    g = data.draw(st.sampled_from(gs))
    h = FS3.compose(g, f)
    assert ORACLE3[h][2] == oracles.compose(ORACLE3[g][2], ORACLE3[f][2])


def test_pairing_and_tuple_maps():
    C = finset_window(4)
    a, b = "2to2_01", "2to2_00"
    p = C.pair(a, b)
    cell = C.product("2", "2")
    assert C.compose(cell.pr1, p) == a and C.compose(cell.pr2, p) == b
    # <pr1, pr2, pr2> : 1 x 2 -> 1 x 2 x 2
    e = C.tuple_map([1, 2, 2], ["1", "2"])
    assert (C.dom[e], C.cod[e]) == ("2", "4")
    assert functions(C)[e] == [0, 3]
    with pytest.raises(ProductUndefined):
        C.tuple_map([1, 2, 2], ["2", "2"])
    with pytest.raises(WindowError):
        C.pair("1to2_0", "2to2_00")


def test_category_laws_pass_on_fixtures():
    for C in (FS3, blur_window(), poset_window(InfSemilattice.chain(["0", "1", "2"]))):
        rep = check_category(C)
        assert rep.ok, rep.to_text()
        assert rep.status_of("products") in ("pass", None)


def test_broken_composition_is_caught():
    # swap o swap should be the identity
    bad = FS3.replace(comp_overrides={("2to2_10", "2to2_10"): "2to2_10"})
    rep = check_category(bad)
    assert not rep.ok
    assert rep.failures()[0].witness is not None


def test_dangling_ids_are_structural_errors():
    from eqcompletion.fincat import CatWindow
    C = CatWindow(["A"], ["f"], {"f": "A"}, {"f": "B"}, {"A": "id_A"})
    rep = check_category(C)
    assert rep.status_of("structure") == "error"


def test_pullbacks_in_finsets():
    C = finset_window(4)
    # the kernel square of 2 -> 1 is 2 x 2 = 4 with its projections
    sq = C.find_pullbacks("2to1_00", "2to1_00")
    assert sq
    assert all(s.apex == "4" for s in sq)
    # pullback of two distinct points of 2 is empty
    sq = C.find_pullbacks("1to2_0", "1to2_1")
    assert {s.apex for s in sq} == {"0"}


def test_isomorphisms():
    assert FS3.isomorphic(FS3.obj_index["3"], FS3.obj_index["3"]) is not None
    assert FS3.isomorphic(FS3.obj_index["2"], FS3.obj_index["3"]) is None
    swap = FS3.index["2to2_10"]
    assert FS3.arrows[int(FS3.inverses(swap)[0])] == "2to2_10"


def test_functor_checks():
    C = FS3
    ident = identity_functor(C)
    assert check_functor(ident, C, C).ok
    assert check_full_faithful(ident, C, C).ok
    assert check_essentially_surjective(ident, C, C).ok
    # constant at 1 on objects, everything to id_1: a functor, not faithful
    one = FunctorData({o: "1" for o in C.objects}, {a: "1to1_0" for a in C.arrows}, preserves_products=False)
    rep = check_functor(one, C, C)
    assert rep.ok
    assert check_full_faithful(one, C, C).status_of("faithful") == "fail"
    assert check_essentially_surjective(one, C, C).status_of("essentially_surjective") == "fail"
    # swapping one arrow breaks composition
    arr = dict(ident.arr_map)
    arr["2to2_10"] = "2to2_01"
    rep = check_functor(FunctorData(ident.obj_map, arr), C, C)
    assert not rep.ok

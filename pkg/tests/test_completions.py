from collections import Counter

import pytest

from eqcompletion.completions import (CompletionError, check_collapse, collapse_classes, complete_d, complete_gr,
                                      complete_q, complete_x, eqc)
from eqcompletion.doctrine import check_elementary
from eqcompletion.examples import blur, finset_sub, nonfull_chain, posetal, terminal, two_chain
from eqcompletion.infsl import InfSemilattice
from eqcompletion.logic import has_comprehensions, has_full_comprehensions

import oracles
from conftest import eqc_of_fs, gr_of_fs, q_of_fs, x_of_blur


# -- relations: Q ------------------------------------------------------------------

def test_q_objects_and_arrows_match_oracle():
    Q = q_of_fs(4).doctrine
    assert len(Q.base.objects) == len(oracles.quotient_objects(4)) == 4
    assert len(Q.base.arrows) == oracles.quotient_arrows(4) == 25
    assert q_of_fs(4).ok


def test_q_object_counts_by_carrier():
    # only carriers with a square in the window carry relations
    counts = Counter(o.split("~")[0] for o in q_of_fs(4).doctrine.base.objects)
    assert [counts.get(str(k), 0) for k in range(5)] == [1, 1, 2, 0, 0]


def test_q_unit_and_quotients():
    res = q_of_fs(4)
    assert res.unit.F.obj_map == {"0": "0~s", "1": "1~s1", "2": "2~s1001"}
    rep = res.report
    for line in ("J.faithful", "J.full", "cover.projective"):
        assert rep.status_of(line) == "pass", line


def test_q_fiber_is_descent_data():
    Q = q_of_fs(4).doctrine
    # descent data of the total relation on 2: empty or everything
    assert Q.fibers["2~s1111"].elements == ("s00", "s11")
    assert len(Q.fibers["2~s1001"]) == 4


def test_q_on_micro_fixtures():
    for P in (terminal(), two_chain(), nonfull_chain(), blur()):
        assert complete_q(P).ok


# -- comprehensions: Gr --------------------------------------------------------------

def test_gr_counts_match_oracle():
    G = gr_of_fs(4).doctrine
    assert len(G.base.objects) == len(oracles.graph_objects(4)) == 31
    assert len(G.base.arrows) == oracles.graph_arrows(4) == 34373


def test_gr_fibers_are_downsets():
    G = gr_of_fs(4).doctrine
    assert G.fibers["2@s10"].elements == ("s00", "s10")
    assert has_full_comprehensions(G).ok


def test_gr_small():
    res = complete_gr(finset_sub(2))
    assert res.ok
    assert len(res.doctrine.base.arrows) == oracles.graph_arrows(2)
    for line in ("I.full", "I.faithful", "Gr.comprehensions.full", "Gr.identity_comprehensions"):
        assert res.report.status_of(line) == "pass", line


# -- extensional collapse: X ----------------------------------------------------------

def test_blur_classes_match_oracle():
    P = blur()
    X = x_of_blur().doctrine
    for x in P.base.objects:
        for y in P.base.objects:
            want = oracles.collapse_oracle(P, x, y)
            assert want is not None
            got = {frozenset(X.provenance["classes"][a]) for a in X.base.hom(x, y)}
            assert got == {frozenset(c) for c in want}
    assert len(X.base.arrows) == 9
    assert X.base.hom("1", "B") == ["a"]


def test_blur_collapse_report():
    rep = x_of_blur().report
    assert rep.ok
    assert rep.status_of("collapse.well_defined") == "pass"
    assert rep.status_of("classes.related_merged") == "pass"
    assert rep.status_of("X.diagonals.comprehension") == "pass"


def test_collapse_mutant_is_caught():
    P = blur()
    classes, _ = collapse_classes(P)
    C = P.base
    x, y = C.obj_index["1"], C.obj_index["B"]
    merged = classes[(x, y)][0]
    classes[(x, y)] = [[m] for m in merged]  # split a class the identification merges
    from eqcompletion.completions import collapse_with_classes
    XP, _ = collapse_with_classes(P, classes)
    rep = check_collapse(P, XP)
    assert rep.status_of("classes.related_merged") == "fail"


def test_x_keeps_fs_unchanged():
    # subsets of finite sets already have comprehensive diagonals: nothing is merged
    res = complete_x(finset_sub(2))
    assert res.ok
    assert len(res.doctrine.base.arrows) == len(finset_sub(2).base.arrows)


# -- D -----------------------------------------------------------------------------

def test_d_matches_oracle():
    res = complete_d(finset_sub(4))
    assert res.ok
    D = res.doctrine
    assert len(D.base.objects) == len(oracles.d_objects(4)) == 11
    assert len(D.base.arrows) == oracles.d_arrows(4) == 121
    assert res.report.status_of("K.full") == "pass"
    assert has_comprehensions(D).ok


def test_d_fiber_over_injection():
    D = complete_d(finset_sub(4)).doctrine
    obj = next(o for o in D.base.objects if o.startswith("2@s10#1to2_0"))
    assert len(D.fibers[obj]) == 2


def test_d_needs_weak_comprehensions():
    with pytest.raises(CompletionError, match="no weak comprehension for"):
        complete_d(blur())


# -- the full completion ----------------------------------------------------------------

def test_eqc_counts_match_oracle():
    res = eqc_of_fs(4)
    E = res.doctrine
    assert res.ok
    assert len(E.base.objects) == len(oracles.completed_objects(4)) == 8
    assert len(E.base.arrows) == oracles.completed_arrows(4) == 54


def test_eqc_terminal_is_terminal():
    E = eqc(terminal()).doctrine
    assert len(E.base.objects) == 1 and len(E.base.arrows) == 1
    assert [len(L) for L in E.fibers.values()] == [1]


def test_eqc_posetal_is_itself():
    P = posetal(InfSemilattice.chain(["0", "1", "2"]))
    E = eqc(P).doctrine
    assert len(E.base.objects) == 3
    assert sorted(len(E.base.hom(x, y)) for x in E.base.objects for y in E.base.objects) == \
        sorted(len(P.base.hom(x, y)) for x in P.base.objects for y in P.base.objects)


def test_mode_without_gr_matches_top_predicate_part():
    # objects (A, top, rho) of eqc(P) span a copy of XQ(P), hom-set by hom-set
    P = finset_sub(2)
    E = eqc(P).doctrine.base
    xq = eqc(P, with_gr=False).doctrine.base
    top = {o: P.fibers[o].elements[P.fibers[o].top] for o in P.base.objects}

    def lift(o):
        A, rho = o.split("~")
        return f"{A}@{top[A]}~{rho}"

    assert all(lift(o) in E.obj_index for o in xq.objects)
    for x in xq.objects:
        for y in xq.objects:
            assert len(xq.hom(x, y)) == len(E.hom(lift(x), lift(y)))


def test_every_result_is_elementary():
    for res in (q_of_fs(4), x_of_blur(), complete_d(finset_sub(2)), eqc(two_chain())):
        assert check_elementary(res.doctrine).ok

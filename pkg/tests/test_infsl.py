import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqcompletion.infsl import (InfSemilattice, InfSLHom, LatticeError, check_hom, check_infsl, enumerate_homs,
                                meet, sub_infsl, subset_label)

import oracles


def closure_family(masks, n):
    """Intersection-closed family of subsets of range(n), always containing the full set."""
    fam = {(1 << n) - 1} | set(masks)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(fam), 2):
            if a & b not in fam:
                fam.add(a & b)
                changed = True
    return sorted(fam)


def lattice_of(fam, n):
    labels = [subset_label(m, n) for m in fam]
    leq = np.array([[a & ~b == 0 for b in fam] for a in fam])
    return InfSemilattice(labels, leq)


families = st.integers(1, 3).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=5)))


def test_powerset_meets_are_intersections():
    L = InfSemilattice.powerset(3)
    assert check_infsl(L).ok
    for a in range(8):
        for b in range(8):
            assert L.meet_table[a, b] == a & b
    assert L.elements[L.top] == "s111"


def test_chain_and_named_meet():
    L = InfSemilattice.chain(["lo", "mid", "hi"])
    assert meet(L, "mid", "hi") == "mid"
    assert L.elements[L.top] == "hi"
    with pytest.raises(LatticeError):
        meet(L, "mid", "nowhere")


def test_missing_meet_is_reported():
    # two incomparable minimal elements under a top: no glb
    L = InfSemilattice(["a", "b", "t"], [("a", "t"), ("b", "t")])
    rep = check_infsl(L)
    assert rep.status_of("meets") == "fail"
    assert sorted(rep.find("meets")[0].witness) == ["a", "b"]


def test_cycle_breaks_antisymmetry():
    L = InfSemilattice(["a", "b"], [("a", "b"), ("b", "a")])
    assert check_infsl(L).status_of("antisymmetric") == "fail"


@given(families)
@settings(max_examples=60, deadline=None)
def test_intersection_families_are_semilattices(data):
    n, masks = data
    fam = closure_family(masks, n)
    L = lattice_of(fam, n)
    assert check_infsl(L).ok
    for i, a in enumerate(fam):
        for j, b in enumerate(fam):
            assert fam[L.meet_table[i, j]] == a & b


@given(families, families)
@settings(max_examples=30, deadline=None)
def test_enumerate_homs_matches_brute_force(d1, d2):
    fa, fb = closure_family(d1[1], d1[0]), closure_family(d2[1], d2[0])
    if len(fa) ** len(fb) > 4000 or len(fb) ** len(fa) > 4000:
        return
    S, T = lattice_of(fa, d1[0]), lattice_of(fb, d2[0])
    got = {tuple(m.tolist()) for m in enumerate_homs(S, T)}
    src = list(range(len(S)))
    want = set()
    for m in itertools.product(range(len(T)), repeat=len(S)):
        mp = dict(zip(src, m))
        if oracles.meet_preserving(src, lambda a, b: bool(S.leq[a, b]), range(len(T)), lambda a, b: bool(T.leq[a, b]), mp):
            want.add(m)
    assert got == want
    for m in got:
        assert check_hom(InfSLHom(S, T, m)).ok


def test_hom_violations_carry_witnesses():
    L = InfSemilattice.powerset(2)
    chain = InfSemilattice.chain(["0", "1"])
    # "some element present": preserves top, fails meets (s10 ^ s01 = s00)
    some = InfSLHom(L, chain, [0, 1, 1, 1])
    rep = check_hom(some)
    assert rep.status_of("homomorphism.meets") == "fail"
    bad_top = InfSLHom(L, chain, [0, 0, 0, 0])
    assert check_hom(bad_top).status_of("homomorphism.top") == "fail"
    everything = InfSLHom(L, chain, [0, 0, 0, 1])
    assert check_hom(everything).ok
    assert not everything.is_iso()
    assert InfSLHom(L, L, [0, 1, 2, 3]).is_iso()


def test_sub_infsl_requires_meet_closure():
    L = InfSemilattice.powerset(2)
    up = sub_infsl(L, [False, True, False, True])
    assert up.elements == ("s10", "s11")
    assert check_infsl(up).ok
    with pytest.raises(LatticeError):
        sub_infsl(L, [False, True, True, True])
    down = sub_infsl(L, [True, True, False, False], top=1)
    assert down.elements[down.top] == "s10"

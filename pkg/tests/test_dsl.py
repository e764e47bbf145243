from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqcompletion.cli.dsl import DSLError, from_json, load_doctrine, loads, parse, to_json, tokenize
from eqcompletion.cli.export import export_dot, export_dsl, export_json
from eqcompletion.doctrine import check_elementary
from eqcompletion.examples import blur, finset_sub, finset_weaksub, nonfull_chain, posetal, terminal, two_chain
from eqcompletion.infsl import InfSemilattice

from conftest import q_of_fs, x_of_blur

GOLDEN = Path(__file__).parent / "golden"

FIXTURES = {
    "terminal": terminal,
    "chain2": two_chain,
    "nonfull": nonfull_chain,
    "blur": blur,
    "finset-sub-2": lambda: finset_sub(2),
    "finset-weaksub-2": lambda: finset_weaksub(2),
    "posetal-3": lambda: posetal(InfSemilattice.chain(["0", "1", "2"])),
}


def same_doctrine(P, Q):
    """Equal up to the names of identities, which the text format spells id_A."""
    A, B = P.base, Q.base
    ren = {A.identity[o]: B.identity[o] for o in A.objects}
    n = lambda a: ren.get(a, a)
    assert list(A.objects) == list(B.objects)
    assert sorted(map(n, A.arrows)) == sorted(B.arrows)
    assert {(n(g), n(f)): n(h) for (g, f), h in A.comp_dict().items()} == B.comp_dict()
    assert {k: (c.apex, n(c.pr1), n(c.pr2)) for k, c in A.products.items()} == \
        {k: (c.apex, c.pr1, c.pr2) for k, c in B.products.items()}
    for o in A.objects:
        assert P.fibers[o].elements == Q.fibers[o].elements
        assert (P.fibers[o].leq == Q.fibers[o].leq).all()
    for i, a in enumerate(A.arrows):
        assert np.array_equal(P.R[i], Q.R[B.index[n(a)]])
    assert dict(P.delta) == dict(Q.delta)


# -- parsing -----------------------------------------------------------------------------

def test_tokens_carry_positions():
    toks = tokenize('object A;\n  arrow "f g" : A -> A;')
    assert [(t.text, t.pos) for t in toks[:3]] == [("object", (1, 1)), ("A", (1, 8)), (";", (1, 9))]
    assert toks[4].text == "f g" and toks[4].pos == (2, 9)


@pytest.mark.parametrize("text, where, msg", [
    ("object A;\nobject A;", (2, 8), "duplicate object"),
    ("object A;\nfrobnicate A;", (2, 1), "unknown directive"),
    ("object A;\nfiber A { elems x; colour x; }", (2, 20), "unknown fiber statement"),
    ("object A;\narrow f : A -> ;", None, ""),
])
def test_parse_errors_report_positions(text, where, msg):
    with pytest.raises(DSLError) as ei:
        parse(text)
    if where is not None:
        assert ei.value.pos == where
        assert msg in str(ei.value)
    assert ei.value.pos is not None


def test_identities_and_trivial_composites_are_synthesized():
    P = loads("object A; fiber A { elems t; top t; } delta A = t; product A A = A [pr1=id_A, pr2=id_A];")
    assert list(P.base.arrows) == ["id_A"]
    assert check_elementary(P).ok


def test_reference_errors():
    with pytest.raises(DSLError, match="unknown object"):
        loads("object A; arrow f : A -> B;")
    with pytest.raises(DSLError, match="has no fiber"):
        loads("object A;")
    with pytest.raises(DSLError, match="not the greatest element"):
        loads("object A; fiber A { elems x y; top x; order x <= y; }")
    with pytest.raises(DSLError, match="needs the product"):
        loads("object A; fiber A { elems t; top t; } delta A = t;")


def test_missing_composite_is_a_totality_error():
    text = (GOLDEN / "blur_missing_compose.dsl").read_text()
    with pytest.raises(DSLError, match="composition missing for the pair b B!"):
        loads(text)


# -- round trips ----------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_json_round_trip(name):
    P = FIXTURES[name]()
    back = from_json(export_json(P))
    same_doctrine(P, back)
    assert export_json(back) == export_json(P)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_dsl_round_trip(name):
    P = FIXTURES[name]()
    text = export_dsl(P)
    back = loads(text, name=P.name)
    same_doctrine(P, back)
    assert export_dsl(back) == text


def test_json_round_trip_of_derived_windows():
    for res in (q_of_fs(2), x_of_blur()):
        P = res.doctrine
        back = from_json(export_json(P))
        same_doctrine(P, back)
        assert to_json(back) == to_json(P)


def test_golden_file_is_bit_stable():
    P = load_doctrine(GOLDEN / "blur.dsl")
    assert export_dsl(P) == (GOLDEN / "blur.dsl").read_text()
    same_doctrine(P, blur())


def test_json_schema_is_checked():
    data = to_json(two_chain())
    data["schema"] = 99
    with pytest.raises(DSLError, match="unsupported schema"):
        from_json(data)
    with pytest.raises(DSLError, match="invalid JSON"):
        loads("{ not json")


@given(st.integers(1, 4))
@settings(max_examples=4, deadline=None)
def test_chains_survive_both_formats(n):
    P = posetal(InfSemilattice.chain([str(k) for k in range(n)]))
    same_doctrine(P, loads(export_dsl(P), name=P.name))
    same_doctrine(P, from_json(export_json(P)))


def test_dot_export_mentions_every_object():
    P = blur()
    dot = export_dot(P)
    assert dot.startswith("digraph")
    for o in P.base.objects:
        assert o in dot

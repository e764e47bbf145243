import pytest

from eqcompletion.completions import complete_q, complete_x
from eqcompletion.examples import blur, finset_sub, finset_weaksub, nonfull_chain, terminal, two_chain, weaksub_seed
from eqcompletion.verify import (MUTANTS, SuiteConfig, check_laws, check_universal_q, check_universal_x,
                                 doctrine_equivalence, iso_classes, run_mutation_battery, run_suite, unit_mutants)

from conftest import eqc_of_fs, x_of_blur


def test_suite_on_chain_is_clean():
    rep = run_suite(two_chain())
    assert rep.ok, [ln.check for ln in rep.failures()]


def test_suite_is_deterministic():
    assert run_suite(two_chain()).to_json() == run_suite(two_chain()).to_json()


def test_suite_flags_missing_input_properties():
    rep = run_suite(nonfull_chain())
    assert {ln.check for ln in rep.failures()} == {"input.props.comprehensions.full"}
    failing = {ln.check for ln in run_suite(blur()).failures()}
    assert failing and all(c.startswith("input.props.") for c in failing)


def test_suite_without_requirements_passes_blur():
    rep = run_suite(blur(), SuiteConfig(require=()))
    assert rep.ok


def test_laws_on_weak_subobjects():
    assert check_laws(finset_weaksub(2), require=("weak_comprehensions",)).ok


def test_eqc_result_passes_the_suite_laws():
    E = eqc_of_fs(4).doctrine
    rep = check_laws(E, require=("comprehensions", "comprehensive_diagonals", "quotients"))
    assert rep.ok, [ln.check for ln in rep.failures()]


# -- universal properties ----------------------------------------------------------------

def test_universal_q_on_chain():
    rep = check_universal_q(two_chain(), finset_sub(2))
    assert rep.ok, rep.to_text()
    assert check_universal_q(two_chain(), two_chain()).ok


def test_universal_x_on_blur():
    rep = check_universal_x(blur(), x_of_blur().doctrine)
    assert rep.ok, rep.to_text()


def test_unit_mutants_break_universal_q():
    P, Z = two_chain(), finset_sub(2)
    q = complete_q(P)
    muts = unit_mutants(q.unit, q.doctrine)
    assert muts
    for name, u in muts:
        assert not check_universal_q(P, Z, unit=u).ok, name


def test_unit_mutants_break_universal_x():
    P = blur()
    x = complete_x(P)
    muts = unit_mutants(x.unit, x.doctrine)
    assert len(muts) == 6
    for name, u in muts:
        assert not check_universal_x(P, x.doctrine, unit=u).ok, name


# -- equivalence ------------------------------------------------------------------------

def test_subsets_and_weak_subobjects_are_equivalent():
    S, W = finset_sub(2), finset_weaksub(2)
    seeded = doctrine_equivalence(S, W, seeds=[weaksub_seed(S, W)])
    assert seeded.witness is not None and seeded.tried == 1
    found = doctrine_equivalence(S, W)
    assert found.witness is not None


def test_different_profiles_are_not_equivalent():
    res = doctrine_equivalence(two_chain(), nonfull_chain())
    assert res.witness is None and res.exhaustive
    assert res.report.status_of("witness") == "fail"


def test_terminal_is_self_equivalent():
    assert doctrine_equivalence(terminal(), terminal()).witness is not None


def test_iso_classes_of_the_completion():
    classes = iso_classes(eqc_of_fs(4).doctrine)
    assert sorted(map(len, classes)) == [1, 1, 2, 4]
    assert ["1@s0~s0", "2@s00~s0000"] in classes


# -- mutation battery ------------------------------------------------------------------------

def test_battery_has_ten_distinct_faults():
    assert len(MUTANTS) == 10
    assert len({m.fault for m in MUTANTS}) == 10


@pytest.mark.parametrize("mutant", MUTANTS, ids=[m.name for m in MUTANTS])
def test_each_mutant_is_detected(mutant):
    rep = mutant.run()
    hits = [ln for ln in rep.failures() if ln.check.startswith(mutant.expect) and ln.witness is not None]
    assert hits, rep.to_text()


def test_battery_report():
    rep = run_mutation_battery()
    assert rep.ok
    assert rep.counts() == {"pass": 10}

"""One test per acceptance criterion; each records a PASS/FAIL line printed in the run summary."""
import json
import subprocess
import sys
import time
from pathlib import Path

from eqcompletion.cli.dsl import from_json, load_doctrine, loads
from eqcompletion.cli.export import export_dsl, export_json
from eqcompletion.cli.main import main
from eqcompletion.completions import complete_q, complete_x, eqc
from eqcompletion.examples import (blur, finset_sub, finset_weaksub, nonfull_chain, posetal, terminal, two_chain)
from eqcompletion.infsl import InfSemilattice
from eqcompletion.logic import has_comprehensive_diagonals
from eqcompletion.verify import (MUTANTS, check_laws, check_universal_q, check_universal_x, doctrine_equivalence,
                                 run_mutation_battery, unit_mutants)

import oracles
from conftest import CRITERIA


GOLDEN = Path(__file__).parent / "golden"


def record(n, checks: dict, note=""):
    """Store the verdict before asserting so a failing criterion still gets its line."""
    bad = [k for k, v in checks.items() if not v]
    CRITERIA[n] = (not bad, note if not bad else f"{note} failed: {', '.join(bad)}")
    assert not bad, CRITERIA[n][1]


def test_criterion_1_finset_suite_via_cli():
    cli = [sys.executable, "-m", "eqcompletion.cli.main"]
    t0 = time.perf_counter()
    fx = subprocess.run(cli + ["fixture", "finset-sub", "4"], capture_output=True, text=True, check=True)
    vr = subprocess.run(cli + ["verify", "--json"], input=fx.stdout, capture_output=True, text=True)
    dt = time.perf_counter() - t0
    rep = json.loads(vr.stdout)
    fails = [ln for ln in rep["lines"] if ln["status"] in ("fail", "error")]
    counts = rep["counts"]
    record(1, {"exit 0": vr.returncode == 0, "zero failures": not fails, "lines checked": counts.get("pass", 0) > 0,
               "under 60 s": dt < 60},
           f"{counts} in {dt:.1f}s")


def test_criterion_2_quotient_completion_of_finsets():
    t0 = time.perf_counter()
    res = complete_q(finset_sub(4))
    dt = time.perf_counter() - t0
    per_size = [sum(1 for o in res.doctrine.base.objects if o.split("~")[0] == str(k)) for k in range(5)]
    bell = [oracles.bell(k) for k in range(5)]
    rep = res.report
    record(2, {
        "object counts are Bell numbers": per_size == bell,
        "quotients exist": rep.status_of("Q.quotients.exist") == "pass",
        "quotients stable": rep.status_of("Q.quotients.stable") == "pass",
        "quotients effective descent": rep.status_of("Q.quotients.effective_descent") == "pass",
        "relations effective": rep.status_of("Q.relations.effective") == "pass",
        "under 120 s": dt < 120,
    }, f"counts {per_size} vs {bell}, {dt:.1f}s")


def test_criterion_3_unit_and_projective_cover():
    rep = complete_q(finset_sub(4)).report
    record(3, {line: rep.status_of(line) == "pass"
               for line in ("J.full", "J.faithful", "cover.projective", "cover.covered")})


def test_criterion_4_collapse_of_blur():
    P = blur()
    res = complete_x(P)
    X = res.doctrine
    agree = True
    for x in P.base.objects:
        for y in P.base.objects:
            want = {frozenset(c) for c in oracles.collapse_oracle(P, x, y)}
            got = {frozenset(X.provenance["classes"][a]) for a in X.base.hom(x, y)}
            agree &= want == got
    record(4, {
        "merged pairs match the oracle": agree,
        "precheck well defined": res.report.status_of("collapse.well_defined") == "pass",
        "comprehensive diagonals": has_comprehensive_diagonals(X).ok,
    }, f"{len(P.base.arrows)} -> {len(X.base.arrows)} arrows")


def test_criterion_5_completion_of_finsets():
    t0 = time.perf_counter()
    P = finset_sub(4)
    res = eqc(P)
    E = res.doctrine
    laws = check_laws(E, require=("comprehensions", "comprehensive_diagonals", "quotients"))
    eq = doctrine_equivalence(P, E, objects=["0", "1", "2"], seeds=[res.unit])
    dt = time.perf_counter() - t0
    record(5, {
        "comprehensions, quotients, diagonals": laws.ok,
        "equivalence witness": eq.witness is not None,
        "under 180 s": dt < 180,
    }, f"{len(E.base.objects)} objects, {len(E.base.arrows)} arrows, {dt:.1f}s")


def test_criterion_6_universal_properties():
    P, Z = two_chain(), finset_sub(2)
    q = complete_q(P)
    q_ok = check_universal_q(P, Z).ok
    q_mut = [check_universal_q(P, Z, unit=u).ok for _, u in unit_mutants(q.unit, q.doctrine)]
    B = blur()
    x = complete_x(B)
    x_ok = check_universal_x(B, x.doctrine).ok
    x_mut = [check_universal_x(B, x.doctrine, unit=u).ok for _, u in unit_mutants(x.unit, x.doctrine)]
    record(6, {
        "Q chain -> finset_sub(2)": q_ok,
        "X blur -> its collapse": x_ok,
        "j mutants fail": bool(q_mut) and not any(q_mut),
        "k mutants fail": bool(x_mut) and not any(x_mut),
    }, f"{len(q_mut)} j mutants, {len(x_mut)} k mutants")


def test_criterion_7_subsets_versus_weak_subobjects():
    res = doctrine_equivalence(finset_sub(2), finset_weaksub(2))
    record(7, {"witness": res.witness is not None}, f"{res.tried} candidates tried")


def test_criterion_8_mutation_battery():
    rep = run_mutation_battery()
    lines = {ln.check: ln.status for ln in rep.lines}
    record(8, {
        "ten mutants": len(MUTANTS) == 10,
        "each caught with a witness": all(lines.get(f"mutant.{m.name}") == "pass" for m in MUTANTS),
    }, str(rep.counts()))


FIXTURES = [terminal, two_chain, nonfull_chain, blur, lambda: finset_sub(2), lambda: finset_weaksub(2),
            lambda: posetal(InfSemilattice.chain(["0", "1", "2"]))]


def _window_sig(P):
    C = P.base
    return (list(C.objects), list(C.arrows), C.comp_dict(), {k: (v.apex, v.pr1, v.pr2) for k, v in C.products.items()},
            {o: (P.fibers[o].elements, P.fibers[o].leq.tolist()) for o in C.objects},
            [r.tolist() for r in P.R], dict(P.delta))


def test_criterion_9_cli_round_trip(capsys):
    json_ok = all(_window_sig(from_json(export_json(P))) == _window_sig(P) for P in (f() for f in FIXTURES))
    golden = GOLDEN / "blur.dsl"
    text = golden.read_text()
    golden_ok = export_dsl(load_doctrine(golden)) == text
    dsl_ok = all(export_dsl(loads(export_dsl(P), name=P.name)) == export_dsl(P) for P in (f() for f in FIXTURES))
    codes = (main(["check", "chain2", "-q"]),
             main(["check", "nonfull", "-q", "--require", "full_comprehensions"]),
             main(["check", str(GOLDEN / "blur_missing_compose.dsl")]))
    capsys.readouterr()
    record(9, {
        "json round trip identical": json_ok,
        "golden DSL bit-stable": golden_ok,
        "DSL round trip stable": dsl_ok,
        "exit codes 0/1/2": codes == (0, 1, 2),
    }, f"exit codes {codes}")

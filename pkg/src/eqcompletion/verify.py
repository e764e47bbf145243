"""Suite runner, universal-property enumeration and the mutation battery."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .completions import (CompletionError, CompletionResult, check_collapse, collapse_classes,
                          collapse_with_classes, complete_d, complete_gr, complete_q, complete_x, eqc,
                          preserves_quotients)
from .doctrine import (Budget, Doctrine, Doctrine2Cell, DoctrineArrow, check_doctrine, check_elementary,
                       check_one_arrow, check_two_arrow, enumerate_one_arrows, enumerate_two_cells,
                       identity_arrow)
from .fincat import (FunctorData, ProductCell, check_category, check_essentially_surjective,
                     check_full_faithful)
from .infsl import sub_infsl
from .logic import (check_quotient, closure_sweep, descent_mask, find_comprehension, has_comprehensions,
                    has_comprehensive_diagonals, has_full_comprehensions, is_comprehension, quotient_sweep)
from .report import ERROR, FAIL, INFO, PASS, UNSTATEABLE, VACUOUS, Line, Report

PROPERTIES = ("comprehensions", "weak_comprehensions", "full_comprehensions", "comprehensive_diagonals",
              "quotients")

# what each construction guarantees of its output
GUARANTEED = {
    "q": ("quotients",),
    "x": ("comprehensive_diagonals",),
    "gr": ("comprehensions", "full_comprehensions"),
    "d": ("comprehensions",),
    "eqc": ("comprehensions", "quotients", "comprehensive_diagonals"),
}


@dataclass
class SuiteConfig:
    completions: tuple[str, ...] = ("q", "x", "gr", "d", "eqc")
    require: tuple[str, ...] = ("comprehensions", "full_comprehensions", "comprehensive_diagonals", "quotients")
    stability: bool = True


def _property_report(P: Doctrine, name: str, stability: bool) -> Report:
    if name == "comprehensions":
        return has_comprehensions(P, "strong")
    if name == "weak_comprehensions":
        return has_comprehensions(P, "weak")
    if name == "full_comprehensions":
        return has_full_comprehensions(P)
    if name == "comprehensive_diagonals":
        return has_comprehensive_diagonals(P)
    if name == "quotients":
        return quotient_sweep(P, stability=stability)
    raise ValueError(f"unknown property {name!r}")


def _demoted(rep: Report) -> Report:
    """Failures of a property nobody promised become informational."""
    out = Report(rep.title)
    for ln in rep.lines:
        if ln.status == FAIL:
            out.lines.append(Line(ln.check, INFO, f"absent (not required): {ln.detail}".rstrip(": "),
                                  ln.witness, ln.checked))
        else:
            out.lines.append(ln)
    return out


def check_laws(P: Doctrine, require: Iterable[str] = (), stability: bool = True,
               structural: bool = True) -> Report:
    """Axioms, derived facts, closure properties, then the listed properties."""
    rep = Report(f"laws {P.name}")
    if structural:
        d = check_doctrine(P)
        rep.extend(d, "doctrine.")
        if not d.ok:
            return rep
        rep.extend(check_elementary(P), "elementary.")
    rep.extend(closure_sweep(P), "closure.")
    req = set(require)
    for name in PROPERTIES:
        r = _property_report(P, name, stability)
        rep.extend(r if name in req else _demoted(r), "props.")
    return rep


def check_q_fibers(P: Doctrine, res: CompletionResult) -> Report:
    """Fibers of the quotient completion are exactly the descent data of each relation."""
    rep = Report("Q fibers")
    under, rel = res.parts["under"], res.parts["relation"]
    bad = []
    for o in res.doctrine.base.objects:
        want = np.nonzero(descent_mask(P, under[o], rel[o]))[0]
        L = res.doctrine.fibers[o]
        have = np.asarray(L.embed) if getattr(L, "embed", None) is not None else None
        if have is None or not np.array_equal(np.sort(have), want):
            amb = P.fibers[under[o]]
            extra = sorted(set((have if have is not None else np.arange(len(L))).tolist()) ^ set(want.tolist()))
            bad.append({"object": o, "element": amb.elements[extra[0]] if extra else None})
    rep.ok_if("fibers.descent", not bad, "each fiber is the descent data of its relation",
              witness=bad[:3], checked=len(res.doctrine.base.objects))
    return rep


def check_q_comprehension_transport(P: Doctrine, res: CompletionResult) -> Report:
    """Lifts of comprehensions are comprehensions; J of one is iff equality pulls back to equality."""
    rep = Report("Q comprehension transport")
    Q, C = res.doctrine, P.base
    W = Q.base
    under, rel = res.parts["under"], res.parts["relation"]
    bad, n, n_un = [], 0, 0
    for o in W.objects:
        A, r = under[o], rel[o]
        L = Q.fibers[o]
        for k, al in enumerate(L.embed.tolist()):
            for c in find_comprehension(P, A, al):
                X = C.dom[c]
                if C.square(X) is None:
                    n_un += 1
                    continue
                r2 = int(P.rx(C.product_map(c, c))[r])
                src = f"{X}~{P.fibers[C.square(X)].elements[r2]}"
                arr = f"{c}|{src}|{o}"
                if arr not in W.index:
                    n_un += 1
                    continue
                n += 1
                if not is_comprehension(Q, o, k, arr):
                    bad.append({"object": o, "predicate": L.elements[k], "comprehension": c})
    if n:
        rep.ok_if("lift", not bad, "lifted comprehensions are comprehensions", witness=bad[:3], checked=n)
    else:
        rep.add("lift", VACUOUS, "no comprehension to lift")
    if n_un:
        rep.add("lift.unstateable", UNSTATEABLE, checked=n_un)
    unit = res.unit
    bad, n = [], 0
    for A in unit.F.obj_map:
        for al in range(len(P.fibers[A])):
            for c in find_comprehension(P, A, al):
                X = C.dom[c]
                if X not in unit.F.obj_map or c not in unit.F.arr_map:
                    continue
                n += 1
                lhs = is_comprehension(Q, unit.F.obj_map[A], int(unit.b[A][al]), unit.F.arr_map[c])
                rhs = int(P.rx(C.product_map(c, c))[P.delta_idx(A)]) == P.delta_idx(X)
                if lhs != rhs:
                    bad.append({"object": A, "arrow": c, "comprehension": lhs, "equality_pulls_back": rhs})
    if n:
        rep.ok_if("unit_image", not bad, "J c is a comprehension iff P_{c x c}(delta_A) = delta_X",
                  witness=bad[:3], checked=n)
    else:
        rep.add("unit_image", VACUOUS)
    return rep


def _quotient_status(rep: Report) -> dict[str, str | None]:
    return {k: rep.status_of(k) for k in ("quotients.exist", "quotients.descent")}


def check_x_keeps_descent_quotients(P: Doctrine, XP: Doctrine) -> Report:
    rep = Report()
    before, after = quotient_sweep(P), quotient_sweep(XP)
    had = all(s in (PASS, VACUOUS) for s in _quotient_status(before).values())
    if not had:
        rep.add("x.keeps_descent_quotients", VACUOUS, "input lacks descent quotients")
        return rep
    has = all(s in (PASS, VACUOUS) for s in _quotient_status(after).values())
    rep.ok_if("x.keeps_descent_quotients", has, "collapse of a doctrine with descent quotients has them",
              witness=[ln.witness for ln in after.failures()][:2])
    return rep


BUILDERS: dict[str, Callable[..., CompletionResult]] = {
    "q": complete_q, "x": complete_x, "gr": complete_gr, "d": complete_d,
}


def run_suite(P: Doctrine, config: SuiteConfig | None = None) -> Report:
    cfg = config or SuiteConfig()
    rep = Report(f"suite {P.name}")
    laws = check_laws(P, cfg.require, cfg.stability)
    rep.extend(laws, "input.")
    if not laws.ok and laws.status_of("doctrine.base.structure") != PASS:
        return rep
    built: dict[str, CompletionResult] = {}
    for kind in cfg.completions:
        try:
            if kind == "eqc":
                res = eqc(P, strict=False, gr=built.get("gr"))
            else:
                res = BUILDERS[kind](P, strict=False)
        except CompletionError as e:
            rep.add(f"{kind}.precondition", UNSTATEABLE, str(e))
            continue
        except Exception as e:  # noqa: BLE001 - the report must encode everything
            rep.add(f"{kind}.construction", ERROR, f"{type(e).__name__}: {e}")
            continue
        built[kind] = res
        rep.extend(res.report, f"{kind}.construction.")
        if res.report.ok:
            rep.extend(check_laws(res.doctrine, GUARANTEED[kind], cfg.stability, structural=False), f"{kind}.")
    if "q" in built and built["q"].report.ok:
        rep.extend(check_q_fibers(P, built["q"]), "q.")
        rep.extend(check_q_comprehension_transport(P, built["q"]), "q.transport.")
        q = built["q"]
        xq = built["eqc"].parts["x"].doctrine if "eqc" in built and "gr" not in built["eqc"].parts else None
        if xq is None:
            try:
                xq = complete_x(q.doctrine, strict=False).doctrine
            except CompletionError as e:
                rep.add("x.keeps_descent_quotients", UNSTATEABLE, str(e))
        if xq is not None:
            rep.extend(check_x_keeps_descent_quotients(q.doctrine, xq))
    return rep


# -- essential equivalences by enumeration ----------------------------------------------

class _CellOracle:
    """Memoised existence of a 2-arrow between two 1-arrows."""

    def __init__(self, P: Doctrine, R: Doctrine, budget: Budget):
        self.P, self.R, self.budget = P, R, budget
        self._memo: dict[tuple[int, int], bool] = {}

    def __call__(self, i: int, f1: DoctrineArrow, j: int, f2: DoctrineArrow) -> bool:
        if (i, j) not in self._memo:
            self._memo[(i, j)] = bool(enumerate_two_cells(self.P, self.R, f1, f2, self.budget))
        return self._memo[(i, j)]


def _essential_equivalence(rep: Report, P: Doctrine, C: Doctrine, Z: Doctrine, unit: DoctrineArrow,
                           dom_arrows: list[DoctrineArrow], cod_arrows: list[DoctrineArrow],
                           budget: Budget) -> None:
    """Precomposition with ``unit`` from arrows C -> Z to arrows P -> Z."""
    phi = [unit.then(g) for g in cod_arrows]
    bad = [k for k, a in enumerate(phi) if not check_one_arrow(P, Z, a, check_functor_laws=False).ok]
    rep.ok_if("precomposition.lands", not bad, "unit followed by each arrow is a 1-arrow",
              witness=[cod_arrows[k].F.obj_map for k in bad[:2]], checked=len(phi))
    cp = _CellOracle(P, Z, budget)
    cc = _CellOracle(C, Z, budget)
    missing = []
    for i, f in enumerate(dom_arrows):
        if not any(cp(i, f, len(dom_arrows) + k, g) and cp(len(dom_arrows) + k, g, i, f) for k, g in enumerate(phi)):
            missing.append({"obj_map": f.F.obj_map})
    rep.ok_if("essentially_surjective", not missing, "every 1-arrow is isomorphic to a precomposite",
              witness=missing[:2], checked=len(dom_arrows))
    off = len(dom_arrows)
    bad_full, bad_faith, n = [], [], 0
    for i, g1 in enumerate(cod_arrows):
        for j, g2 in enumerate(cod_arrows):
            n += 1
            above = cc(i, g1, j, g2)
            below = cp(off + i, phi[i], off + j, phi[j])
            if below and not above:
                bad_full.append([i, j])
            if above and not below:
                bad_faith.append([i, j])
    rep.ok_if("full", not bad_full, "2-arrows between precomposites come from 2-arrows", witness=bad_full[:3],
              checked=n)
    rep.ok_if("faithful", not bad_faith, "precomposition preserves 2-arrows", witness=bad_faith[:3], checked=n)
    if budget.exceeded:
        rep.add("budget", UNSTATEABLE, "2-arrow enumeration hit the budget: partial")


def _enumerated(rep: Report, P: Doctrine, Z: Doctrine, budget: Budget, label: str) -> list[DoctrineArrow]:
    arrows, exhaustive = enumerate_one_arrows(P, Z, budget)
    rep.add(f"enumeration.{label}", PASS if exhaustive else UNSTATEABLE,
            "exhaustive" if exhaustive else "partial: budget exceeded", checked=len(arrows))
    return arrows


def check_universal_q(P: Doctrine, Z: Doctrine, budget: int | None = None,
                      unit: DoctrineArrow | None = None) -> Report:
    """Precomposition with J: QED(Q P, Z) -> ED(P, Z) is an essential equivalence."""
    rep = Report(f"universal property of Q({P.name}) against {Z.name}")
    bud = Budget(budget)
    mem = Report()
    mem.extend(check_elementary(Z))
    qs = quotient_sweep(Z)
    for k in ("quotients.exist", "quotients.descent"):
        mem.extend(Report(lines=qs.find(k)))
    rep.extend(mem, "target.")
    if not mem.ok:
        rep.add("target.membership", FAIL, "target lacks descent quotients or is not elementary")
        return rep
    q = complete_q(P, strict=False)
    J = unit or q.unit
    u = check_one_arrow(P, q.doctrine, J)
    rep.extend(u, "unit.")
    if not u.ok:
        return rep
    ed = _enumerated(rep, P, Z, bud, "ED")
    cands = _enumerated(rep, q.doctrine, Z, bud, "QED")
    qed = [g for g in cands if preserves_quotients(q.doctrine, Z, g).ok]
    rep.add("QED.filter", INFO, "1-arrows that preserve quotients", checked=len(qed))
    if bud.exceeded:
        rep.add("essentially_surjective", UNSTATEABLE, "enumeration partial")
        return rep
    _essential_equivalence(rep, P, q.doctrine, Z, J, ed, qed, bud)
    return rep


def check_universal_x(P: Doctrine, Z: Doctrine, budget: int | None = None,
                      unit: DoctrineArrow | None = None) -> Report:
    """Precomposition with K: ED(X P, Z) -> ED(P, Z) is an essential equivalence for Z with comprehensive diagonals."""
    rep = Report(f"universal property of X({P.name}) against {Z.name}")
    bud = Budget(budget)
    mem = Report()
    mem.extend(check_elementary(Z))
    mem.extend(has_comprehensive_diagonals(Z))
    rep.extend(mem, "target.")
    if not mem.ok:
        rep.add("target.membership", FAIL, "target lacks comprehensive diagonals or is not elementary")
        return rep
    x = complete_x(P, strict=False)
    K = unit or x.unit
    u = check_one_arrow(P, x.doctrine, K)
    rep.extend(u, "unit.")
    if not u.ok:
        return rep
    ed = _enumerated(rep, P, Z, bud, "ED")
    ced = _enumerated(rep, x.doctrine, Z, bud, "CED")
    if bud.exceeded:
        rep.add("essentially_surjective", UNSTATEABLE, "enumeration partial")
        return rep
    _essential_equivalence(rep, P, x.doctrine, Z, K, ed, ced, bud)
    return rep


def unit_mutants(unit: DoctrineArrow, target: Doctrine) -> list[tuple[str, DoctrineArrow]]:
    """Every single-entry change of a component; falls back to the functor when components are forced."""
    out = []
    for A in sorted(unit.b):
        m = unit.b[A]
        size = len(target.fibers[unit.F.obj_map[A]])
        for k in range(len(m)):
            for v in range(size):
                if v == m[k]:
                    continue
                b = {a: x.copy() for a, x in unit.b.items()}
                b[A][k] = v
                out.append((f"b[{A}][{k}]={v}", DoctrineArrow(unit.F, b, unit.name + "'")))
    if out:
        return out
    D = target.base
    for f, g in sorted(unit.F.arr_map.items()):
        for h in D.hom(D.dom[g], D.cod[g]):
            if h != g:
                amap = dict(unit.F.arr_map)
                amap[f] = h
                out.append((f"F({f})={h}", DoctrineArrow(FunctorData(unit.F.obj_map, amap), unit.b, unit.name + "'")))
    for A, o in sorted(unit.F.obj_map.items()):
        for o2 in D.objects:
            if o2 != o:
                omap = dict(unit.F.obj_map)
                omap[A] = o2
                out.append((f"F({A})={o2}", DoctrineArrow(FunctorData(omap, unit.F.arr_map), unit.b, unit.name + "'")))
    return out


# -- equivalence witnesses ---------------------------------------------------------------

def check_equivalence_witness(P: Doctrine, R: Doctrine, arrow: DoctrineArrow) -> Report:
    """1-arrow, full, faithful, essentially surjective, and every component an order isomorphism."""
    rep = Report(f"equivalence {P.name} -> {R.name}")
    u = check_one_arrow(P, R, arrow)
    rep.extend(u, "arrow.")
    if not u.ok:
        return rep
    rep.extend(check_full_faithful(arrow.F, P.base, R.base))
    rep.extend(check_essentially_surjective(arrow.F, P.base, R.base))
    bad = []
    for A in arrow.F.domain_objects(P.base):
        m = arrow.b[A]
        S, T = P.fibers[A], R.fibers[arrow.F.obj_map[A]]
        if len(S) != len(T) or len(np.unique(m)) != len(m) or not np.array_equal(S.leq, T.leq[np.ix_(m, m)]):
            bad.append(A)
    rep.ok_if("fibers.isomorphic", not bad, "each component is an order isomorphism", witness=bad[:3])
    return rep


@dataclass
class EquivalenceResult:
    witness: DoctrineArrow | None
    report: Report
    exhaustive: bool
    tried: int = 0


def iso_classes(P: Doctrine, objects: Sequence[str] | None = None) -> list[list[str]]:
    """Isomorphism classes of the (full subcategory on the) given objects."""
    C = P.base
    reps: list[int] = []
    out: list[list[str]] = []
    for o in (objects if objects is not None else C.objects):
        x = C.obj_index[o]
        for k, r in enumerate(reps):
            if C.isomorphic(r, x) is not None:
                out[k].append(o)
                break
        else:
            reps.append(x)
            out.append([o])
    return out


def _profile_mismatch(P: Doctrine, R: Doctrine, objects: Sequence[str] | None) -> dict | None:
    """An equivalence is a bijection on isomorphism classes that keeps fiber sizes.

    Returns the surplus classes on either side when the multisets differ.
    """
    def profile(D, objs):
        return {tuple(c): len(D.fibers[c[0]]) for c in iso_classes(D, objs)}

    pp, rp = profile(P, objects), profile(R, None)
    left = sorted(pp.values())
    right = sorted(rp.values())
    if left == right:
        return None
    surplus_p, surplus_r = list(pp.items()), list(rp.items())
    for size in set(left) | set(right):
        k = min(left.count(size), right.count(size))
        for side in (surplus_p, surplus_r):
            drop = [c for c in side if c[1] == size][:k]
            for c in drop:
                side.remove(c)
    return {"only_in_source": [list(c) for c, _ in surplus_p], "only_in_target": [list(c) for c, _ in surplus_r]}


def doctrine_equivalence(P: Doctrine, R: Doctrine, budget: int | None = None,
                         seeds: Sequence[DoctrineArrow] = (), objects: Sequence[str] | None = None) -> EquivalenceResult:
    """Search seeds, then all 1-arrows, for an equivalence witness.

    ``objects`` restricts the source to a full subcategory (the common window).
    """
    rep = Report(f"doctrine equivalence {P.name} ~ {R.name}")
    tried = 0
    mismatch = _profile_mismatch(P, R, objects)
    if mismatch is not None:
        rep.add("witness", FAIL, "isomorphism classes with their fiber sizes differ, so no equivalence exists",
                witness=mismatch)
        return EquivalenceResult(None, rep, True, 0)
    for s in seeds:
        tried += 1
        r = check_equivalence_witness(P, R, s)
        if r.ok:
            rep.add("witness", PASS, "seed arrow is an equivalence", witness={"name": s.name, "obj_map": s.F.obj_map})
            return EquivalenceResult(s, rep, True, tried)
    bud = Budget(budget)
    arrows, exhaustive = enumerate_one_arrows(P, R, bud, objects)
    for a in arrows:
        tried += 1
        if check_equivalence_witness(P, R, a).ok:
            rep.add("witness", PASS, "found by enumeration", witness={"obj_map": a.F.obj_map}, checked=tried)
            return EquivalenceResult(a, rep, exhaustive, tried)
    if exhaustive:
        rep.add("witness", FAIL, "no equivalence exists (exhaustive)", witness={"tried": tried}, checked=tried)
    else:
        rep.add("witness", UNSTATEABLE, "none found before the budget ran out", checked=tried)
    return EquivalenceResult(None, rep, exhaustive, tried)


# -- mutation battery ----------------------------------------------------------------------

@dataclass
class Mutant:
    name: str
    fault: str
    run: Callable[[], Report]
    expect: str  # prefix of the line that must fail


def _rebase(P: Doctrine, base) -> Doctrine:
    return Doctrine(base, P.fibers, list(P.R), P.delta, name=P.name + "*")


def _m_composition() -> Report:
    from .examples import finset_sub
    P = finset_sub(2)
    base = P.base.replace(comp_overrides={("2to2_10", "2to2_10"): "2to2_10"}, name="broken")
    return check_doctrine(_rebase(P, base))


def _m_reindex() -> Report:
    from .examples import finset_sub
    P = finset_sub(2)
    return check_doctrine(P.with_changes(reindex={"2to2_10": [1, 2, 1, 3]}))


def _m_delta() -> Report:
    from .examples import finset_sub
    return check_elementary(finset_sub(4).with_changes(delta={"2": "s1111"}))


def _m_equality_component() -> Report:
    from .examples import finset_sub
    P = finset_sub(4)
    a = identity_arrow(P)
    # constant top is meet-preserving and natural, so only equality can catch it
    a.b = {o: np.full(len(P.fibers[o]), P.fibers[o].top, dtype=np.int64) for o in a.b}
    return check_one_arrow(P, P, a)


def _m_fake_quotient() -> Report:
    from .examples import finset_sub
    return check_quotient(finset_sub(4), "2", "s1111", "2to2_01")


def _m_nonfull() -> Report:
    from .examples import nonfull_chain
    return has_full_comprehensions(nonfull_chain())


def _m_descent_datum() -> Report:
    from .examples import finset_sub
    P = finset_sub(4)
    q = complete_q(P)
    o = "2~s1111"
    L = P.fibers["2"]
    wrong = sub_infsl(L, np.ones(len(L), dtype=bool))
    bad = CompletionResult(q.kind, q.source, q.doctrine.with_changes(fibers={o: wrong}), q.unit,
                           q.provenance, q.report, q.parts)
    return check_q_fibers(P, bad)


def _m_product_cell() -> Report:
    from .examples import finset_sub
    C = finset_sub(4).base
    cells = dict(C.products)
    c = cells[("2", "2")]
    cells[("2", "2")] = ProductCell(c.apex, "4to2_0000", c.pr2)
    return check_category(C.replace(products=cells, name="badcell"))


def _m_two_cell() -> Report:
    from .examples import finset_sub
    P = finset_sub(2)
    a = identity_arrow(P)
    theta = {o: P.base.identity[o] for o in P.base.objects}
    theta["2"] = "2to2_00"
    return check_two_arrow(P, P, a, a, Doctrine2Cell(theta))


def _m_collapse_class() -> Report:
    from .examples import blur
    P = blur()
    classes, _ = collapse_classes(P)
    x, y = P.base.obj_index["1"], P.base.obj_index["B"]
    merged = [g for cl in classes[(x, y)] for g in cl]
    classes = dict(classes)
    classes[(x, y)] = [[g] for g in merged]
    XP, _ = collapse_with_classes(P, classes, name="X(blur)*")
    return check_collapse(P, XP)


MUTANTS: tuple[Mutant, ...] = (
    Mutant("composition", "broken composition", _m_composition, "base."),
    Mutant("reindex", "non-meet-preserving reindex", _m_reindex, "reindex."),
    Mutant("delta", "wrong equality predicate", _m_delta, "adjunction."),
    Mutant("equality_component", "component sends equality to top", _m_equality_component, "equality_preserved"),
    Mutant("fake_quotient", "identity claimed as quotient of the full relation", _m_fake_quotient, "compatible"),
    Mutant("nonfull_comprehension", "comprehension not full", _m_nonfull, "comprehensions.full"),
    Mutant("descent_datum", "non-descent element in a quotient fiber", _m_descent_datum, "fibers.descent"),
    Mutant("product_cell", "wrong projection in a product cell", _m_product_cell, "product."),
    Mutant("two_cell", "collapsed 2-arrow component", _m_two_cell, ""),
    Mutant("collapse_class", "split class in the collapse", _m_collapse_class, "classes."),
)


def run_mutation_battery(mutants: Sequence[Mutant] = MUTANTS) -> Report:
    rep = Report("mutation battery")
    for m in mutants:
        try:
            r = m.run()
        except Exception as e:  # noqa: BLE001
            rep.add(f"mutant.{m.name}", FAIL, f"check crashed: {type(e).__name__}: {e}")
            continue
        hits = [ln for ln in r.failures() if ln.check.startswith(m.expect) and ln.witness is not None]
        rep.ok_if(f"mutant.{m.name}", bool(hits), f"{m.fault} detected",
                  witness={"fault": m.fault, "lines": [ln.check for ln in r.lines]}, checked=len(r.lines))
    return rep

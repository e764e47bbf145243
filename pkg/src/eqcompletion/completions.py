"""Free completions of a doctrine and their canonical units.

Every completed window is a derived window over the root window of the
input, so composites are always computed by the original function tables.
Constructions never trust themselves: each result carries a report of the
postconditions it re-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .doctrine import Doctrine, DoctrineArrow, boxtimes_idx, check_doctrine, check_elementary, check_one_arrow
from .fincat import (CatWindow, FunctorData, ProductCell, ProductUndefined, WindowError, check_full_faithful,
                     derived_window)
from .infsl import InfSemilattice, sub_infsl
from .logic import (check_quotient, descent_data, equivalence_relations, find_comprehension, find_quotients,
                    has_comprehensions, has_comprehensive_diagonals, has_full_comprehensions, is_comprehension,
                    quotient_sweep, relation_flags)
from .report import ERROR, FAIL, INFO, PASS, UNSTATEABLE, VACUOUS, Report


class CompletionError(Exception):
    def __init__(self, message: str, report: Report | None = None):
        super().__init__(message)
        self.report = report


@dataclass
class CompletionResult:
    kind: str
    source: Doctrine
    doctrine: Doctrine
    unit: DoctrineArrow
    provenance: dict = field(default_factory=dict)
    report: Report = field(default_factory=Report)
    parts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.report.ok


def _assemble(base: CatWindow, objects: Sequence[str], identity: Mapping[str, str],
              arrows: Sequence[tuple[str, str, str, Sequence[int]]],
              products: Mapping[tuple[str, str], ProductCell], name: str, provenance: dict) -> CatWindow:
    """Derived window whose arrows are unions of base-arrow classes."""
    rep, members = [], {}
    for k, (_, _, _, bl) in enumerate(arrows):
        members[k] = np.unique(np.concatenate([base.members(b) for b in bl]))
        rep.append(int(base.rep[bl[0]]))
    return derived_window(list(objects), [a[0] for a in arrows], {a[0]: a[1] for a in arrows},
                          {a[0]: a[2] for a in arrows}, dict(identity), dict(products), base.root,
                          rep, members, name=name, provenance=provenance)


def _restrict(full: np.ndarray, src_embed: np.ndarray, tgt_embed: np.ndarray, what: str) -> np.ndarray:
    """Map between sub-lattices induced by ``full`` on the ambient lattices."""
    img = full[src_embed]
    pos = np.searchsorted(tgt_embed, img)
    pos = np.minimum(pos, len(tgt_embed) - 1)
    if not (tgt_embed[pos] == img).all():
        raise CompletionError(f"{what}: reindexing leaves the sub-fiber")
    return pos


def _square_maps(P: Doctrine, x: int, y: int) -> np.ndarray:
    """Index of f x f for every f in hom(x, y)."""
    cache = P.__dict__.setdefault("_sqmap_cache", {})
    if (x, y) not in cache:
        C = P.base
        cache[(x, y)] = np.array([C.index[C.product_map(C.arrows[h], C.arrows[h])]
                                  for h in C.hom_idx(x, y).tolist()], dtype=np.int64)
    return cache[(x, y)]


def _finish(kind: str, P: Doctrine, D: Doctrine, unit: DoctrineArrow, prov: dict, rep: Report,
            strict: bool, parts: dict | None = None) -> CompletionResult:
    res = CompletionResult(kind, P, D, unit, prov, rep, parts or {})
    if strict and not rep.ok:
        bad = rep.failures()[0]
        raise CompletionError(f"{kind}: postcondition {bad.check} failed (witness {bad.witness})", rep)
    return res


def _standard_checks(P: Doctrine, D: Doctrine, unit: DoctrineArrow) -> Report:
    rep = Report()
    rep.extend(check_doctrine(D), "doctrine.")
    if not rep.ok:
        return rep
    rep.extend(check_elementary(D), "elementary.")
    rep.extend(check_one_arrow(P, D, unit), "unit.")
    return rep


# -- quotient completion ----------------------------------------------------------

def complete_q(P: Doctrine, verify: bool = True, strict: bool = True) -> CompletionResult:
    C = P.base
    objs, under, rel, trans_unknown = [], {}, {}, []
    for A in C.objects:
        if C.square(A) is None or not P.has_delta(A):
            continue
        L = P.fibers[C.square(A)]
        _, _, trans = relation_flags(P, A)
        for r in equivalence_relations(P, A):
            name = f"{A}~{L.elements[r]}"
            objs.append(name)
            under[name], rel[name] = A, r
            if trans is None:
                trans_unknown.append(name)
    fibers = {o: descent_data(P, under[o], rel[o]) for o in objs}
    arrows, arrow_base = [], {}
    for o1 in objs:
        A = under[o1]
        LA = P.fibers[C.square(A)]
        x = C.obj_index[A]
        for o2 in objs:
            y = C.obj_index[under[o2]]
            hs = C.hom_idx(x, y)
            if not len(hs):
                continue
            ffs = _square_maps(P, x, y)
            vals = np.array([P.R[ff][rel[o2]] for ff in ffs.tolist()], dtype=np.int64)
            for h in hs[LA.leq[rel[o1], vals]].tolist():
                aid = f"{C.arrows[h]}|{o1}|{o2}"
                arrows.append((aid, o1, o2, [h]))
                arrow_base[aid] = h
    identity = {o: f"{C.identity[under[o]]}|{o}|{o}" for o in objs}
    products, missing_products = {}, 0
    for o1 in objs:
        for o2 in objs:
            A, B = under[o1], under[o2]
            cell = C.products.get((A, B))
            if cell is None:
                continue
            try:
                apex_sq, k = boxtimes_idx(P, rel[o1], (A, A), rel[o2], (B, B))
            except ProductUndefined:
                missing_products += 1
                continue
            apex = f"{cell.apex}~{P.fibers[apex_sq].elements[k]}"
            if apex not in under:
                raise CompletionError(f"product relation of {o1} and {o2} is not an equivalence relation")
            p1, p2 = f"{cell.pr1}|{apex}|{o1}", f"{cell.pr2}|{apex}|{o2}"
            if p1 not in arrow_base or p2 not in arrow_base:
                raise CompletionError(f"projections of {apex} are not arrows of relations")
            products[(o1, o2)] = ProductCell(apex, p1, p2)
    prov = {"kind": "q", "objects": {o: {"under": under[o], "relation": P.fibers[C.square(under[o])].elements[rel[o]]}
                                      for o in objs},
            "arrows": {a: C.arrows[h] for a, h in arrow_base.items()}}
    W = _assemble(C, objs, identity, arrows, products, f"Q({C.name})", prov)
    reindex = {}
    for aid, o1, o2, (h,) in arrows:
        reindex[aid] = _restrict(P.R[h], fibers[o2].embed, fibers[o1].embed, aid)
    delta = {}
    for o in objs:
        cell = products.get((o, o))
        if cell is None:
            continue
        lab = P.fibers[C.square(under[o])].elements[rel[o]]
        if lab not in fibers[cell.apex].index:
            raise CompletionError(f"equality on {o} is not a descent datum of the product relation")
        delta[o] = lab
    QP = Doctrine(W, fibers, reindex, delta, name=f"Q({P.name})", provenance=prov)
    QP.underlying = P  # equality of a relation object lives here even when its square is not in the window
    # unit (J, j)
    omap, amap, b = {}, {}, {}
    for A in C.objects:
        if C.square(A) is None or not P.has_delta(A):
            continue
        o = f"{A}~{P.delta[A]}"
        omap[A] = o
        b[A] = np.arange(len(P.fibers[A]), dtype=np.int64)
        if len(fibers[o]) != len(P.fibers[A]):
            raise CompletionError(f"descent data of equality on {A} is not all of P({A})")
    for f in C.arrows:
        if C.dom[f] in omap and C.cod[f] in omap:
            amap[f] = f"{f}|{omap[C.dom[f]]}|{omap[C.cod[f]]}"
    unit = DoctrineArrow(FunctorData(omap, amap), b, "J")
    rep = Report(f"complete_q({P.name})")
    if trans_unknown:
        rep.add("objects.transitivity_unstateable", UNSTATEABLE,
                "relations admitted because A x A x A is outside the window", witness=trans_unknown[:6],
                checked=len(trans_unknown))
    skipped = [A for A in C.objects if C.square(A) is None]
    if skipped:
        rep.add("objects.no_square", UNSTATEABLE, "base objects without a square carry no relations",
                witness=skipped, checked=len(skipped))
    if missing_products:
        rep.add("products.unstateable", UNSTATEABLE, checked=missing_products)
    if verify:
        rep.extend(_standard_checks(P, QP, unit))
        if rep.ok:
            rep.extend(check_full_faithful(unit.F, C, W), "J.")
            rep.extend(_q_relations_are_p_relations(P, QP, under, rel))
            rep.extend(quotient_sweep(QP), "Q.")
            rep.extend(_q_identity_quotients(C, QP, under, rel))
            rep.extend(check_projective_cover(QP, unit), "cover.")
    return _finish("q", P, QP, unit, prov, rep, strict, {"under": under, "relation": rel})


def _q_relations_are_p_relations(P: Doctrine, QP: Doctrine, under, rel) -> Report:
    rep = Report()
    C, W = P.base, QP.base
    bad, n = [], 0
    for o in W.objects:
        sq = W.square(o)
        if sq is None or not QP.has_delta(o):
            continue
        A = under[o]
        refl_p, sym_p, trans_p = relation_flags(P, A)
        emb = QP.fibers[sq].embed
        for t in equivalence_relations(QP, o, allow_unstateable=False):
            n += 1
            r = emb[t]
            if not (refl_p[r] and sym_p[r] and (trans_p is None or trans_p[r])):
                bad.append({"object": o, "relation": QP.fibers[sq].elements[t]})
    if n == 0:
        rep.add("relations.lift", VACUOUS, "no stateable relation of the completion")
    else:
        rep.ok_if("relations.lift", not bad, "relations of the completion are relations of the input",
                  witness=bad[:3], checked=n)
    return rep


def _q_identity_quotients(C: CatWindow, QP: Doctrine, under, rel) -> Report:
    """The identity (A, rho) -> (A, tau) is a quotient of tau, and an effective one."""
    rep = Report()
    W = QP.base
    bad, n = [], 0
    for o in W.objects:
        sq = W.square(o)
        if sq is None or not QP.has_delta(o):
            continue
        L = QP.fibers[sq]
        A = under[o]
        for t in equivalence_relations(QP, o, allow_unstateable=False):
            target = f"{A}~{L.elements[t]}"
            q = f"{C.identity[A]}|{o}|{target}"
            if q not in W.index:
                bad.append({"object": o, "relation": L.elements[t], "missing": q})
                continue
            n += 1
            r = check_quotient(QP, o, t, q)
            if not r.ok:
                bad.append({"object": o, "relation": L.elements[t], "quotient": q})
    if n == 0 and not bad:
        rep.add("identity_quotients", VACUOUS)
    else:
        rep.ok_if("identity_quotients", not bad, "id_A : (A,rho) -> (A,tau) is a quotient of tau",
                  witness=bad[:3], checked=n)
    return rep


def check_projective_cover(QP: Doctrine, unit: DoctrineArrow) -> Report:
    """Objects J(A) are projective for quotients; every object is a quotient of a relation on one."""
    rep = Report("projective cover")
    W = QP.base
    proj = set(unit.F.obj_map.values())
    quotients = []
    for o in W.objects:
        sq = W.square(o)
        if sq is None or not QP.has_delta(o):
            continue
        for t in equivalence_relations(QP, o, allow_unstateable=False):
            for qw in find_quotients(QP, o, t):
                quotients.append(W.index[qw.arrow])
    bad, n = [], 0
    for q in quotients:
        src, tgt = int(W.dom_i[q]), int(W.cod_i[q])
        for p in proj:
            pi = W.obj_index[p]
            gs = W.hom_idx(pi, tgt)
            hs = W.hom_idx(pi, src)
            lifts = W.compose_idx(q, hs)
            n += len(gs)
            missing = gs[~np.isin(gs, lifts)]
            if len(missing):
                bad.append({"quotient": W.arrows[q], "arrow": W.arrows[missing[0]]})
    if n == 0:
        rep.add("projective", VACUOUS, "no stateable quotient")
    else:
        rep.ok_if("projective", not bad, "arrows from J(A) lift along quotients", witness=bad[:3], checked=n)
    bad, n_ok, n_un = [], 0, 0
    for o in W.objects:
        if o in proj:
            continue
        found = False
        stateable = False
        for p in proj:
            pi = W.obj_index[p]
            sq = W.square(p)
            if sq is None or not QP.has_delta(p):
                continue
            for t in equivalence_relations(QP, p, allow_unstateable=False):
                for qw in find_quotients(QP, p, t):
                    stateable = True
                    if W.cod[qw.arrow] == o:
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if found:
            n_ok += 1
        elif not stateable or W.square(o) is None:
            n_un += 1
        else:
            bad.append(o)
    rep.ok_if("covered", not bad, "every object is a quotient of a relation on some J(A)",
              witness=bad[:3], checked=n_ok)
    if n_un:
        rep.add("covered.unstateable", UNSTATEABLE, "no stateable relation on a projective reaches the object",
                checked=n_un)
    return rep


# -- extensional collapse ------------------------------------------------------------

def _relation_matrix(P: Doctrine, X: str, Y: str, fs: np.ndarray) -> np.ndarray | None:
    """M[i, j] iff delta_X <= P_{fi x fj}(delta_Y) for arrows fs : X -> Y.

    When X has no square the pairing form top <= P_<f,g>(delta_Y) is used. When Y
    has no square, a relation object is handled in its underlying doctrine, and a
    product Y1 x Y2 componentwise through the projections (exact by the product
    law for equality).
    None when no route is stateable.
    """
    C = P.base
    if C.square(Y) is not None and P.has_delta(Y):
        dY = P.delta_idx(Y)
        M = np.zeros((len(fs), len(fs)), dtype=bool)
        if C.square(X) is not None and P.has_delta(X):
            L = P.fibers[C.square(X)]
            dX = P.delta_idx(X)
            for i, f in enumerate(fs.tolist()):
                for j, g in enumerate(fs.tolist()):
                    fg = C.index[C.product_map(C.arrows[f], C.arrows[g])]
                    M[i, j] = L.leq[dX, P.R[fg][dY]]
        else:
            # no square on X: use the equivalent form top <= P_<f,g>(delta_Y)
            top = P.fibers[X].top
            for i, f in enumerate(fs.tolist()):
                for j, g in enumerate(fs.tolist()):
                    M[i, j] = P.R[C.index[C.pair(C.arrows[f], C.arrows[g])]][dY] == top
        return M
    M = _underlying_matrix(P, X, Y, fs)
    if M is not None:
        return M
    for (y1, y2), cell in C.products.items():
        if cell.apex != Y or Y in (y1, y2):
            continue
        M1 = _relation_matrix(P, X, y1, C.compose_idx(C.index[cell.pr1], fs))
        M2 = _relation_matrix(P, X, y2, C.compose_idx(C.index[cell.pr2], fs)) if M1 is not None else None
        if M2 is not None:
            return M1 & M2
    return None


def _underlying_matrix(P: Doctrine, X: str, Y: str, fs: np.ndarray) -> np.ndarray | None:
    """Relation objects (A, rho): equality on (A, rho) is rho itself and reindexing is the
    underlying one, so the condition reads rho_X <= U_{f x g}(rho_Y) in U(A x A)."""
    U = getattr(P, "underlying", None)
    if U is None:
        return None
    objs, base_of = P.provenance["objects"], P.provenance["arrows"]
    CU, C = U.base, P.base
    A, B = objs[X]["under"], objs[Y]["under"]
    LA, LB = U.fibers[CU.square(A)], U.fibers[CU.square(B)]
    r, s = LA.index[objs[X]["relation"]], LB.index[objs[Y]["relation"]]
    names = [base_of[C.arrows[f]] for f in fs.tolist()]
    M = np.zeros((len(fs), len(fs)), dtype=bool)
    for i, f in enumerate(names):
        for j, g in enumerate(names):
            M[i, j] = LA.leq[r, U.R[CU.index[CU.product_map(f, g)]][s]]
    return M


def collapse_relation(P: Doctrine, x: int, y: int) -> tuple[np.ndarray | None, np.ndarray]:
    """(M, qualifying) for hom(x, y); M is None when the identification is unstateable."""
    C = P.base
    hs = C.hom_idx(x, y)
    M = _relation_matrix(P, C.objects[x], C.objects[y], hs)
    if M is None:
        return None, np.ones(len(hs), dtype=bool)
    return M, np.diag(M).copy()


def collapse_classes(P: Doctrine) -> tuple[dict[tuple[int, int], list[list[int]]], Report]:
    """Classes of each hom-set and the precheck report (well-definedness and equivalence)."""
    C = P.base
    rep = Report()
    classes = {}
    wd_bad, eq_bad, n_pairs, n_un = [], [], 0, 0
    for (x, y), hs in sorted(C._hom.items()):
        M, qual = collapse_relation(P, x, y)
        if M is None:
            n_un += 1
            classes[(x, y)] = [[int(h)] for h in hs]
            continue
        for i, j in np.argwhere(M):
            n_pairs += 1
            if not np.array_equal(P.R[hs[i]], P.R[hs[j]]):
                wd_bad.append([C.arrows[hs[i]], C.arrows[hs[j]]])
        Mq = M[np.ix_(qual, qual)]
        if not (np.array_equal(Mq, Mq.T) and not (((Mq.astype(int) @ Mq.astype(int)) > 0) & ~Mq).any()):
            eq_bad.append([C.objects[x], C.objects[y]])
        seen, cls = set(), []
        q_idx = np.nonzero(qual)[0]
        for i in q_idx.tolist():
            if i in seen:
                continue
            group = [j for j in q_idx.tolist() if M[i, j] and j not in seen]
            seen.update(group)
            cls.append([int(hs[j]) for j in group])
        classes[(x, y)] = cls
    rep.ok_if("collapse.well_defined", not wd_bad, "related arrows reindex identically",
              witness=wd_bad[:3], checked=n_pairs)
    rep.ok_if("collapse.equivalence", not eq_bad, "the identification is an equivalence relation",
              witness=eq_bad[:3])
    if n_un:
        rep.add("collapse.unstateable", UNSTATEABLE, "hom-sets kept uncollapsed: squares outside the window",
                checked=n_un)
    return classes, rep


def collapse_with_classes(P: Doctrine, classes: Mapping[tuple[int, int], list[list[int]]],
                          name: str | None = None) -> tuple[Doctrine, DoctrineArrow]:
    C = P.base
    arrows, cls_of = [], {}
    for (x, y), cl in sorted(classes.items()):
        for group in cl:
            group = sorted(group)
            aid = C.arrows[group[0]]
            arrows.append((aid, C.objects[x], C.objects[y], group))
            for g in group:
                cls_of[g] = aid
    identity = {o: cls_of[int(C.id_i[C.obj_index[o]])] for o in C.objects}
    products = {k: ProductCell(c.apex, cls_of[C.index[c.pr1]], cls_of[C.index[c.pr2]])
                for k, c in C.products.items()
                if C.index[c.pr1] in cls_of and C.index[c.pr2] in cls_of}
    prov = {"kind": "x", "classes": {a: [C.arrows[g] for g in grp] for a, _, _, grp in arrows}}
    W = _assemble(C, C.objects, identity, arrows, products, name or f"X({C.name})", prov)
    reindex = {a: P.R[grp[0]] for a, _, _, grp in arrows}
    XP = Doctrine(W, P.fibers, reindex, P.delta, name=name or f"X({P.name})", provenance=prov)
    unit = DoctrineArrow(FunctorData({o: o for o in C.objects}, {C.arrows[g]: a for g, a in cls_of.items()}),
                         {o: np.arange(len(P.fibers[o]), dtype=np.int64) for o in C.objects}, "K")
    return XP, unit


def check_collapse(P: Doctrine, XP: Doctrine) -> Report:
    """Each arrow of the collapse is exactly one class of the identification."""
    rep = Report("collapse classes")
    C, W = P.base, XP.base
    bad_merge, bad_split, n = [], [], 0
    for (x, y), hs in sorted(C._hom.items()):
        M, qual = collapse_relation(P, x, y)
        X, Y = C.objects[x], C.objects[y]
        if X not in W.obj_index or Y not in W.obj_index:
            continue
        cls = W.lookup[W.obj_index[X], W.obj_index[Y]][C.rep[hs]] if W.derived else hs
        for i in range(len(hs)):
            for j in range(len(hs)):
                if not (qual[i] and qual[j]):
                    continue
                n += 1
                related = True if M is None and i == j else (False if M is None else bool(M[i, j]))
                same = cls[i] == cls[j] and cls[i] >= 0
                if related and not same:
                    bad_split.append([C.arrows[hs[i]], C.arrows[hs[j]]])
                if same and not related:
                    bad_merge.append([C.arrows[hs[i]], C.arrows[hs[j]]])
    rep.ok_if("classes.related_merged", not bad_split, "related arrows share a class", witness=bad_split[:3], checked=n)
    rep.ok_if("classes.unrelated_apart", not bad_merge, "unrelated arrows are kept apart",
              witness=bad_merge[:3], checked=n)
    return rep


def complete_x(P: Doctrine, verify: bool = True, strict: bool = True) -> CompletionResult:
    classes, pre = collapse_classes(P)
    if strict and not pre.ok:
        raise CompletionError("collapse precheck failed", pre)
    XP, unit = collapse_with_classes(P, classes)
    rep = Report(f"complete_x({P.name})")
    rep.extend(pre)
    if verify and rep.ok:
        rep.extend(_standard_checks(P, XP, unit))
        if rep.ok:
            rep.extend(check_collapse(P, XP))
            rep.extend(has_comprehensive_diagonals(XP), "X.")
            rep.extend(preserves_quotients(P, XP, unit, "K.preserves_quotients"))
            rep.extend(_k_preserves_comprehensions(P, XP, unit))
    return _finish("x", P, XP, unit, XP.provenance, rep, strict, {"classes": classes})


def preserves_quotients(P: Doctrine, R: Doctrine, arrow: DoctrineArrow, check: str = "preserves_quotients") -> Report:
    """If q is a quotient of rho on A then F q is a quotient of R_<F pr1, F pr2>(b(rho)) on F A."""
    rep = Report()
    C, W = P.base, R.base
    F = arrow.F
    bad, n, n_un = [], 0, 0
    for A in C.objects:
        if C.square(A) is None or not P.has_delta(A) or A not in F.obj_map:
            continue
        cell = C.products[(A, A)]
        if cell.apex not in arrow.b:
            n_un += 1
            continue
        FA = F.obj_map[A]
        try:
            t = W.pair(F.arr_map[cell.pr1], F.arr_map[cell.pr2])
        except (ProductUndefined, KeyError):
            n_un += 1
            continue
        for r in equivalence_relations(P, A, allow_unstateable=False):
            r2 = int(R.rx(t)[arrow.b[cell.apex][r]])
            for qw in find_quotients(P, A, r):
                if qw.arrow not in F.arr_map:
                    n_un += 1
                    continue
                n += 1
                if not check_quotient(R, FA, r2, F.arr_map[qw.arrow]).ok:
                    bad.append({"object": A, "relation": P.fibers[cell.apex].elements[r], "quotient": qw.arrow})
    if n == 0:
        rep.add(check, VACUOUS, "no stateable quotient in the domain")
    else:
        rep.ok_if(check, not bad, witness=bad[:3], checked=n)
    if n_un:
        rep.add(f"{check}.unstateable", UNSTATEABLE, checked=n_un)
    return rep


def _k_preserves_comprehensions(P: Doctrine, R: Doctrine, unit: DoctrineArrow) -> Report:
    rep = Report()
    C = P.base
    bad, n = [], 0
    for A in unit.F.obj_map:
        for al in range(len(P.fibers[A])):
            for c in find_comprehension(P, A, al):
                if C.dom[c] not in unit.F.obj_map:
                    continue
                n += 1
                if not is_comprehension(R, unit.F.obj_map[A], int(unit.b[A][al]), unit.F.arr_map[c]):
                    bad.append({"object": A, "predicate": P.fibers[A].elements[al], "comprehension": c})
    if n == 0:
        rep.add("K.preserves_comprehensions", VACUOUS, "no comprehension in the input")
    else:
        rep.ok_if("K.preserves_comprehensions", not bad, witness=bad[:3], checked=n)
    return rep


# -- comprehension completion ---------------------------------------------------------

def _gr_name(A: str, label: str) -> str:
    return f"{A}@{label}"


def complete_gr(P: Doctrine, verify: bool = True, strict: bool = True) -> CompletionResult:
    C = P.base
    objs, under, pred = [], {}, {}
    for A in C.objects:
        for k, lab in enumerate(P.fibers[A].elements):
            o = _gr_name(A, lab)
            objs.append(o)
            under[o], pred[o] = A, k
    downs = {}
    for o in objs:
        L = P.fibers[under[o]]
        downs[o] = sub_infsl(L, L.leq[:, pred[o]], top=pred[o])
    by_base: dict[str, list[str]] = {}
    for o in objs:
        by_base.setdefault(under[o], []).append(o)
    arrows, arrow_base = [], {}
    for (x, y), hs in sorted(C._hom.items()):
        A, B = C.objects[x], C.objects[y]
        S = P.stack(x, y)
        LA = P.fibers[A]
        for o1 in by_base[A]:
            for o2 in by_base[B]:
                ok = LA.leq[pred[o1], S[:, pred[o2]]]
                for h in hs[ok].tolist():
                    aid = f"{C.arrows[h]}|{o1}|{o2}"
                    arrows.append((aid, o1, o2, [h]))
                    arrow_base[aid] = h
    identity = {o: f"{C.identity[under[o]]}|{o}|{o}" for o in objs}
    products = {}
    for o1 in objs:
        for o2 in objs:
            cell = C.products.get((under[o1], under[o2]))
            if cell is None:
                continue
            L = P.fibers[cell.apex]
            k = int(L.meet_table[P.rx(cell.pr1)[pred[o1]], P.rx(cell.pr2)[pred[o2]]])
            apex = _gr_name(cell.apex, L.elements[k])
            products[(o1, o2)] = ProductCell(apex, f"{cell.pr1}|{apex}|{o1}", f"{cell.pr2}|{apex}|{o2}")
    prov = {"kind": "gr", "objects": {o: {"under": under[o], "predicate": P.fibers[under[o]].elements[pred[o]]}
                                       for o in objs}}
    W = _assemble(C, objs, identity, arrows, products, f"Gr({C.name})", prov)
    reindex = []
    for aid, o1, o2, (h,) in arrows:
        LA = P.fibers[under[o1]]
        img = LA.meet_table[P.R[h][downs[o2].embed], pred[o1]]
        pos = np.searchsorted(downs[o1].embed, img)
        reindex.append(pos)
    delta = {}
    for o in objs:
        cell = products.get((o, o))
        A = under[o]
        if cell is None or not P.has_delta(A):
            continue
        Csq = C.products[(A, A)]
        L = P.fibers[Csq.apex]
        d = int(L.meet_table[P.rx(Csq.pr1)[pred[o]], P.delta_idx(A)])
        lab = L.elements[d]
        if lab not in downs[cell.apex].index:
            raise CompletionError(f"equality on {o} is not below the top of its square")
        delta[o] = lab
    G = Doctrine(W, downs, reindex, delta, name=f"Gr({P.name})", provenance=prov)
    omap = {A: _gr_name(A, P.fibers[A].elements[P.fibers[A].top]) for A in C.objects}
    amap = {f: f"{f}|{omap[C.dom[f]]}|{omap[C.cod[f]]}" for f in C.arrows}
    unit = DoctrineArrow(FunctorData(omap, amap), {A: np.arange(len(P.fibers[A]), dtype=np.int64)
                                                   for A in C.objects}, "I")
    rep = Report(f"complete_gr({P.name})")
    if verify:
        rep.extend(_standard_checks(P, G, unit))
        if rep.ok:
            rep.extend(check_full_faithful(unit.F, C, W), "I.")
            rep.extend(has_full_comprehensions(G), "Gr.")
            rep.extend(_gr_identity_comprehensions(C, G, under, pred))
    return _finish("gr", P, G, unit, prov, rep, strict, {"under": under, "predicate": pred})


def _gr_identity_comprehensions(C: CatWindow, G: Doctrine, under, pred) -> Report:
    rep = Report()
    W = G.base
    bad, n = [], 0
    for o in W.objects:
        A = under[o]
        L = G.fibers[o]
        for g, lab in enumerate(L.elements):
            src = _gr_name(A, lab)
            c = f"{C.identity[A]}|{src}|{o}"
            n += 1
            if c not in W.index or not is_comprehension(G, o, g, c):
                bad.append({"object": o, "predicate": lab})
    rep.ok_if("Gr.identity_comprehensions", not bad, "the comprehension of g <= a is the identity (A,g) -> (A,a)",
              witness=bad[:3], checked=n)
    return rep


# -- weak-comprehension retracts ----------------------------------------------------------

def complete_d(P: Doctrine, verify: bool = True, strict: bool = True) -> CompletionResult:
    C = P.base
    objs, info, unst = [], {}, 0
    for A in C.objects:
        for al, lab in enumerate(P.fibers[A].elements):
            cs = find_comprehension(P, A, al, mode="weak")
            if not cs:
                raise CompletionError(f"no weak comprehension for {lab} on {A}")
            if C.square(A) is None or not P.has_delta(A):
                unst += len(cs)
                continue
            for c in cs:
                X = C.dom[c]
                if C.square(X) is None:
                    unst += 1
                    continue
                o = f"{A}@{lab}#{c}"
                kappa = int(P.rx(C.product_map(c, c))[P.delta_idx(A)])
                objs.append(o)
                info[o] = (A, al, c, X, kappa)
    fibers = {o: descent_data(P, info[o][3], info[o][4]) for o in objs}
    arrows, cls_of = [], {}
    wd_bad = []
    for o1 in objs:
        _, _, _, X, k1 = info[o1]
        x = C.obj_index[X]
        LX = P.fibers[C.square(X)]
        for o2 in objs:
            _, _, _, Y, k2 = info[o2]
            y = C.obj_index[Y]
            hs = C.hom_idx(x, y).tolist()
            if not hs:
                continue
            rel = np.zeros((len(hs), len(hs)), dtype=bool)
            for i, f in enumerate(hs):
                for j, g in enumerate(hs):
                    fg = C.index[C.product_map(C.arrows[f], C.arrows[g])]
                    rel[i, j] = LX.leq[k1, P.R[fg][k2]]
            seen = set()
            for i in range(len(hs)):
                if not rel[i, i] or i in seen:
                    continue
                group = [j for j in range(len(hs)) if rel[i, j] and rel[j, j] and j not in seen]
                seen.update(group)
                members = [hs[j] for j in group]
                maps = {tuple(P.R[m][fibers[o2].embed].tolist()) for m in members}
                if len(maps) != 1:
                    wd_bad.append([C.arrows[m] for m in members[:2]])
                aid = f"{C.arrows[members[0]]}|{o1}|{o2}"
                arrows.append((aid, o1, o2, members))
                for m in members:
                    cls_of[(o1, o2, m)] = aid
    identity = {}
    for o in objs:
        e = int(C.id_i[C.obj_index[info[o][3]]])
        if (o, o, e) not in cls_of:
            raise CompletionError(f"identity of {o} is not an arrow")
        identity[o] = cls_of[(o, o, e)]
    products = {}
    for o1 in objs:
        for o2 in objs:
            A, a1, c, X, _ = info[o1]
            B, b1, d, Y, _ = info[o2]
            cell, xcell = C.products.get((A, B)), C.products.get((X, Y))
            if cell is None or xcell is None:
                continue
            L = P.fibers[cell.apex]
            k = int(L.meet_table[P.rx(cell.pr1)[a1], P.rx(cell.pr2)[b1]])
            try:
                cd = C.product_map(c, d)
            except ProductUndefined:
                continue
            apex = f"{cell.apex}@{L.elements[k]}#{cd}"
            if apex not in info:
                continue
            p1 = cls_of.get((apex, o1, C.index[xcell.pr1]))
            p2 = cls_of.get((apex, o2, C.index[xcell.pr2]))
            if p1 is None or p2 is None:
                raise CompletionError(f"projections of {apex} are not arrows")
            products[(o1, o2)] = ProductCell(apex, p1, p2)
    prov = {"kind": "d", "objects": {o: {"under": info[o][0], "predicate": P.fibers[info[o][0]].elements[info[o][1]],
                                         "comprehension": info[o][2]} for o in objs}}
    W = _assemble(C, objs, identity, arrows, products, f"D({C.name})", prov)
    reindex = {aid: _restrict(P.R[members[0]], fibers[o2].embed, fibers[o1].embed, aid)
               for aid, o1, o2, members in arrows}
    delta = {}
    for o in objs:
        cell = products.get((o, o))
        if cell is None:
            continue
        lab = P.fibers[C.square(info[o][3])].elements[info[o][4]]
        if lab not in fibers[cell.apex].index:
            raise CompletionError(f"equality on {o} is not a descent datum")
        delta[o] = lab
    DP = Doctrine(W, fibers, reindex, delta, name=f"D({P.name})", provenance=prov)
    omap, amap, b = {}, {}, {}
    for A in C.objects:
        L = P.fibers[A]
        o = f"{A}@{L.elements[L.top]}#{C.identity[A]}"
        if o in info:
            omap[A] = o
            b[A] = np.arange(len(L), dtype=np.int64)
    for f in C.arrows:
        key = (omap.get(C.dom[f]), omap.get(C.cod[f]), C.index[f])
        if key in cls_of:
            amap[f] = cls_of[key]
    unit = DoctrineArrow(FunctorData(omap, amap), b, "K")
    rep = Report(f"complete_d({P.name})")
    rep.ok_if("D.well_defined", not wd_bad, "identified arrows reindex descent data identically",
              witness=wd_bad[:3])
    if unst:
        rep.add("objects.unstateable", UNSTATEABLE, "weak comprehensions whose squares are outside the window",
                checked=unst)
    if verify and rep.ok:
        rep.extend(_standard_checks(P, DP, unit))
        if rep.ok:
            rep.extend(has_comprehensions(DP, "strong"), "D.")
            rep.extend(check_full_faithful(unit.F, C, W, full=True, faithful=False), "K.")
            rep.extend(_k_preserves_comprehensions(P, DP, unit))
    return _finish("d", P, DP, unit, prov, rep, strict, {"info": info})


# -- elementary quotient completion -------------------------------------------------------

def eqc(P: Doctrine, with_gr: bool = True, verify: bool = True, strict: bool = True,
        gr: CompletionResult | None = None) -> CompletionResult:
    """X Q Gr (P), or X Q (P) when ``with_gr`` is False. A prebuilt Gr result may be passed in."""
    parts = {}
    src = P
    unit = None
    if with_gr:
        g = gr if gr is not None else complete_gr(P, verify=verify, strict=strict)
        parts["gr"] = g
        src, unit = g.doctrine, g.unit
    q = complete_q(src, verify=verify, strict=strict)
    x = complete_x(q.doctrine, verify=verify, strict=strict)
    parts["q"], parts["x"] = q, x
    unit = q.unit.then(x.unit) if unit is None else unit.then(q.unit).then(x.unit)
    unit.name = "eqc-unit"
    E = x.doctrine
    E.name = f"eqc({P.name})" if with_gr else f"XQ({P.name})"
    rep = Report(f"eqc({P.name})")
    for k, r in parts.items():
        rep.extend(r.report, f"{k}.")
    if verify and rep.ok:
        rep.extend(check_one_arrow(P, E, unit), "unit.")
        rep.extend(has_comprehensions(E, "strong"), "eqc.")
        rep.extend(quotient_sweep(E), "eqc.")
        rep.extend(has_comprehensive_diagonals(E), "eqc.")
    return _finish("eqc" if with_gr else "xq", P, E, unit, E.provenance, rep, strict, parts)


COMPLETIONS: dict[str, Callable[..., CompletionResult]] = {
    "q": complete_q, "x": complete_x, "gr": complete_gr, "d": complete_d, "eqc": eqc,
}


def root_induced_arrow(P: Doctrine, R: Doctrine, obj_map: Mapping[str, str],
                       b: Mapping[str, np.ndarray] | None = None, name: str = "") -> DoctrineArrow:
    """Arrow of windows sharing a root: each arrow goes to the class of its root representative."""
    C, D = P.base, R.base
    amap = {}
    for f in C.arrows:
        x, y = C.dom[f], C.cod[f]
        if x not in obj_map or y not in obj_map:
            continue
        r = int(C.rep[C.index[f]])
        if D.derived:
            t = int(D.lookup[D.obj_index[obj_map[x]], D.obj_index[obj_map[y]], r])
        else:
            hs = D.hom_idx(D.obj_index[obj_map[x]], D.obj_index[obj_map[y]])
            t = int(hs[D.rep[hs] == r][0]) if (D.rep[hs] == r).any() else -1
        if t >= 0:
            amap[f] = D.arrows[t]
    if b is None:
        b = {o: np.arange(len(P.fibers[o]), dtype=np.int64) for o in obj_map}
    return DoctrineArrow(FunctorData(dict(obj_map), amap), dict(b), name)

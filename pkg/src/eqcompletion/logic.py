"""Equivalence relations, kernels, quotients, descent data and comprehensions inside a doctrine."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .doctrine import Doctrine
from .fincat import CatWindow, ProductUndefined
from .infsl import InfSemilattice, sub_infsl
from .report import FAIL, INFO, PASS, UNSTATEABLE, VACUOUS, Report


def _idx(P: Doctrine, obj: str, x) -> int:
    if isinstance(x, (int, np.integer)):
        return int(x)
    return P.fibers[obj].index[x]


def _cache(P: Doctrine) -> dict:
    if not hasattr(P, "_logic_cache"):
        P._logic_cache = {}
    return P._logic_cache


def _rel_maps(P: Doctrine, a: str):
    """Reindexing arrays for swap, and for <1,2>, <2,3>, <1,3> out of A x A x A (None if unstateable)."""
    key = ("rel", a)
    c = _cache(P)
    if key not in c:
        C = P.base
        swap = P.rx(C.tuple_map([2, 1], [a, a]))
        try:
            t = tuple(P.rx(C.tuple_map(s, [a, a, a])) for s in ([1, 2], [2, 3], [1, 3]))
            apex = C.iterated_product([a, a, a])[0]
        except ProductUndefined:
            t, apex = None, None
        c[key] = (swap, t, apex)
    return c[key]


# -- equivalence relations -----------------------------------------------------------

@dataclass
class EqRelWitness:
    obj: str
    rho: str
    reflexive: bool
    symmetric: bool
    transitive: bool | None  # None when A x A x A is outside the window
    witnesses: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.reflexive and self.symmetric and self.transitive is True

    @property
    def admissible(self) -> bool:
        """No clause fails (transitivity may be unstateable)."""
        return self.reflexive and self.symmetric and self.transitive is not False

    def report(self) -> Report:
        rep = Report(f"equivalence relation {self.rho} on {self.obj}")
        rep.ok_if("reflexive", self.reflexive, witness=self.witnesses.get("reflexive"))
        rep.ok_if("symmetric", self.symmetric, witness=self.witnesses.get("symmetric"))
        if self.transitive is None:
            rep.add("transitive", UNSTATEABLE, "A x A x A outside the window")
        else:
            rep.ok_if("transitive", self.transitive, witness=self.witnesses.get("transitive"))
        return rep


def relation_flags(P: Doctrine, a: str) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Reflexive, symmetric and transitive masks over all of P(A x A)."""
    sq = P.base.square(a)
    if sq is None:
        raise ProductUndefined(a, a)
    L = P.fibers[sq]
    r = np.arange(len(L))
    refl = L.leq[P.delta_idx(a), r]
    swap, t, apex = _rel_maps(P, a)
    sym = L.leq[r, swap[r]]
    trans = None
    if t is not None:
        p12, p23, p13 = t
        L3 = P.fibers[apex]
        trans = L3.leq[L3.meet_table[p12[r], p23[r]], p13[r]]
    return refl, sym, trans


def is_equivalence_relation(P: Doctrine, a: str, rho) -> EqRelWitness:
    sq = P.base.square(a)
    if sq is None:
        raise ProductUndefined(a, a)
    L = P.fibers[sq]
    r = _idx(P, sq, rho)
    refl, sym, trans = relation_flags(P, a)
    swap, t, apex = _rel_maps(P, a)
    wit = {}
    if not refl[r]:
        wit["reflexive"] = {"delta": L.elements[P.delta_idx(a)], "rho": L.elements[r]}
    if not sym[r]:
        wit["symmetric"] = {"rho": L.elements[r], "swapped": L.elements[swap[r]]}
    tr = None if trans is None else bool(trans[r])
    if tr is False:
        p12, p23, p13 = t
        L3 = P.fibers[apex]
        wit["transitive"] = {"composite": L3.elements[L3.meet_table[p12[r], p23[r]]],
                             "target": L3.elements[p13[r]]}
    return EqRelWitness(a, L.elements[r], bool(refl[r]), bool(sym[r]), tr, wit)


def equivalence_relations(P: Doctrine, a: str, allow_unstateable: bool = True) -> list[int]:
    """Indices of the equivalence relations on A (transitivity unstateable counts as admissible if allowed)."""
    refl, sym, trans = relation_flags(P, a)
    ok = refl & sym
    if trans is not None:
        ok &= trans
    elif not allow_unstateable:
        ok &= False
    return np.nonzero(ok)[0].tolist()


def kernel_idx(P: Doctrine, f: str) -> int:
    C = P.base
    ff = C.product_map(f, f)
    return int(P.rx(ff)[P.delta_idx(C.cod[f])])


def kernel(P: Doctrine, f: str) -> str:
    C = P.base
    return P.fibers[C.square(C.dom[f])].elements[kernel_idx(P, f)]


def kernels_of_hom(P: Doctrine, x: int, z: int) -> np.ndarray:
    """Kernel index for every arrow of hom(x, z), cached; -1 where unstateable."""
    key = ("ker", x, z)
    c = _cache(P)
    if key not in c:
        C = P.base
        hs = C.hom_idx(x, z)
        out = np.full(len(hs), -1, dtype=np.int64)
        X, Z = C.objects[x], C.objects[z]
        if C.square(X) is not None and C.square(Z) is not None and P.has_delta(Z):
            d = P.delta_idx(Z)
            for k, h in enumerate(hs.tolist()):
                out[k] = P.R[C.index[C.product_map(C.arrows[h], C.arrows[h])]][d]
        c[key] = out
    return c[key]


# -- quotients ---------------------------------------------------------------------

@dataclass
class QuotientWitness:
    arrow: str
    factorizations: dict[str, str]
    effective: bool
    unstateable_targets: int = 0


def _compatible(P: Doctrine, x: int, z: int, r: int) -> np.ndarray:
    """Mask over hom(x, z): rho <= kernel(g)."""
    ker = kernels_of_hom(P, x, z)
    L = P.fibers[P.base.square(P.base.objects[x])]
    return (ker >= 0) & L.leq[r, np.maximum(ker, 0)]


def _universal(P: Doctrine, a: int, r: int, q: int) -> tuple[bool, dict, dict, int]:
    """Unique factorization of every compatible g through q."""
    C = P.base
    c = int(C.cod_i[q])
    facts, unst = {}, 0
    for z in range(len(C.objects)):
        Z = C.objects[z]
        if C.square(Z) is None or not P.has_delta(Z):
            unst += int(len(C.hom_idx(a, z)) > 0)
            continue
        gs = C.hom_idx(a, z)
        if not len(gs):
            continue
        gs = gs[_compatible(P, a, z, r)]
        if not len(gs):
            continue
        hs = C.hom_idx(c, z)
        comps = C.compose_idx(hs, q)
        hits = comps[:, None] == gs[None, :]
        counts = hits.sum(axis=0)
        if (counts != 1).any():
            k = int(np.argmax(counts != 1))
            return False, {}, {"g": C.arrows[gs[k]], "factorizations": int(counts[k])}, unst
        for k, g in enumerate(gs.tolist()):
            facts[C.arrows[g]] = C.arrows[hs[int(np.argmax(hits[:, k]))]]
    return True, facts, {}, unst


def find_quotients(P: Doctrine, a: str, rho, candidates: Sequence[str] | None = None) -> list[QuotientWitness]:
    C = P.base
    ai = C.obj_index[a]
    r = _idx(P, C.square(a), rho)
    L = P.fibers[C.square(a)]
    out = []
    if candidates is None:
        cands = [int(q) for q in C.hom_idx_from(ai)]
    else:
        cands = [C.index[q] for q in candidates]
    for q in cands:
        ci = int(C.cod_i[q])
        if C.square(C.objects[ci]) is None or not P.has_delta(C.objects[ci]):
            continue
        hs = C.hom_idx(ai, ci)
        ker = kernels_of_hom(P, ai, ci)[int(C.pos[q])]
        if not L.leq[r, ker]:
            continue
        ok, facts, _, unst = _universal(P, ai, r, q)
        if ok:
            out.append(QuotientWitness(C.arrows[q], facts, bool(ker == r), unst))
        del hs
    return out


def is_effective(P: Doctrine, a: str, rho, q: str) -> bool:
    return kernel_idx(P, q) == _idx(P, P.base.square(a), rho)


def check_quotient(P: Doctrine, a: str, rho, q: str) -> Report:
    C = P.base
    rep = Report(f"quotient {q}")
    r = _idx(P, C.square(a), rho)
    L = P.fibers[C.square(a)]
    ker = kernel_idx(P, q)
    rep.ok_if("compatible", bool(L.leq[r, ker]), "rho <= kernel(q)",
              witness={"rho": L.elements[r], "kernel": L.elements[ker]})
    ok, facts, wit, unst = _universal(P, C.obj_index[a], r, C.index[q])
    rep.ok_if("universal", ok, "unique factorization of compatible arrows", witness=wit, checked=len(facts))
    if unst:
        rep.add("universal.unstateable", UNSTATEABLE, "targets without a square", checked=unst)
    return rep


def is_stable_quotient(P: Doctrine, a: str, rho, q: str) -> Report:
    C = P.base
    rep = Report(f"stability of {q}")
    r = _idx(P, C.square(a), rho)
    c = C.obj_index[C.cod[q]]
    n_ok, n_un, bad = 0, 0, []
    for f in C.hom_idx_to(c).tolist():
        for sq in C.find_pullbacks(q, C.arrows[f]):
            apex = sq.apex
            if C.square(apex) is None or C.square(C.cod[sq.p2]) is None or not P.has_delta(C.cod[sq.p2]):
                n_un += 1
                continue
            # pulled-back relation: related along the leg to A and identified in C'
            ai = C.obj_index[apex]
            L2 = P.fibers[C.square(apex)]
            k = kernels_of_hom(P, ai, C.obj_index[C.cod[sq.p2]])[int(C.pos[C.index[sq.p2]])]
            r2 = int(L2.meet_table[P.rx(C.product_map(sq.p1, sq.p1))[r], k])
            ok = _universal(P, ai, r2, C.index[sq.p2])[0]
            n_ok += 1
            if not ok:
                bad.append({"along": C.arrows[f], "square": [sq.apex, sq.p1, sq.p2]})
    if n_ok == 0:
        rep.add("stable", VACUOUS, "no stateable pullback square", checked=n_un)
    else:
        rep.ok_if("stable", not bad, "pulled-back arrow is a quotient of the pulled-back relation",
                  witness=bad[:3], checked=n_ok)
    if n_un:
        rep.add("stable.unstateable", UNSTATEABLE, "squares whose apex has no square", checked=n_un)
    return rep


# -- descent ---------------------------------------------------------------------

def descent_mask(P: Doctrine, a: str, rho) -> np.ndarray:
    C = P.base
    cell = C.product(a, a)
    r = _idx(P, cell.apex, rho)
    L = P.fibers[cell.apex]
    p1, p2 = P.rx(cell.pr1), P.rx(cell.pr2)
    return L.leq[L.meet_table[p1, r], p2]


def descent_data(P: Doctrine, a: str, rho) -> InfSemilattice:
    return sub_infsl(P.fibers[a], descent_mask(P, a, rho))


def _descent_lines(P: Doctrine, f: str, effective: bool) -> Report:
    C = P.base
    rep = Report(f"{'effective ' if effective else ''}descent {f}")
    A, B = C.dom[f], C.cod[f]
    if C.square(A) is None or C.square(B) is None or not P.has_delta(B):
        rep.add("kernel", UNSTATEABLE, "kernel outside the window")
        return rep
    chi = kernel_idx(P, f)
    mask = descent_mask(P, A, chi)
    img = P.rx(f)
    rep.ok_if("lands_in_descent_data", bool(mask[img].all()), witness=None)
    LA, LB = P.fibers[A], P.fibers[B]
    refl = LB.leq | ~LA.leq[img[:, None], img[None, :]]
    wit = None
    if not refl.all():
        i, j = np.argwhere(~refl)[0]
        wit = [LB.elements[i], LB.elements[j]]
    rep.ok_if("order_reflecting", bool(refl.all()), "P_f(b) <= P_f(b') implies b <= b'", witness=wit,
              checked=len(LB) ** 2)
    if effective:
        missing = sorted(set(np.nonzero(mask)[0].tolist()) - set(img.tolist()))
        rep.ok_if("surjective", not missing, "every descent datum is a reindexed predicate",
                  witness=[LA.elements[m] for m in missing[:3]], checked=int(mask.sum()))
    return rep


def is_descent(P: Doctrine, f: str) -> Report:
    return _descent_lines(P, f, effective=False)


def is_effective_descent(P: Doctrine, f: str) -> Report:
    return _descent_lines(P, f, effective=True)


def quotient_sweep(P: Doctrine, objects: Sequence[str] | None = None, stability: bool = True) -> Report:
    """Every equivalence relation has a quotient; it is descent, effective descent, stable; relations effective."""
    C = P.base
    rep = Report(f"quotients {P.name}")
    objs = [o for o in (objects or C.objects) if C.square(o) is not None and P.has_delta(o)]
    counts = {k: 0 for k in ("rels", "exist", "descent", "eff_descent", "stable", "effective", "unstateable")}
    bad = {k: [] for k in ("exist", "descent", "eff_descent", "stable", "effective")}
    stable_checked = 0
    for a in objs:
        L = P.fibers[C.square(a)]
        refl, sym, trans = relation_flags(P, a)
        if trans is None:
            counts["unstateable"] += int((refl & sym).sum())
            continue
        for r in np.nonzero(refl & sym & trans)[0].tolist():
            counts["rels"] += 1
            qs = find_quotients(P, a, r)
            if not qs:
                bad["exist"].append({"object": a, "rho": L.elements[r]})
                continue
            q = qs[0]
            if not is_descent(P, q.arrow).ok:
                bad["descent"].append(q.arrow)
            if not is_effective_descent(P, q.arrow).ok:
                bad["eff_descent"].append(q.arrow)
            if not q.effective:
                bad["effective"].append({"object": a, "rho": L.elements[r], "quotient": q.arrow})
            if stability:
                s = is_stable_quotient(P, a, r, q.arrow)
                if not s.ok:
                    bad["stable"].append(q.arrow)
                stable_checked += sum(ln.checked for ln in s.lines if ln.check == "stable")
    n = counts["rels"]
    if n == 0:
        rep.add("quotients.exist", VACUOUS, "no stateable equivalence relation")
    else:
        rep.ok_if("quotients.exist", not bad["exist"], witness=bad["exist"][:3], checked=n)
        rep.ok_if("quotients.descent", not bad["descent"], witness=bad["descent"][:3], checked=n)
        rep.ok_if("quotients.effective_descent", not bad["eff_descent"], witness=bad["eff_descent"][:3], checked=n)
        rep.ok_if("relations.effective", not bad["effective"], witness=bad["effective"][:3], checked=n)
        if stability:
            rep.ok_if("quotients.stable", not bad["stable"], witness=bad["stable"][:3], checked=stable_checked)
    if counts["unstateable"]:
        rep.add("quotients.unstateable", UNSTATEABLE, "relations whose transitivity is unstateable",
                checked=counts["unstateable"])
    return rep


# -- comprehensions ------------------------------------------------------------

def hom_sizes(C: CatWindow) -> np.ndarray:
    if not hasattr(C, "_hom_sizes"):
        n = len(C.objects)
        H = np.zeros((n, n), dtype=np.int64)
        for (x, y), h in C._hom.items():
            H[x, y] = len(h)
        C._hom_sizes = H
    return C._hom_sizes


def _satisfying(P: Doctrine, a: int, alpha: int) -> list[np.ndarray]:
    """Per object Y: the arrows f: Y -> A with P_f(alpha) = top."""
    C = P.base
    out = []
    for y in range(len(C.objects)):
        hs = C.hom_idx(y, a)
        if not len(hs):
            out.append(hs)
            continue
        S = P.stack(y, a)
        out.append(hs[S[:, alpha] == P.fiber_i(y).top])
    return out


def _is_comprehension_idx(P: Doctrine, c: int, alpha: int, sat: list[np.ndarray], mode: str) -> bool:
    C = P.base
    x = int(C.dom_i[c])
    if P.R[c][alpha] != P.fiber_i(x).top:
        return False
    # arrow ids are global, so every domain can be compared in one go
    comps = C.compose_idx(c, C.hom_idx_to(x))
    want = np.concatenate(sat) if sat else np.zeros(0, dtype=np.int64)
    if mode == "strong":
        return len(comps) == len(want) and np.array_equal(np.sort(comps), np.sort(want))
    mark = np.zeros(len(C.arrows), dtype=bool)
    mark[comps[comps >= 0]] = True
    return bool(mark[want].all())


def find_comprehension(P: Doctrine, a: str, alpha, mode: str = "strong",
                       candidates: Sequence[str] | None = None, first: bool = False) -> list[str]:
    """Comprehensions of alpha among the candidates; with ``first`` only the least arrow id."""
    if mode not in ("strong", "weak"):
        raise ValueError("mode must be 'strong' or 'weak'")
    C = P.base
    ai = C.obj_index[a]
    al = _idx(P, a, alpha)
    sat = _satisfying(P, ai, al)
    cnt = np.array([len(s) for s in sat])
    H = hom_sizes(C)
    if candidates is not None:
        cands = [C.index[c] for c in candidates]
    else:
        if mode == "strong":
            xs = np.nonzero((H == cnt[:, None]).all(axis=0))[0]
        else:
            xs = np.nonzero(((H > 0) | (cnt[:, None] == 0)).all(axis=0))[0]
        cands = [int(c) for x in xs for c in C.hom_idx(int(x), ai)]
    if first:
        for c in sorted(cands):
            if _is_comprehension_idx(P, c, al, sat, mode):
                return [C.arrows[c]]
        return []
    return [C.arrows[c] for c in cands if _is_comprehension_idx(P, c, al, sat, mode)]


def is_comprehension(P: Doctrine, a: str, alpha, c: str, mode: str = "strong") -> bool:
    C = P.base
    al = _idx(P, a, alpha)
    return _is_comprehension_idx(P, C.index[c], al, _satisfying(P, C.obj_index[a], al), mode)


def comprehension_table(P: Doctrine, mode: str = "strong") -> dict[tuple[str, int], str | None]:
    """One comprehension (the least arrow id) per (object, predicate), or None."""
    key = ("cmp", mode)
    cache = _cache(P)
    if key not in cache:
        out = {}
        for a in P.base.objects:
            for al in range(len(P.fibers[a])):
                found = find_comprehension(P, a, al, mode, first=True)
                out[(a, al)] = found[0] if found else None
        cache[key] = out
    return cache[key]


def has_comprehensions(P: Doctrine, mode: str = "strong") -> Report:
    rep = Report(f"{mode} comprehensions {P.name}")
    tab = comprehension_table(P, mode)
    missing = [{"object": a, "predicate": P.fibers[a].elements[al]} for (a, al), c in tab.items() if c is None]
    rep.ok_if(f"comprehensions.{mode}", not missing, "every predicate has a comprehension",
              witness=missing[:3], checked=len(tab))
    return rep


def _factors_through(C: CatWindow, f: int, g: int) -> bool:
    hs = C.hom_idx(int(C.dom_i[f]), int(C.dom_i[g]))
    return bool((C.compose_idx(g, hs) == f).any())


def has_full_comprehensions(P: Doctrine) -> Report:
    rep = Report(f"full comprehensions {P.name}")
    strong = has_comprehensions(P, "strong")
    if not strong.ok:
        rep.add("comprehensions.full", FAIL, "comprehensions missing", witness=strong.failures()[0].witness)
        return rep
    tab = comprehension_table(P, "strong")
    C = P.base
    bad, n = [], 0
    for a in C.objects:
        L = P.fibers[a]
        cs = [C.index[tab[(a, al)]] for al in range(len(L))]
        for i in range(len(L)):
            for j in range(len(L)):
                if L.leq[i, j]:
                    continue
                n += 1
                if _factors_through(C, cs[i], cs[j]):
                    bad.append({"object": a, "alpha": L.elements[i], "beta": L.elements[j]})
    rep.ok_if("comprehensions.full", not bad, "factorization of comprehensions reflects the order",
              witness=bad[:3], checked=n)
    return rep


def has_comprehensive_diagonals(P: Doctrine) -> Report:
    rep = Report(f"comprehensive diagonals {P.name}")
    C = P.base
    objs = [a for a in C.objects if C.square(a) is not None and P.has_delta(a)]
    bad, agree_bad = [], []
    for a in objs:
        sq = C.square(a)
        d = C.diagonal(a)
        ci = C.index[d]
        sat_d = _satisfying(P, C.obj_index[sq], P.delta_idx(a))
        of_delta = _is_comprehension_idx(P, ci, P.delta_idx(a), sat_d, "strong")
        if not of_delta:
            bad.append(a)
        some = any(_is_comprehension_idx(P, ci, al, _satisfying(P, C.obj_index[sq], al), "strong")
                   for al in range(len(P.fibers[sq])))
        if some != of_delta:
            agree_bad.append(a)
    if not objs:
        rep.add("diagonals.comprehension", VACUOUS, "no object with a square")
        return rep
    rep.ok_if("diagonals.comprehension", not bad, "each diagonal is the comprehension of equality",
              witness=bad[:3], checked=len(objs))
    rep.ok_if("diagonals.characterization", not agree_bad,
              "a diagonal is a comprehension iff it is the comprehension of equality",
              witness=agree_bad[:3], checked=len(objs))
    no_sq = len(C.objects) - len(objs)
    if no_sq:
        rep.add("diagonals.unstateable", UNSTATEABLE, checked=no_sq)
    return rep


# -- sweeps of closure properties ------------------------------------------------------

def closure_sweep(P: Doctrine) -> Report:
    """Kernels are equivalence relations, reindexing preserves them, P_f lands in descent data."""
    C = P.base
    rep = Report(f"closure {P.name}")
    bad_k, bad_r, bad_d, n_k, n_r, n_un = [], [], [], 0, 0, 0
    flags = {}
    for o in C.objects:
        if C.square(o) is not None and P.has_delta(o):
            flags[o] = relation_flags(P, o)
    for f in C.arrows:
        A, B = C.dom[f], C.cod[f]
        if A not in flags or B not in flags:
            continue
        k = kernel_idx(P, f)
        refl, sym, trans = flags[A]
        n_k += 1
        ok = refl[k] and sym[k] and (trans is None or trans[k])
        if trans is None:
            n_un += 1
        if not ok:
            bad_k.append(f)
        mask = descent_mask(P, A, k)
        if not mask[P.rx(f)].all():
            bad_d.append(f)
        ff = P.rx(C.product_map(f, f))
        rb, sb, tb = flags[B]
        if tb is None:
            n_un += 1
            continue
        for s in np.nonzero(rb & sb & tb)[0].tolist():
            t = ff[s]
            n_r += 1
            if not (refl[t] and sym[t] and (trans is None or trans[t])):
                bad_r.append({"arrow": f, "relation": P.fibers[C.square(B)].elements[s]})
    rep.ok_if("kernel.equivalence", not bad_k, "kernels are equivalence relations", witness=bad_k[:3], checked=n_k)
    rep.ok_if("reindex.preserves_equivalence", not bad_r, witness=bad_r[:3], checked=n_r)
    rep.ok_if("reindex.lands_in_descent", not bad_d, "P_f lands in the descent data of its kernel",
              witness=bad_d[:3], checked=n_k)
    if n_un:
        rep.add("closure.unstateable", UNSTATEABLE, "triple products outside the window", checked=n_un)
    return rep

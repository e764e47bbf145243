"""Doctrines over category windows, their elementary structure, and 1-/2-arrows."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .fincat import CatWindow, FunctorData, ProductUndefined, WindowError, check_category, check_functor
from .infsl import InfSemilattice, check_infsl, enumerate_homs, hom_violation
from .report import ERROR, FAIL, INFO, PASS, UNSTATEABLE, VACUOUS, Report


class DoctrineError(Exception):
    pass


class DeltaMissing(DoctrineError):
    pass


class Doctrine:
    """A window, a fiber per object, a reindexing map per arrow, optional delta.

    ``reindex[f]`` maps indices of P(cod f) to indices of P(dom f).  ``delta``
    maps an object A to the label of its equality predicate in P(A x A).
    """

    def __init__(self, base: CatWindow, fibers: Mapping[str, InfSemilattice],
                 reindex: Mapping[str, Sequence[int] | Mapping[str, str]] | Sequence[np.ndarray],
                 delta: Mapping[str, str] | None = None, name: str = "",
                 provenance: Mapping | None = None):
        self.base = base
        self.name = name or base.name
        self.fibers = dict(fibers)
        self.delta = dict(delta or {})
        self.provenance = dict(provenance or {})
        self.structural_errors: list = []
        for o in base.objects:
            if o not in self.fibers:
                self.structural_errors.append({"object": o, "fiber": None})
        self.R: list[np.ndarray | None] = [None] * len(base.arrows)
        if isinstance(reindex, Mapping):
            items = reindex.items()
        else:
            items = ((base.arrows[i], m) for i, m in enumerate(reindex))
        for a, m in items:
            i = base.index.get(a)
            if i is None:
                self.structural_errors.append({"reindex": a, "dangling": True})
                continue
            if isinstance(m, Mapping):
                src = self.fibers.get(base.cod[a])
                tgt = self.fibers.get(base.dom[a])
                try:
                    m = [tgt.index[m[e]] for e in src.elements]
                except (KeyError, AttributeError):
                    self.structural_errors.append({"reindex": a, "bad_map": True})
                    continue
            self.R[i] = np.asarray(m, dtype=np.int64)
        for o, e in zip(base.objects, base.id_i):
            if e >= 0 and self.R[e] is None and o in self.fibers:
                self.R[e] = np.arange(len(self.fibers[o]), dtype=np.int64)
        for i, m in enumerate(self.R):
            if m is None:
                self.structural_errors.append({"reindex": base.arrows[i], "missing": True})
        for o, lab in self.delta.items():
            sq = base.square(o) if o in base.obj_index else None
            if sq is None or lab not in self.fibers.get(sq, InfSemilattice([], np.zeros((0, 0)))).index:
                self.structural_errors.append({"delta": o, "label": lab})
        self._stacks: dict[tuple[int, int], np.ndarray] = {}

    def __repr__(self) -> str:
        return f"Doctrine({self.name!r}, {self.base!r})"

    # -- access ----------------------------------------------------------------
    def fiber(self, a: str) -> InfSemilattice:
        return self.fibers[a]

    def fiber_i(self, x: int) -> InfSemilattice:
        return self.fibers[self.base.objects[x]]

    def rx(self, f: str) -> np.ndarray:
        return self.R[self.base.index[f]]

    def apply(self, f: str, label: str) -> str:
        src = self.fibers[self.base.cod[f]]
        tgt = self.fibers[self.base.dom[f]]
        return tgt.elements[self.rx(f)[src.index[label]]]

    def apply_idx(self, f: str, i):
        return self.rx(f)[i]

    def top(self, a: str) -> int:
        return self.fibers[a].top

    def meet(self, a: str, x, y):
        return self.fibers[a].meet_table[x, y]

    def le(self, a: str, x, y) -> bool:
        return bool(self.fibers[a].leq[x, y])

    def delta_idx(self, a: str) -> int:
        if a not in self.delta:
            raise DeltaMissing(f"delta-missing: no equality predicate on {a}")
        return self.fibers[self.base.square(a)].index[self.delta[a]]

    def has_delta(self, a: str) -> bool:
        return a in self.delta

    def stack(self, x: int, y: int) -> np.ndarray:
        """Reindexing maps of hom(x, y) stacked as rows."""
        key = (x, y)
        if key not in self._stacks:
            hs = self.base.hom_idx(x, y)
            width = len(self.fiber_i(y))
            self._stacks[key] = (np.stack([self.R[h] for h in hs]) if len(hs)
                                 else np.zeros((0, width), dtype=np.int64))
        return self._stacks[key]

    def with_changes(self, *, reindex: Mapping[str, Sequence[int]] | None = None,
                     delta: Mapping[str, str] | None = None, fibers=None, name=None) -> "Doctrine":
        """Copy with some reindexing maps, deltas or fibers replaced (used to build mutants)."""
        R = {a: self.R[i] for i, a in enumerate(self.base.arrows) if self.R[i] is not None}
        for a, m in (reindex or {}).items():
            R[a] = np.asarray(m, dtype=np.int64) if not isinstance(m, Mapping) else m
        d = dict(self.delta)
        d.update(delta or {})
        fb = dict(self.fibers)
        fb.update(fibers or {})
        return Doctrine(self.base, fb, R, d, name=name or self.name, provenance=self.provenance)


# -- derived formulas --------------------------------------------------------

def exists_along_diagonal(P: Doctrine, a: str, alpha: str) -> str:
    """P_pr1(alpha) meet delta_A in P(A x A)."""
    C = P.base
    cell = C.product(a, a)
    d = P.delta_idx(a)
    x = P.rx(cell.pr1)[P.fibers[a].index[alpha]]
    return P.fibers[cell.apex].elements[P.meet(cell.apex, x, d)]


def _e_maps(C: CatWindow, x: str, a: str):
    e = C.tuple_map([1, 2, 2], [x, a])
    p12 = C.tuple_map([1, 2], [x, a, a])
    p23 = C.tuple_map([2, 3], [x, a, a])
    return e, p12, p23


def exists_along_e(P: Doctrine, x: str, a: str, alpha: str) -> str:
    """P_<pr1,pr2>(alpha) meet P_<pr2,pr3>(delta_A) in P(X x A x A)."""
    C = P.base
    e, p12, p23 = _e_maps(C, x, a)
    xa = C.product(x, a).apex
    top3 = C.dom[p12]
    u = P.rx(p12)[P.fibers[xa].index[alpha]]
    v = P.rx(p23)[P.delta_idx(a)]
    return P.fibers[top3].elements[P.meet(top3, u, v)]


def quad_projections(C: CatWindow, x1: str, x2: str, y1: str, y2: str) -> tuple[str, str, str, str, str]:
    """Apex and the four projections of (X1 x X2) x (Y1 x Y2)."""
    left, right = C.product(x1, x2), C.product(y1, y2)
    outer = C.product(left.apex, right.apex)
    return (outer.apex, C.compose(left.pr1, outer.pr1), C.compose(left.pr2, outer.pr1),
            C.compose(right.pr1, outer.pr2), C.compose(right.pr2, outer.pr2))


def boxtimes_idx(P: Doctrine, a1: int, f1: tuple[str, str], a2: int, f2: tuple[str, str]) -> tuple[str, int]:
    """alpha1 [X1xY1] boxtimes alpha2 [X2xY2], living over (X1 x X2) x (Y1 x Y2)."""
    C = P.base
    (x1, y1), (x2, y2) = f1, f2
    apex, p1, p2, p3, p4 = quad_projections(C, x1, x2, y1, y2)
    m13 = C.pair(p1, p3)
    m24 = C.pair(p2, p4)
    if C.cod[m13] != C.product(x1, y1).apex or C.cod[m24] != C.product(x2, y2).apex:
        raise WindowError("boxtimes: projections do not land in the factor products")
    u = P.rx(m13)[a1]
    v = P.rx(m24)[a2]
    return apex, int(P.meet(apex, u, v))


def boxtimes(P: Doctrine, alpha1: str, f1: tuple[str, str], alpha2: str, f2: tuple[str, str]) -> str:
    C = P.base
    i1 = P.fibers[C.product(*f1).apex].index[alpha1]
    i2 = P.fibers[C.product(*f2).apex].index[alpha2]
    apex, k = boxtimes_idx(P, i1, f1, i2, f2)
    return P.fibers[apex].elements[k]


# -- checks -------------------------------------------------------------------

def check_doctrine(P: Doctrine, check_base: bool = True) -> Report:
    rep = Report(f"doctrine {P.name}")
    C = P.base
    if check_base:
        base_rep = check_category(C)
        rep.extend(base_rep, "base.")
        if not base_rep.ok:
            return rep
    if P.structural_errors:
        rep.add("structure", ERROR, "malformed doctrine data", witness=P.structural_errors[:5])
        return rep
    bad_fibers = []
    for o in C.objects:
        fr = check_infsl(P.fibers[o])
        if not fr.ok:
            bad_fibers.append({"object": o, "failures": [ln.check for ln in fr.failures()],
                               "witness": fr.failures()[0].witness})
    rep.ok_if("fibers.infsl", not bad_fibers, witness=bad_fibers[:3], checked=len(C.objects))
    if bad_fibers:
        return rep
    # reindexing maps are homomorphisms (vectorised per hom-set)
    n_obj = len(C.objects)
    hom_fail = None
    typed_fail = None
    for (x, y), hs in C._hom.items():
        S = P.stack(x, y)
        Fx, Fy = P.fiber_i(x), P.fiber_i(y)
        if S.shape[1] != len(Fy) or (S.size and ((S < 0).any() or (S >= len(Fx)).any())):
            typed_fail = C.arrows[hs[0]]
            break
        if not len(hs):
            continue
        bad_top = S[:, Fy.top] != Fx.top
        img_meet = S[:, Fy.meet_table]  # [h, a, b]
        want = Fx.meet_table[S[:, :, None], S[:, None, :]]
        bad_meet = (img_meet != want).any(axis=(1, 2))
        bad = bad_top | bad_meet
        if bad.any():
            k = int(np.argmax(bad))
            v = hom_violation(Fy, Fx, S[k])
            hom_fail = {"arrow": C.arrows[hs[k]], "law": v[0] if v else "?", "elements": v[1] if v else None}
            break
    if typed_fail:
        rep.add("reindex.typed", ERROR, "reindexing map has the wrong shape", witness=typed_fail)
        return rep
    rep.ok_if("reindex.homomorphism", hom_fail is None, witness=hom_fail, checked=len(C.arrows))
    id_bad = [o for o, e in zip(C.objects, C.id_i) if not np.array_equal(P.R[e], np.arange(len(P.fibers[o])))]
    rep.ok_if("functor.identity", not id_bad, witness=id_bad[:3], checked=n_obj)
    checked = 0
    fail = None
    for x, y, z in itertools.product(range(n_obj), repeat=3):
        fs, gs = C.hom_idx(x, y), C.hom_idx(y, z)
        if len(fs) == 0 or len(gs) == 0:
            continue
        gf = C.compose_block(x, y, z)
        Sxz, Sxy, Syz = P.stack(x, z), P.stack(x, y), P.stack(y, z)
        lhs = Sxz[C.pos[gf]]  # [g, f, e]
        rhs = Sxy[np.arange(len(fs))[None, :, None], Syz[:, None, :]]
        checked += gf.size
        if not np.array_equal(lhs, rhs):
            g, f, _ = np.argwhere(lhs != rhs)[0]
            fail = {"pair": [C.arrows[gs[g]], C.arrows[fs[f]]]}
            break
    rep.ok_if("functor.composition", fail is None, "P(g o f) = P(f) o P(g)", witness=fail, checked=checked)
    return rep


def check_elementary(P: Doctrine, frobenius: bool = True) -> Report:
    rep = Report(f"elementary {P.name}")
    C = P.base
    squares = [a for a in C.objects if C.square(a) is not None]
    no_sq = [a for a in C.objects if C.square(a) is None]
    if no_sq:
        rep.add("delta.unstateable", UNSTATEABLE, f"{len(no_sq)} objects without a square in the window",
                witness=no_sq[:6], checked=len(no_sq))
    missing = [a for a in squares if not P.has_delta(a)]
    rep.ok_if("delta.present", not missing, witness=missing, checked=len(squares))
    squares = [a for a in squares if P.has_delta(a)]
    # condition (i): Exists_diag -| P_diag
    fails = []
    for a in squares:
        sq = C.square(a)
        Fa, Fs = P.fibers[a], P.fibers[sq]
        cell = C.product(a, a)
        d = P.delta_idx(a)
        diag = C.diagonal(a)
        ex = Fs.meet_table[P.rx(cell.pr1), d]  # per alpha
        lhs = Fs.leq[ex, :]  # [alpha, theta]
        rhs = Fa.leq[:, P.rx(diag)]
        if not np.array_equal(lhs, rhs):
            al, th = np.argwhere(lhs != rhs)[0]
            fails.append({"object": a, "alpha": Fa.elements[al], "theta": Fs.elements[th]})
    rep.ok_if("adjunction.diagonal", not fails, "Exists_diag(alpha) <= theta iff alpha <= P_diag(theta)",
              witness=fails[:3], checked=len(squares))
    # condition (ii)
    fails, n_ok, n_un = [], 0, 0
    for x in C.objects:
        for a in squares:
            if not C.has_product(x, a, a):
                n_un += 1
                continue
            xa = C.product(x, a).apex
            e, p12, p23 = _e_maps(C, x, a)
            top3 = C.dom[p12]
            Fxa, F3 = P.fibers[xa], P.fibers[top3]
            ex = F3.meet_table[P.rx(p12), P.rx(p23)[P.delta_idx(a)]]
            lhs = F3.leq[ex, :]
            rhs = Fxa.leq[:, P.rx(e)]
            n_ok += 1
            if not np.array_equal(lhs, rhs):
                al, th = np.argwhere(lhs != rhs)[0]
                fails.append({"objects": [x, a], "alpha": Fxa.elements[al], "theta": F3.elements[th]})
    rep.ok_if("adjunction.e", not fails, "Exists_e(alpha) <= theta iff alpha <= P_e(theta)",
              witness=fails[:3], checked=n_ok)
    if n_un:
        rep.add("adjunction.e.unstateable", UNSTATEABLE, "X x A x A outside the window", checked=n_un)
    # derived facts
    bad = []
    for a in squares:
        if P.rx(C.diagonal(a))[P.delta_idx(a)] != P.fibers[a].top:
            bad.append(a)
    rep.ok_if("top_below_diagonal_reindex", not bad, "top <= P_diag(delta)", witness=bad, checked=len(squares))
    bad, n = [], 0
    sqset = set(squares)
    for f in C.arrows:
        A, B = C.dom[f], C.cod[f]
        if A not in sqset or B not in sqset:
            continue
        ff = C.product_map(f, f)
        n += 1
        if not P.le(C.square(A), P.delta_idx(A), P.rx(ff)[P.delta_idx(B)]):
            bad.append(f)
    rep.ok_if("delta_below_kernel", not bad, "delta_A <= P_{f x f}(delta_B)", witness=bad[:5], checked=n)
    bad, n, n_un = [], 0, 0
    for a in squares:
        for b in squares:
            ab = C.products.get((a, b))
            if ab is None or not P.has_delta(ab.apex) or C.square(ab.apex) is None:
                n_un += 1
                continue
            try:
                apex, k = boxtimes_idx(P, P.delta_idx(a), (a, a), P.delta_idx(b), (b, b))
            except (ProductUndefined, WindowError):
                n_un += 1
                continue
            n += 1
            if apex != C.square(ab.apex) or k != P.delta_idx(ab.apex):
                bad.append([a, b])
    rep.ok_if("delta_product", not bad, "delta_{AxB} = delta_A boxtimes delta_B", witness=bad[:5], checked=n)
    if n_un:
        rep.add("delta_product.unstateable", UNSTATEABLE, checked=n_un)
    if frobenius:
        bad, n = [], 0
        for a in squares:
            sq = C.square(a)
            Fa, Fs = P.fibers[a], P.fibers[sq]
            cell = C.product(a, a)
            d = P.delta_idx(a)
            ex = Fs.meet_table[P.rx(cell.pr1), d]
            diag = P.rx(C.diagonal(a))
            lhs = ex[Fa.meet_table[diag[:, None], np.arange(len(Fa))[None, :]]]  # [theta, alpha]
            rhs = Fs.meet_table[np.arange(len(Fs))[:, None], ex[None, :]]
            n += lhs.size
            if not np.array_equal(lhs, rhs):
                bad.append(a)
        rep.add("frobenius", INFO, "holds" if not bad else "does not hold (informational)",
                witness=bad or None, checked=n)
    return rep


# -- 1-arrows and 2-arrows ----------------------------------------------------

@dataclass
class DoctrineArrow:
    """(F, b): F a product preserving functor, b_A : P(A) -> R(F A) by index."""
    F: FunctorData
    b: dict[str, np.ndarray]
    name: str = ""

    def then(self, other: "DoctrineArrow") -> "DoctrineArrow":
        """Composite ``other`` after ``self``."""
        b = {}
        for a, m in self.b.items():
            fa = self.F.obj_map.get(a)
            if fa is not None and fa in other.b:
                b[a] = other.b[fa][m]
        return DoctrineArrow(self.F.then(other.F), b, f"{other.name}.{self.name}")

    def key(self) -> tuple:
        return (tuple(sorted(self.F.obj_map.items())), tuple(sorted(self.F.arr_map.items())),
                tuple((a, tuple(self.b[a].tolist())) for a in sorted(self.b)))


@dataclass
class Doctrine2Cell:
    """theta_A : F A -> G A in the codomain base, one per object of the domain."""
    theta: dict[str, str]


def identity_arrow(P: Doctrine) -> DoctrineArrow:
    return DoctrineArrow(FunctorData({o: o for o in P.base.objects}, {a: a for a in P.base.arrows}),
                         {o: np.arange(len(P.fibers[o]), dtype=np.int64) for o in P.base.objects}, "id")


def check_one_arrow(P: Doctrine, R: Doctrine, arrow: DoctrineArrow, check_functor_laws: bool = True) -> Report:
    rep = Report(f"1-arrow {P.name} -> {R.name}")
    C, D = P.base, R.base
    F = arrow.F
    if check_functor_laws:
        rep.extend(check_functor(F, C, D), "functor.")
        if not rep.ok:
            return rep
    dom_objs = F.domain_objects(C)
    missing = [a for a in dom_objs if a not in arrow.b]
    rep.ok_if("components.defined", not missing, witness=missing)
    if missing:
        return rep
    bad = []
    for a in dom_objs:
        m = arrow.b[a]
        v = hom_violation(P.fibers[a], R.fibers[F.obj_map[a]], m)
        if v is not None:
            bad.append({"object": a, "law": v[0], "elements": v[1]})
    rep.ok_if("components.homomorphism", not bad, witness=bad[:3], checked=len(dom_objs))
    if bad:
        return rep
    dset = set(dom_objs)
    bad, n = [], 0
    for f in C.arrows:
        A, B = C.dom[f], C.cod[f]
        if A not in dset or B not in dset:
            continue
        n += 1
        lhs = arrow.b[A][P.rx(f)]
        rhs = R.rx(F.arr_map[f])[arrow.b[B]]
        if not np.array_equal(lhs, rhs):
            k = int(np.argmax(lhs != rhs))
            bad.append({"arrow": f, "element": P.fibers[B].elements[k]})
    rep.ok_if("naturality", not bad, "b_A o P_f = R_{Ff} o b_B", witness=bad[:3], checked=n)
    bad, n, n_un = [], 0, 0
    for a in dom_objs:
        cell = C.products.get((a, a))
        if cell is None or cell.apex not in dset or not P.has_delta(a):
            continue
        fa = F.obj_map[a]
        if D.products.get((fa, fa)) is None or not R.has_delta(fa):
            n_un += 1
            continue
        t = D.pair(F.arr_map[cell.pr1], F.arr_map[cell.pr2])
        lhs = arrow.b[cell.apex][P.delta_idx(a)]
        rhs = R.rx(t)[R.delta_idx(fa)]
        n += 1
        if lhs != rhs:
            bad.append({"object": a, "image": R.fibers[F.obj_map[cell.apex]].elements[lhs],
                        "expected": R.fibers[F.obj_map[cell.apex]].elements[rhs]})
    rep.ok_if("equality_preserved", not bad, "b_{AxA}(delta_A) = R_<F pr1, F pr2>(delta_FA)",
              witness=bad[:3], checked=n)
    if n_un:
        rep.add("equality_preserved.unstateable", UNSTATEABLE, checked=n_un)
    return rep


def check_two_arrow(P: Doctrine, R: Doctrine, f1: DoctrineArrow, f2: DoctrineArrow,
                    cell: Doctrine2Cell) -> Report:
    rep = Report("2-arrow")
    C, D = P.base, R.base
    objs = [a for a in f1.F.domain_objects(C) if a in f2.F.obj_map]
    bad = [a for a in objs if cell.theta.get(a) not in D.index
           or D.dom[cell.theta[a]] != f1.F.obj_map[a] or D.cod[cell.theta[a]] != f2.F.obj_map[a]]
    rep.ok_if("components.typed", not bad, witness=bad[:3], checked=len(objs))
    if bad:
        return rep
    oset = set(objs)
    bad, n = [], 0
    for f in C.arrows:
        A, B = C.dom[f], C.cod[f]
        if A not in oset or B not in oset:
            continue
        n += 1
        if D.compose(f2.F.arr_map[f], cell.theta[A]) != D.compose(cell.theta[B], f1.F.arr_map[f]):
            bad.append(f)
    rep.ok_if("naturality", not bad, witness=bad[:3], checked=n)
    bad = []
    for a in objs:
        lhs = f1.b[a]
        rhs = R.rx(cell.theta[a])[f2.b[a]]
        le = R.fibers[f1.F.obj_map[a]].leq[lhs, rhs]
        if not le.all():
            k = int(np.argmin(le))
            bad.append({"object": a, "alpha": P.fibers[a].elements[k]})
    rep.ok_if("inequality", not bad, "b alpha <= R_theta(c alpha)", witness=bad[:3], checked=len(objs))
    return rep


# -- enumeration ----------------------------------------------------------------

class Budget:
    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0
        self.exceeded = False

    def tick(self, k: int = 1) -> bool:
        self.used += k
        if self.limit is not None and self.used > self.limit:
            self.exceeded = True
        return not self.exceeded


def enumerate_functors(C: CatWindow, D: CatWindow, budget: Budget,
                       objects: Sequence[str] | None = None,
                       products: bool = True) -> Iterator[FunctorData]:
    """All functors from the full subcategory of C on ``objects`` into D."""
    objs = list(objects) if objects is not None else list(C.objects)
    oidx = [C.obj_index[o] for o in objs]
    oset = set(oidx)
    arrs = [a for a in range(len(C.arrows)) if C.dom_i[a] in oset and C.cod_i[a] in oset]
    triples = []
    for x, y, z in itertools.product(oidx, repeat=3):
        fs, gs = C.hom_idx(x, y), C.hom_idx(y, z)
        if len(fs) == 0 or len(gs) == 0:
            continue
        blk = C.compose_block(x, y, z)
        for i, g in enumerate(gs.tolist()):
            for j, f in enumerate(fs.tolist()):
                triples.append((g, f, int(blk[i, j])))
    by_arrow = defaultdict(list)
    for t in triples:
        for a in set(t):
            by_arrow[a].append(t)
    ids = {int(C.id_i[x]) for x in oidx}
    free = [a for a in arrs if a not in ids]
    cells = [(k, c) for k, c in sorted(C.products.items())
             if all(C.obj_index[o] in oset for o in (k[0], k[1], c.apex))]

    for images in itertools.product(range(len(D.objects)), repeat=len(oidx)):
        if not budget.tick():
            return
        omap = dict(zip(oidx, images))
        amap = np.full(len(C.arrows), -1, dtype=np.int64)

        def assign(a, v, trail) -> bool:
            if amap[a] >= 0:
                return amap[a] == v
            if D.dom_i[v] != omap[int(C.dom_i[a])] or D.cod_i[v] != omap[int(C.cod_i[a])]:
                return False
            amap[a] = v
            trail.append(a)
            for g, f, h in by_arrow[a]:
                if amap[g] >= 0 and amap[f] >= 0:
                    w = int(D.compose_idx(amap[g], amap[f]))
                    if w < 0 or not assign(h, w, trail):
                        return False
            return True

        trail0: list = []
        if not all(assign(int(C.id_i[x]), int(D.id_i[omap[x]]), trail0) for x in oidx):
            continue

        def go(k):
            if budget.exceeded:
                return
            while k < len(free) and amap[free[k]] >= 0:
                k += 1
            if k == len(free):
                F = FunctorData({C.objects[x]: D.objects[omap[x]] for x in oidx},
                                {C.arrows[a]: D.arrows[amap[a]] for a in arrs})
                if products:
                    for (l, r), cell in cells:
                        ok, _ = D.is_product_cone(omap[C.obj_index[l]], omap[C.obj_index[r]],
                                                  omap[C.obj_index[cell.apex]],
                                                  int(amap[C.index[cell.pr1]]), int(amap[C.index[cell.pr2]]))
                        if not ok:
                            return
                yield F
                return
            a = free[k]
            for v in D.hom_idx(omap[int(C.dom_i[a])], omap[int(C.cod_i[a])]).tolist():
                if not budget.tick():
                    return
                trail: list = []
                if assign(a, v, trail):
                    yield from go(k + 1)
                for t in trail:
                    amap[t] = -1
                if budget.exceeded:
                    return

        yield from go(0)


def enumerate_one_arrows(P: Doctrine, R: Doctrine, budget: int | Budget | None = None,
                         objects: Sequence[str] | None = None) -> tuple[list[DoctrineArrow], bool]:
    """All 1-arrows P -> R (restricted to ``objects`` if given).

    Returns the list and whether the enumeration was exhaustive.
    """
    bud = budget if isinstance(budget, Budget) else Budget(budget)
    C = P.base
    out: list[DoctrineArrow] = []
    for F in enumerate_functors(C, R.base, bud, objects):
        objs = F.domain_objects(C)
        comps = {a: enumerate_homs(P.fibers[a], R.fibers[F.obj_map[a]]) for a in objs}
        arrows_between = defaultdict(list)
        for f in C.arrows:
            if C.dom[f] in F.obj_map and C.cod[f] in F.obj_map:
                arrows_between[(C.dom[f], C.cod[f])].append(f)
        delta_objs = {a for a in objs if (a, a) in C.products and P.has_delta(a)
                      and C.products[(a, a)].apex in F.obj_map}
        chosen: dict[str, np.ndarray] = {}

        def ok_with(a) -> bool:
            for b in chosen:
                for f in arrows_between[(a, b)] + ([] if a == b else arrows_between[(b, a)]):
                    A, B = C.dom[f], C.cod[f]
                    if not np.array_equal(chosen[A][P.rx(f)], R.rx(F.arr_map[f])[chosen[B]]):
                        return False
            for x in delta_objs:
                sq = C.products[(x, x)].apex
                if x in chosen and sq in chosen:
                    fx = F.obj_map[x]
                    if (fx, fx) not in R.base.products or not R.has_delta(fx):
                        continue
                    t = R.base.pair(F.arr_map[C.products[(x, x)].pr1], F.arr_map[C.products[(x, x)].pr2])
                    if chosen[sq][P.delta_idx(x)] != R.rx(t)[R.delta_idx(fx)]:
                        return False
            return True

        def go(k):
            if bud.exceeded:
                return
            if k == len(objs):
                out.append(DoctrineArrow(F, dict(chosen)))
                return
            a = objs[k]
            for m in comps[a]:
                if not bud.tick():
                    return
                chosen[a] = m
                if ok_with(a):
                    go(k + 1)
                del chosen[a]

        go(0)
        if bud.exceeded:
            break
    return out, not bud.exceeded


def enumerate_two_cells(P: Doctrine, R: Doctrine, f1: DoctrineArrow, f2: DoctrineArrow,
                        budget: Budget | None = None) -> list[Doctrine2Cell]:
    bud = budget or Budget(None)
    C, D = P.base, R.base
    objs = [a for a in f1.F.domain_objects(C) if a in f2.F.obj_map]
    cands = {}
    for a in objs:
        opts = []
        for t in D.hom(f1.F.obj_map[a], f2.F.obj_map[a]):
            if R.fibers[f1.F.obj_map[a]].leq[f1.b[a], R.rx(t)[f2.b[a]]].all():
                opts.append(t)
        cands[a] = opts
    arrows = [(f, C.dom[f], C.cod[f]) for f in C.arrows if C.dom[f] in cands and C.cod[f] in cands]
    out = []
    theta: dict[str, str] = {}

    def go(k):
        if k == len(objs):
            out.append(Doctrine2Cell(dict(theta)))
            return
        a = objs[k]
        for t in cands[a]:
            if not bud.tick():
                return
            theta[a] = t
            good = True
            for f, A, B in arrows:
                if A in theta and B in theta and (A == a or B == a):
                    if D.compose(f2.F.arr_map[f], theta[A]) != D.compose(theta[B], f1.F.arr_map[f]):
                        good = False
                        break
            if good:
                go(k + 1)
            del theta[a]

    go(0)
    return out

"""Finite category windows with a chosen, partial product structure.

A window stores arrows by string id.  Internally every arrow also has an
integer index and composition is evaluated on index arrays, so that checks
over every composable pair can be vectorised with numpy.

Two kinds of window exist:

* concrete windows carry an explicit composition table;
* derived windows (built by the completions) compose through a *root*
  concrete window: each arrow has a representative root arrow, and the
  composite of two arrows is the arrow of the right hom-set whose class
  contains the root composite of the representatives.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .report import ERROR, FAIL, INFO, PASS, VACUOUS, Report


class WindowError(Exception):
    """A window invariant that an operation relied on does not hold."""


class ProductUndefined(WindowError):
    def __init__(self, left: str, right: str):
        super().__init__(f"product-undefined: {left} x {right} is not in the window")
        self.left, self.right = left, right


@dataclass(frozen=True)
class ProductCell:
    apex: str
    pr1: str
    pr2: str


@dataclass(frozen=True)
class Square:
    """A commuting square over a cospan: apex with legs to the two feet."""
    apex: str
    p1: str
    p2: str


class CatWindow:
    def __init__(self, objects: Sequence[str], arrows: Sequence[str],
                 dom: Mapping[str, str], cod: Mapping[str, str],
                 identity: Mapping[str, str],
                 comp: Mapping[tuple[str, str], str] | None = None,
                 products: Mapping[tuple[str, str], ProductCell] | None = None,
                 name: str = "", *, table: np.ndarray | None = None,
                 derived: tuple | None = None, provenance: Mapping | None = None):
        self.name = name
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.dom = dict(dom)
        self.cod = dict(cod)
        self.identity = dict(identity)
        self.products = dict(products or {})
        self.provenance = dict(provenance or {})
        self.structural_errors: list[dict] = []
        self.obj_index = {o: i for i, o in enumerate(self.objects)}
        self.index = {a: i for i, a in enumerate(self.arrows)}
        if len(self.obj_index) != len(self.objects):
            self.structural_errors.append({"duplicate": "object ids"})
        if len(self.index) != len(self.arrows):
            self.structural_errors.append({"duplicate": "arrow ids"})
        n = len(self.arrows)
        self.dom_i = np.full(n, -1, dtype=np.int64)
        self.cod_i = np.full(n, -1, dtype=np.int64)
        for a, i in self.index.items():
            d, c = self.obj_index.get(self.dom.get(a)), self.obj_index.get(self.cod.get(a))
            if d is None or c is None:
                self.structural_errors.append({"arrow": a, "dangling": [self.dom.get(a), self.cod.get(a)]})
                continue
            self.dom_i[i], self.cod_i[i] = d, c
        self.id_i = np.full(len(self.objects), -1, dtype=np.int64)
        for o, i in self.obj_index.items():
            a = self.identity.get(o)
            if a not in self.index:
                self.structural_errors.append({"object": o, "identity": a})
                continue
            self.id_i[i] = self.index[a]
        for (l, r), cell in self.products.items():
            for ref in (l, r, cell.apex):
                if ref not in self.obj_index:
                    self.structural_errors.append({"product": [l, r], "dangling": ref})
            for ref in (cell.pr1, cell.pr2):
                if ref not in self.index:
                    self.structural_errors.append({"product": [l, r], "dangling": ref})
        order = np.lexsort((np.arange(n), self.cod_i, self.dom_i))
        self._hom: dict[tuple[int, int], np.ndarray] = {}
        self.pos = np.zeros(n, dtype=np.int64)
        for (d, c), grp in itertools.groupby(order.tolist(), key=lambda i: (int(self.dom_i[i]), int(self.cod_i[i]))):
            idx = np.array(list(grp), dtype=np.int64)
            self._hom[(d, c)] = idx
            self.pos[idx] = np.arange(len(idx))
        self._empty = np.zeros(0, dtype=np.int64)
        self._pair_cache: dict = {}
        self.derived = derived is not None
        if derived is not None:
            root, rep, lookup = derived
            self.root: CatWindow = root
            self.rep = np.asarray(rep, dtype=np.int64)
            self.lookup = lookup  # int array [dom obj, cod obj, root arrow] -> arrow or -1
            self.table = None
        else:
            self.root = self
            self.rep = np.arange(n, dtype=np.int64)
            self.lookup = None
            self.table = table if table is not None else self._table_from(comp or {})

    # -- construction helpers ------------------------------------------------
    def _table_from(self, comp: Mapping[tuple[str, str], str]) -> np.ndarray:
        n = len(self.arrows)
        t = np.full((n, n), -1, dtype=np.int64)
        for (g, f), h in comp.items():
            gi, fi, hi = self.index.get(g), self.index.get(f), self.index.get(h)
            if gi is None or fi is None or hi is None:
                self.structural_errors.append({"comp": [g, f, h], "dangling": True})
                continue
            if self.cod_i[fi] != self.dom_i[gi]:
                self.structural_errors.append({"comp": [g, f, h], "not_composable": True})
                continue
            t[gi, fi] = hi
        # composition with identities may be omitted; fill only missing cells
        for o in range(len(self.objects)):
            e = self.id_i[o]
            if e < 0:
                continue
            into = np.nonzero(self.cod_i == o)[0]
            out = np.nonzero(self.dom_i == o)[0]
            miss = t[e, into] < 0
            t[e, into[miss]] = into[miss]
            miss = t[out, e] < 0
            t[out[miss], e] = out[miss]
        return t

    def comp_dict(self, include_identities: bool = False) -> dict[tuple[str, str], str]:
        out = {}
        ids = set(self.id_i.tolist())
        for (x, y), fs in self._hom.items():
            for z in range(len(self.objects)):
                gs = self._hom.get((y, z))
                if gs is None:
                    continue
                block = self.compose_idx(gs[:, None], fs[None, :])
                for a, g in enumerate(gs):
                    for b, f in enumerate(fs):
                        if not include_identities and (g in ids or f in ids):
                            continue
                        h = block[a, b]
                        if h >= 0:
                            out[(self.arrows[g], self.arrows[f])] = self.arrows[h]
        return out

    def replace(self, *, comp_overrides: Mapping[tuple[str, str], str] | None = None,
                products: Mapping | None = None, name: str | None = None) -> "CatWindow":
        """Copy of a concrete window with some composition entries or products replaced."""
        if self.derived:
            raise WindowError("replace() needs a concrete window")
        t = self.table.copy()
        for (g, f), h in (comp_overrides or {}).items():
            t[self.index[g], self.index[f]] = self.index[h]
        return CatWindow(self.objects, self.arrows, self.dom, self.cod, self.identity,
                         products=self.products if products is None else products,
                         name=self.name if name is None else name, table=t,
                         provenance=self.provenance)

    # -- basic queries -------------------------------------------------------
    def hom_idx(self, x: int, y: int) -> np.ndarray:
        return self._hom.get((x, y), self._empty)

    def hom_idx_to(self, o: int) -> np.ndarray:
        return np.nonzero(self.cod_i == o)[0]

    def hom_idx_from(self, o: int) -> np.ndarray:
        return np.nonzero(self.dom_i == o)[0]

    def hom(self, x: str, y: str) -> list[str]:
        return [self.arrows[i] for i in self.hom_idx(self.obj_index[x], self.obj_index[y])]

    def n_composable_pairs(self) -> int:
        sizes = np.zeros((len(self.objects), len(self.objects)), dtype=np.int64)
        for (x, y), h in self._hom.items():
            sizes[x, y] = len(h)
        return int((sizes @ sizes).sum())

    def compose_idx(self, g, f) -> np.ndarray:
        """Elementwise g o f on broadcastable index arrays; -1 where undefined."""
        g = np.asarray(g, dtype=np.int64)
        f = np.asarray(f, dtype=np.int64)
        ok = (g >= 0) & (f >= 0)
        gg, ff = np.where(ok, g, 0), np.where(ok, f, 0)
        ok &= self.cod_i[ff] == self.dom_i[gg]
        if self.table is not None:
            out = self.table[gg, ff]
        else:
            rc = self.root.table[self.rep[gg], self.rep[ff]]
            out = np.where(rc >= 0, self.lookup[self.dom_i[ff], self.cod_i[gg], np.maximum(rc, 0)], -1)
        return np.where(ok, out, -1)

    def compose(self, g: str, f: str) -> str:
        h = int(self.compose_idx(self.index[g], self.index[f]))
        if h < 0:
            raise WindowError(f"composite {g} o {f} not in window")
        return self.arrows[h]

    def compose_block(self, x: int, y: int, z: int) -> np.ndarray:
        """Matrix of composites g o f for g in hom(y,z) (rows), f in hom(x,y) (cols)."""
        gs, fs = self.hom_idx(y, z), self.hom_idx(x, y)
        return self.compose_idx(gs[:, None], fs[None, :])

    def id_of(self, obj: str) -> str:
        return self.identity[obj]

    # -- products ------------------------------------------------------------
    def product(self, a: str, b: str) -> ProductCell:
        cell = self.products.get((a, b))
        if cell is None:
            raise ProductUndefined(a, b)
        return cell

    def has_product(self, *factors: str) -> bool:
        try:
            self.iterated_product(list(factors))
        except ProductUndefined:
            return False
        return True

    def pair(self, f: str, g: str) -> str:
        key = (f, g)
        if key in self._pair_cache:
            return self._pair_cache[key]
        if self.dom[f] != self.dom[g]:
            raise WindowError(f"pair: {f} and {g} have different domains")
        cell = self.product(self.cod[f], self.cod[g])
        hs = self.hom_idx(self.obj_index[self.dom[f]], self.obj_index[cell.apex])
        m1 = self.compose_idx(self.index[cell.pr1], hs) == self.index[f]
        m2 = self.compose_idx(self.index[cell.pr2], hs) == self.index[g]
        found = hs[m1 & m2]
        if len(found) != 1:
            raise WindowError(f"pair({f},{g}): {len(found)} mediating arrows (window invariant violated)")
        self._pair_cache[key] = out = self.arrows[int(found[0])]
        return out

    def pair_many(self, legs: Sequence[str]) -> str:
        """Left-associated tupling <a1,...,ak>."""
        acc = legs[0]
        for leg in legs[1:]:
            acc = self.pair(acc, leg)
        return acc

    def iterated_product(self, factors: Sequence[str]) -> tuple[str, list[str]]:
        """Apex and projections of the left-associated product of ``factors``."""
        apex, projs = factors[0], [self.identity[factors[0]]]
        for fac in factors[1:]:
            cell = self.product(apex, fac)
            projs = [self.compose(p, cell.pr1) for p in projs] + [cell.pr2]
            apex = cell.apex
        return apex, projs

    def tuple_map(self, spec: Sequence[int], factors: Sequence[str]) -> str:
        """<pr_{spec[0]}, ..., pr_{spec[-1]}> out of the iterated product of ``factors``.

        Indices are 1-based, e.g. ``[1, 2, 2]`` on ``[X, A]`` gives X*A -> X*A*A.
        """
        _, projs = self.iterated_product(factors)
        self.iterated_product([factors[i - 1] for i in spec])  # target must exist
        return self.pair_many([projs[i - 1] for i in spec])

    def product_map(self, f: str, g: str) -> str:
        """f x g : dom f * dom g -> cod f * cod g."""
        src = self.product(self.dom[f], self.dom[g])
        return self.pair(self.compose(f, src.pr1), self.compose(g, src.pr2))

    def diagonal(self, a: str) -> str:
        return self.pair(self.identity[a], self.identity[a])

    def square(self, a: str) -> str | None:
        cell = self.products.get((a, a))
        return None if cell is None else cell.apex

    # -- limits inside the window --------------------------------------------
    def is_product_cone(self, a: int, b: int, apex: int, l1: int, l2: int) -> tuple[bool, dict | None]:
        """Every cone over (a, b) factors uniquely through (apex, l1, l2)."""
        for y in range(len(self.objects)):
            hs = self.hom_idx(y, apex)
            fa, fb = self.hom_idx(y, a), self.hom_idx(y, b)
            want = len(fa) * len(fb)
            if len(hs) != want:
                return False, {"object": self.objects[y], "mediating": len(hs), "cones": want}
            if want == 0:
                continue
            u = self.compose_idx(l1, hs)
            v = self.compose_idx(l2, hs)
            if (u < 0).any() or (v < 0).any():
                return False, {"object": self.objects[y], "untyped_leg": True}
            code = self.pos[u] * len(fb) + self.pos[v]
            if len(np.unique(code)) != want:
                counts = np.bincount(code, minlength=want)
                k = int(np.argmax(counts != 1))
                return False, {"object": self.objects[y], "cone": [self.arrows[fa[k // len(fb)]], self.arrows[fb[k % len(fb)]]],
                               "mediating": int(counts[k])}
        return True, None

    def find_pullbacks(self, f: str, g: str, weak: bool = False) -> list[Square]:
        """All limit squares (or weakly terminal cones) over the cospan f, g."""
        fi, gi = self.index[f], self.index[g]
        a, b = int(self.dom_i[fi]), int(self.dom_i[gi])
        if self.cod_i[fi] != self.cod_i[gi]:
            raise WindowError("find_pullbacks: not a cospan")
        cones: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for y in range(len(self.objects)):
            us, vs = self.hom_idx(y, a), self.hom_idx(y, b)
            if len(us) == 0 or len(vs) == 0:
                cones[y] = (self._empty, self._empty)
                continue
            fu = self.compose_idx(fi, us)
            gv = self.compose_idx(gi, vs)
            ii, jj = np.nonzero(fu[:, None] == gv[None, :])
            cones[y] = (us[ii], vs[jj])
        out = []
        for x in range(len(self.objects)):
            cand_u, cand_v = cones[x]
            if len(cand_u) == 0:
                continue
            sizes_ok = all((len(self.hom_idx(y, x)) == len(cones[y][0])) if not weak
                           else (len(self.hom_idx(y, x)) >= len(cones[y][0]) and
                                 (len(cones[y][0]) == 0 or len(self.hom_idx(y, x)) > 0))
                           for y in cones)
            if not sizes_ok:
                continue
            for p1, p2 in zip(cand_u.tolist(), cand_v.tolist()):
                if self._cone_terminal(x, p1, p2, a, b, cones, weak):
                    out.append(Square(self.objects[x], self.arrows[p1], self.arrows[p2]))
        return out

    def _cone_terminal(self, x, p1, p2, a, b, cones, weak) -> bool:
        nb_total = len(self.arrows) + 1
        for y, (us, vs) in cones.items():
            hs = self.hom_idx(y, x)
            if len(us) == 0:
                continue
            u = self.compose_idx(p1, hs)
            v = self.compose_idx(p2, hs)
            got = u * nb_total + v
            want = us * nb_total + vs
            if weak:
                if not np.isin(want, got).all():
                    return False
            else:
                if len(hs) != len(us) or not np.isin(want, got).all() or len(np.unique(got)) != len(got):
                    return False
        return True

    def members(self, i: int) -> np.ndarray:
        """Root arrows in the class of arrow ``i`` (itself for concrete windows)."""
        if not self.derived:
            return np.array([i], dtype=np.int64)
        return np.nonzero(self.lookup[self.dom_i[i], self.cod_i[i]] == i)[0]

    def inverses(self, f: int) -> np.ndarray:
        """Two-sided inverses of arrow ``f``."""
        x, y = int(self.dom_i[f]), int(self.cod_i[f])
        gs = self.hom_idx(y, x)
        if not len(gs):
            return gs
        ok = (self.compose_idx(gs, f) == self.id_i[x]) & (self.compose_idx(f, gs) == self.id_i[y])
        return gs[ok]

    def isomorphic(self, x: int, y: int) -> int | None:
        """Some isomorphism x -> y, or None."""
        for f in self.hom_idx(x, y).tolist():
            if len(self.inverses(f)):
                return f
        return None

    def __repr__(self) -> str:
        return f"CatWindow({self.name!r}, {len(self.objects)} objects, {len(self.arrows)} arrows)"


def derived_window(objects, arrows, dom, cod, identity, products, root: CatWindow,
                   rep: Sequence[int], members: Mapping[int, Iterable[int]], name="",
                   provenance=None) -> CatWindow:
    """Window whose arrows are classes of root arrows.

    ``rep[i]`` is the root representative of arrow i; ``members[i]`` lists every
    root arrow in its class (a singleton unless the window is a quotient).
    """
    obj_index = {o: i for i, o in enumerate(objects)}
    lookup = np.full((len(objects), len(objects), len(root.arrows)), -1, dtype=np.int64)
    for i, a in enumerate(arrows):
        d, c = obj_index[dom[a]], obj_index[cod[a]]
        for r in members[i]:
            if lookup[d, c, r] >= 0:
                raise WindowError(f"root arrow {root.arrows[r]} lies in two classes of one hom-set")
            lookup[d, c, r] = i
    return CatWindow(objects, arrows, dom, cod, identity, products=products, name=name,
                     derived=(root, rep, lookup), provenance=provenance)


def check_category(C: CatWindow) -> Report:
    rep = Report(f"category {C.name}")
    if C.structural_errors:
        rep.add("structure", ERROR, "malformed ids", witness=C.structural_errors[:5],
                checked=len(C.structural_errors))
        return rep
    rep.add("structure", PASS, checked=len(C.arrows))
    ids_ok = all(C.dom_i[C.id_i[o]] == o and C.cod_i[C.id_i[o]] == o for o in range(len(C.objects)))
    rep.ok_if("identity.typed", ids_ok, witness=None)
    if C.derived:
        _check_derived(C, rep)
    else:
        _check_concrete(C, rep)
    for (l, r), cell in sorted(C.products.items()):
        a, b, p = C.obj_index[l], C.obj_index[r], C.obj_index[cell.apex]
        p1, p2 = C.index[cell.pr1], C.index[cell.pr2]
        typed = (C.dom_i[p1] == p and C.cod_i[p1] == a and C.dom_i[p2] == p and C.cod_i[p2] == b)
        if not typed:
            rep.add(f"product.{l}x{r}", FAIL, "projections mistyped", witness=[cell.pr1, cell.pr2])
            continue
        ok, wit = C.is_product_cone(a, b, p, p1, p2)
        rep.ok_if(f"product.{l}x{r}", ok, "unique pairing for every cone", witness=wit)
    if not C.products:
        rep.add("products", VACUOUS, "no product cells")
    return rep


def _check_concrete(C: CatWindow, rep: Report) -> None:
    t = C.table
    n = len(C.arrows)
    composable = C.cod_i[:, None] == C.dom_i[None, :]  # [f, g]: cod f == dom g
    comp_mask = composable.T  # [g, f]
    missing = comp_mask & (t < 0)
    extra = (~comp_mask) & (t >= 0)
    if missing.any():
        g, f = map(int, np.argwhere(missing)[0])
        rep.add("composition.total", FAIL, "missing composite", witness={"pair": [C.arrows[g], C.arrows[f]]},
                checked=int(comp_mask.sum()))
    else:
        rep.add("composition.total", PASS, checked=int(comp_mask.sum()))
    if extra.any():
        g, f = map(int, np.argwhere(extra)[0])
        rep.add("composition.domain", ERROR, "entry on non-composable pair",
                witness={"pair": [C.arrows[g], C.arrows[f]]})
    tt = np.where(t >= 0, t, 0)
    gi, fi = np.nonzero(comp_mask & (t >= 0))
    bad = (C.dom_i[tt[gi, fi]] != C.dom_i[fi]) | (C.cod_i[tt[gi, fi]] != C.cod_i[gi])
    if bad.any():
        k = int(np.argmax(bad))
        rep.add("composition.typed", FAIL, witness={"pair": [C.arrows[gi[k]], C.arrows[fi[k]]]})
    else:
        rep.add("composition.typed", PASS, checked=len(gi))
    ids = C.id_i
    into_ok = all((t[ids[o], C.hom_idx_to(o)] == C.hom_idx_to(o)).all() for o in range(len(C.objects)))
    out_ok = all((t[C.hom_idx_from(o), ids[o]] == C.hom_idx_from(o)).all() for o in range(len(C.objects)))
    if into_ok and out_ok:
        rep.add("unit", PASS, checked=2 * n)
    else:
        wit = None
        for o in range(len(C.objects)):
            for f in C.hom_idx_to(o):
                if t[ids[o], f] != f:
                    wit = {"pair": [C.arrows[ids[o]], C.arrows[f]]}
            for f in C.hom_idx_from(o):
                if t[f, ids[o]] != f:
                    wit = {"pair": [C.arrows[f], C.arrows[ids[o]]]}
        rep.add("unit", FAIL, witness=wit)
    if missing.any() or bad.any():
        rep.add("associativity", FAIL, "composition not total/typed; associativity not checked")
        return
    checked = 0
    objs = range(len(C.objects))
    for w, x, y in itertools.product(objs, objs, objs):
        fs, gs = C.hom_idx(w, x), C.hom_idx(x, y)
        if len(fs) == 0 or len(gs) == 0:
            continue
        gf = t[np.ix_(gs, fs)]
        for z in objs:
            hs = C.hom_idx(y, z)
            if len(hs) == 0:
                continue
            hg = t[np.ix_(hs, gs)]  # [h, g]
            lhs = t[hs[:, None, None], gf[None, :, :]]  # h o (g o f)
            rhs = t[hg[:, :, None], fs[None, None, :]]  # (h o g) o f
            checked += lhs.size
            if not np.array_equal(lhs, rhs):
                h, g, f = map(int, np.argwhere(lhs != rhs)[0])
                rep.add("associativity", FAIL,
                        witness={"triple": [C.arrows[hs[h]], C.arrows[gs[g]], C.arrows[fs[f]]]},
                        checked=checked)
                return
    rep.add("associativity", PASS, checked=checked)


def _check_derived(C: CatWindow, rep: Report) -> None:
    root = C.root
    # typing against the root object map
    under = {}
    for i, o in enumerate(C.objects):
        under[i] = int(root.dom_i[C.rep[C.id_i[i]]])
    typed = all(root.dom_i[C.rep[a]] == under[int(C.dom_i[a])] and root.cod_i[C.rep[a]] == under[int(C.cod_i[a])]
                for a in range(len(C.arrows)))
    rep.ok_if("representatives.typed", typed)
    id_ok = all(C.lookup[i, i, root.id_i[under[i]]] == C.id_i[i] for i in range(len(C.objects)))
    rep.ok_if("identity.class", id_ok, "root identity lies in the identity class")
    members_of: dict[tuple[int, int], np.ndarray] = {}
    objs = range(len(C.objects))
    for x in objs:
        for y in objs:
            members_of[(x, y)] = np.nonzero(C.lookup[x, y] >= 0)[0]
    checked = 0
    for x, y, z in itertools.product(objs, objs, objs):
        mf, mg = members_of[(x, y)], members_of[(y, z)]
        if len(mf) == 0 or len(mg) == 0:
            continue
        rc = root.table[np.ix_(mg, mf)]
        got = np.where(rc >= 0, C.lookup[x, z][np.maximum(rc, 0)], -1)
        checked += got.size
        if (got < 0).any():
            a, b = map(int, np.argwhere(got < 0)[0])
            rep.add("composition.closed", FAIL, "root composite outside every class",
                    witness={"pair": [root.arrows[mg[a]], root.arrows[mf[b]]], "objects": [C.objects[x], C.objects[z]]})
            return
        cls_g = C.lookup[y, z][mg]
        cls_f = C.lookup[x, y][mf]
        expect = C.compose_idx(cls_g[:, None], cls_f[None, :])
        if not np.array_equal(expect, got):
            a, b = map(int, np.argwhere(expect != got)[0])
            rep.add("composition.well_defined", FAIL, "composite depends on representatives",
                    witness={"pair": [root.arrows[mg[a]], root.arrows[mf[b]]]})
            return
    rep.add("composition.closed", PASS, checked=checked)
    rep.add("composition.well_defined", PASS, checked=checked)
    rep.add("unit", PASS, "identity classes contain root identities; root is unital")
    rep.add("associativity", INFO,
            "inherited: composition is the root composition on classes, checked closed and well defined")


def pair(C: CatWindow, f: str, g: str) -> str:
    return C.pair(f, g)


def tuple_map(C: CatWindow, spec: Sequence[int], factors: Sequence[str]) -> str:
    return C.tuple_map(spec, factors)


def find_pullbacks(C: CatWindow, f: str, g: str, weak: bool = False) -> list[Square]:
    return C.find_pullbacks(f, g, weak)


@dataclass
class FunctorData:
    """Object and arrow maps of a (possibly partial) functor between windows."""
    obj_map: dict[str, str]
    arr_map: dict[str, str]
    preserves_products: bool = True

    def domain_objects(self, C: CatWindow) -> list[str]:
        return [o for o in C.objects if o in self.obj_map]

    def arr_array(self, C: CatWindow, D: CatWindow) -> np.ndarray:
        out = np.full(len(C.arrows), -1, dtype=np.int64)
        for a, b in self.arr_map.items():
            if a in C.index and b in D.index:
                out[C.index[a]] = D.index[b]
        return out

    def then(self, G: "FunctorData") -> "FunctorData":
        """Composite G after self."""
        return FunctorData({o: G.obj_map[t] for o, t in self.obj_map.items() if t in G.obj_map},
                           {a: G.arr_map[t] for a, t in self.arr_map.items() if t in G.arr_map},
                           self.preserves_products and G.preserves_products)


def check_functor(F: FunctorData, C: CatWindow, D: CatWindow) -> Report:
    rep = Report(f"functor {C.name} -> {D.name}")
    bad_refs = [o for o, t in F.obj_map.items() if o not in C.obj_index or t not in D.obj_index]
    bad_refs += [a for a, t in F.arr_map.items() if a not in C.index or t not in D.index]
    if bad_refs:
        rep.add("structure", ERROR, "dangling ids in functor data", witness=bad_refs[:5])
        return rep
    defined = [C.obj_index[o] for o in F.domain_objects(C)]
    dset = set(defined)
    amap = F.arr_array(C, D)
    omap = np.full(len(C.objects), -1, dtype=np.int64)
    for o, t in F.obj_map.items():
        omap[C.obj_index[o]] = D.obj_index[t]
    need = [a for a in range(len(C.arrows)) if C.dom_i[a] in dset and C.cod_i[a] in dset]
    missing = [C.arrows[a] for a in need if amap[a] < 0]
    if missing:
        rep.add("arrows.defined", FAIL, witness=missing[:5])
        return rep
    rep.add("arrows.defined", PASS, checked=len(need))
    if len(defined) < len(C.objects):
        rep.add("partial", INFO, f"defined on {len(defined)} of {len(C.objects)} objects")
    need_a = np.array(need, dtype=np.int64)
    if len(need_a):
        ok = (D.dom_i[amap[need_a]] == omap[C.dom_i[need_a]]) & (D.cod_i[amap[need_a]] == omap[C.cod_i[need_a]])
        rep.ok_if("dom_cod", bool(ok.all()), witness=None if ok.all() else C.arrows[need_a[np.argmin(ok)]],
                  checked=len(need_a))
        if not ok.all():
            return rep
    id_bad = [C.objects[o] for o in defined if amap[C.id_i[o]] != D.id_i[omap[o]]]
    rep.ok_if("identities", not id_bad, witness=id_bad[:3], checked=len(defined))
    checked = 0
    for x, y, z in itertools.product(defined, defined, defined):
        fs, gs = C.hom_idx(x, y), C.hom_idx(y, z)
        if len(fs) == 0 or len(gs) == 0:
            continue
        gf = C.compose_block(x, y, z)
        lhs = amap[gf]
        rhs = D.compose_idx(amap[gs][:, None], amap[fs][None, :])
        checked += lhs.size
        if not np.array_equal(lhs, rhs):
            a, b = map(int, np.argwhere(lhs != rhs)[0])
            rep.add("composition", FAIL, witness={"pair": [C.arrows[gs[a]], C.arrows[fs[b]]]}, checked=checked)
            break
    else:
        rep.add("composition", PASS, checked=checked)
    if F.preserves_products:
        cells = [(k, c) for k, c in sorted(C.products.items())
                 if all(C.obj_index[o] in dset for o in (k[0], k[1], c.apex))]
        if not cells:
            rep.add("products.preserved", VACUOUS, "no product cell inside the domain")
        for (l, r), cell in cells:
            ok, wit = D.is_product_cone(int(omap[C.obj_index[l]]), int(omap[C.obj_index[r]]),
                                        int(omap[C.obj_index[cell.apex]]),
                                        int(amap[C.index[cell.pr1]]), int(amap[C.index[cell.pr2]]))
            rep.ok_if(f"products.preserved.{l}x{r}", ok, witness=wit)
    return rep


def identity_functor(C: CatWindow) -> FunctorData:
    return FunctorData({o: o for o in C.objects}, {a: a for a in C.arrows})


def check_full_faithful(F: FunctorData, C: CatWindow, D: CatWindow, full: bool = True,
                        faithful: bool = True) -> Report:
    """Hom-set maps of F on its domain objects are surjective / injective."""
    rep = Report(f"full and faithful {C.name} -> {D.name}")
    objs = F.domain_objects(C)
    bad_full, bad_faith, n = [], [], 0
    for x in objs:
        for y in objs:
            src = C.hom(x, y)
            img = [F.arr_map[a] for a in src]
            tgt = D.hom(F.obj_map[x], F.obj_map[y])
            n += 1
            if faithful and len(set(img)) != len(img):
                bad_faith.append([x, y])
            if full and set(img) != set(tgt):
                bad_full.append([x, y])
    if faithful:
        rep.ok_if("faithful", not bad_faith, witness=bad_faith[:3], checked=n)
    if full:
        rep.ok_if("full", not bad_full, witness=bad_full[:3], checked=n)
    return rep


def check_essentially_surjective(F: FunctorData, C: CatWindow, D: CatWindow) -> Report:
    rep = Report("essentially surjective")
    images = sorted({D.obj_index[t] for t in F.obj_map.values()})
    missing = []
    for y in range(len(D.objects)):
        if not any(D.isomorphic(x, y) is not None for x in images):
            missing.append(D.objects[y])
    rep.ok_if("essentially_surjective", not missing, "every object is isomorphic to an image",
              witness=missing[:3], checked=len(D.objects))
    return rep

"""Fixture builders: finite-set windows, subset and weak-subobject doctrines, posetal doctrines."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .doctrine import Doctrine
from .fincat import CatWindow, ProductCell, WindowError
from .infsl import InfSemilattice, subset_label


@dataclass
class FixtureSpec:
    kind: str  # finset_sub | finset_weaksub | posetal | blur | nonfull | terminal | dsl
    size: int = 0
    options: dict = field(default_factory=dict)

    def build(self) -> Doctrine:
        if self.size < 0:
            raise ValueError("fixture size must be >= 0")
        if self.kind == "finset_sub":
            return finset_sub(self.size)
        if self.kind == "finset_weaksub":
            return finset_weaksub(self.size)
        if self.kind == "posetal":
            return posetal(InfSemilattice.chain([str(i) for i in range(max(self.size, 1))]))
        if self.kind == "blur":
            return blur()
        if self.kind == "nonfull":
            return nonfull_chain()
        if self.kind == "terminal":
            return terminal()
        if self.kind == "dsl":
            from .cli.dsl import load_doctrine
            return load_doctrine(self.options["path"])
        raise ValueError(f"unknown fixture kind {self.kind!r}")


# -- windows of functions between finite sets ----------------------------------

def function_window(sizes: Mapping[str, int], arrows: Sequence[tuple[str, str, str, Sequence[int]]],
                    products: Mapping[tuple[str, str], ProductCell] | None = None,
                    name: str = "") -> CatWindow:
    """Window whose arrows are given as function tables between finite sets.

    Composition is computed from the tables; the arrow set must be closed under
    composition and contain every identity.  Tables are kept in provenance.
    """
    objects = list(sizes)
    ids = [a[0] for a in arrows]
    dom = {a: d for a, d, _, _ in arrows}
    cod = {a: c for a, _, c, _ in arrows}
    imgs = {a: tuple(int(v) for v in m) for a, _, _, m in arrows}
    for a, d, c, m in arrows:
        if len(m) != sizes[d] or any(not 0 <= v < sizes[c] for v in m):
            raise WindowError(f"arrow {a}: table does not fit {d} -> {c}")
    by_key: dict[tuple, str] = {}
    for a in ids:
        key = (dom[a], cod[a], imgs[a])
        if key in by_key:
            raise WindowError(f"arrows {by_key[key]} and {a} are the same function")
        by_key[key] = a
    identity = {}
    for o in objects:
        key = (o, o, tuple(range(sizes[o])))
        if key not in by_key:
            raise WindowError(f"identity on {o} missing")
        identity[o] = by_key[key]
    C = CatWindow(objects, ids, dom, cod, identity, comp={}, products=products, name=name,
                  provenance={"carriers": dict(sizes), "functions": {a: list(imgs[a]) for a in ids}})
    table = np.full((len(ids), len(ids)), -1, dtype=np.int64)
    n_obj = len(objects)
    tab = [np.array(imgs[a], dtype=np.int64) for a in ids]
    for x in range(n_obj):
        sx = sizes[objects[x]]
        for y in range(n_obj):
            fs = C.hom_idx(x, y)
            if not len(fs):
                continue
            F = np.stack([tab[f] for f in fs]) if sx else np.zeros((len(fs), 0), dtype=np.int64)
            for z in range(n_obj):
                gs, hs = C.hom_idx(y, z), C.hom_idx(x, z)
                if not len(gs):
                    continue
                sz = sizes[objects[z]]
                G = np.stack([tab[g] for g in gs]) if sizes[objects[y]] else np.zeros((len(gs), 0), dtype=np.int64)
                weights = sz ** np.arange(sx, dtype=np.int64)
                comp = G[:, F] if sx else np.zeros((len(gs), len(fs), 0), dtype=np.int64)
                codes = comp @ weights if sx else np.zeros((len(gs), len(fs)), dtype=np.int64)
                H = np.stack([tab[h] for h in hs]) if len(hs) and sx else np.zeros((len(hs), 0), dtype=np.int64)
                hcodes = H @ weights if sx else np.zeros(len(hs), dtype=np.int64)
                order = np.argsort(hcodes)
                loc = np.searchsorted(hcodes[order], codes)
                loc = np.minimum(loc, max(len(hs) - 1, 0))
                if not len(hs) or not (hcodes[order][loc] == codes).all():
                    raise WindowError(f"arrows {objects[x]} -> {objects[z]} not closed under composition")
                table[np.ix_(gs, fs)] = hs[order][loc]
    C.table = table
    return C


def carriers(C: CatWindow) -> dict[str, int]:
    return C.provenance["carriers"]


def functions(C: CatWindow) -> dict[str, list[int]]:
    return C.provenance["functions"]


def finset_window(n: int) -> CatWindow:
    """Skeletal finite sets 0..n, all functions, products a*b <= n in row-major order."""
    sizes = {str(k): k for k in range(n + 1)}
    arrows = []
    for m in range(n + 1):
        for c in range(n + 1):
            for img in np.ndindex(*([c] * m)) if m else [()]:
                # most significant digit first: ndindex already enumerates in lexicographic order
                arrows.append((f"{m}to{c}_" + "".join(map(str, img)), str(m), str(c), img))
    products = {}
    lookup = {(d, c, tuple(img)): a for a, d, c, img in arrows}
    for a in range(n + 1):
        for b in range(n + 1):
            if a * b > n:
                continue
            apex = a * b
            p1 = tuple(k // b for k in range(apex)) if b else ()
            p2 = tuple(k % b for k in range(apex)) if b else ()
            products[(str(a), str(b))] = ProductCell(str(apex), lookup[(str(apex), str(a), p1)],
                                                     lookup[(str(apex), str(b), p2)])
    return function_window(sizes, arrows, products, name=f"FinSet<={n}")


def subset_doctrine(C: CatWindow, name: str = "") -> Doctrine:
    """Subsets of each carrier, inverse images, equality as the diagonal subset."""
    sizes, funs = carriers(C), functions(C)
    fibers = {o: InfSemilattice.powerset(sizes[o]) for o in C.objects}
    reindex = {}
    for a in C.arrows:
        m, n = sizes[C.dom[a]], sizes[C.cod[a]]
        img = np.array(funs[a], dtype=np.int64)
        masks = np.arange(1 << n, dtype=np.int64)
        if m:
            bits = (masks[:, None] >> img[None, :]) & 1
            reindex[a] = bits @ (1 << np.arange(m, dtype=np.int64))
        else:
            reindex[a] = np.zeros(1 << n, dtype=np.int64)
    delta = {}
    for o in C.objects:
        cell = C.products.get((o, o))
        if cell is None:
            continue
        p1, p2 = np.array(funs[cell.pr1]), np.array(funs[cell.pr2])
        mask = int(((p1 == p2).astype(np.int64) << np.arange(len(p1))).sum()) if len(p1) else 0
        delta[o] = fibers[cell.apex].elements[mask]
    return Doctrine(C, fibers, reindex, delta, name=name or f"Sub({C.name})")


def finset_sub(n: int) -> Doctrine:
    if n < 0:
        raise ValueError("size bound must be >= 0")
    return subset_doctrine(finset_window(n), name=f"finset_sub({n})")


def monotone_inclusion(C: CatWindow, a: str, mask: int) -> str:
    """The order-preserving injection onto the subset ``mask`` of a finite-set object."""
    sizes, funs = carriers(C), functions(C)
    pts = [i for i in range(sizes[a]) if (mask >> i) & 1]
    src = [o for o in C.objects if sizes[o] == len(pts)]
    for o in src:
        for f in C.hom(o, a):
            if funs[f] == pts:
                return f
    raise WindowError(f"no inclusion of {subset_label(mask, sizes[a])} into {a}")


def weak_subobject_doctrine(C: CatWindow, name: str = "") -> Doctrine:
    """Poset reflection of each slice, reindexed by the greatest factoring class.

    [x] <= [y] iff x factors through y.  Along f: B -> A a class [y] goes to the
    greatest class [x'] over B with f o x' factoring through y; this exists in
    the window whenever the weak pullback apex does, and is checked otherwise.
    """
    n_obj = len(C.objects)
    into = [C.hom_idx_to(o) for o in range(n_obj)]
    pos = np.zeros(len(C.arrows), dtype=np.int64)
    for o in range(n_obj):
        pos[into[o]] = np.arange(len(into[o]))
    fac = []
    for o in range(n_obj):
        T = into[o]
        M = np.zeros((len(T), len(T)), dtype=bool)
        for j, y in enumerate(T.tolist()):
            hs = into[int(C.dom_i[y])]
            comps = C.compose_idx(y, hs)
            M[pos[comps], j] = True
        fac.append(M)
    classes, cls_of, fibers = [], [], {}
    for o in range(n_obj):
        M = fac[o]
        eq = M & M.T
        rep_pos = np.argmax(eq, axis=1)  # least equivalent position
        reps = sorted(set(rep_pos.tolist()))
        k_of = {r: k for k, r in enumerate(reps)}
        cls_of.append(np.array([k_of[r] for r in rep_pos.tolist()], dtype=np.int64))
        classes.append(np.array(reps, dtype=np.int64))
        T = into[o]
        labels = [f"[{C.arrows[T[r]]}]" for r in reps]
        top_pos = pos[C.id_i[o]]
        fibers[C.objects[o]] = InfSemilattice(labels, M[np.ix_(reps, reps)], labels[cls_of[o][top_pos]])
    reindex = {}
    for f in range(len(C.arrows)):
        b, a = int(C.dom_i[f]), int(C.cod_i[f])
        comps = C.compose_idx(f, into[b][classes[b]])  # f o x' for class reps x' over B
        q = fac[a][pos[comps]][:, classes[a]]  # [class over B, class over A]
        Lb = fibers[C.objects[b]]
        out = np.empty(len(classes[a]), dtype=np.int64)
        for j in range(len(classes[a])):
            cand = np.nonzero(q[:, j])[0]
            top = [c for c in cand if Lb.leq[cand, c].all()]
            if len(top) != 1:
                raise WindowError(f"no greatest factoring class along {C.arrows[f]}")
            out[j] = top[0]
        reindex[C.arrows[f]] = out
    delta = {}
    for o in C.objects:
        cell = C.products.get((o, o))
        if cell is None:
            continue
        d = C.index[C.diagonal(o)]
        sq = C.obj_index[cell.apex]
        delta[o] = fibers[cell.apex].elements[cls_of[sq][pos[d]]]
    return Doctrine(C, fibers, reindex, delta, name=name or f"WSub({C.name})")


def finset_weaksub(n: int) -> Doctrine:
    C = finset_window(n)
    P = weak_subobject_doctrine(C, name=f"finset_weaksub({n})")
    _assert_images_iso(P)
    return P


def _assert_images_iso(P: Doctrine) -> None:
    """Each weak-subobject class is determined by the image of its members; check it is the powerset."""
    C = P.base
    sizes, funs = carriers(C), functions(C)
    for o in C.objects:
        L = P.fibers[o]
        masks = []
        for lab in L.elements:
            img = set(funs[lab[1:-1]])
            masks.append(sum(1 << i for i in img))
        n = sizes[o]
        if sorted(masks) != list(range(1 << n)):
            raise WindowError(f"weak subobjects of {o} are not in bijection with subsets")
        m = np.array(masks)
        if not np.array_equal(L.leq, (m[:, None] & ~m[None, :]) == 0):
            raise WindowError(f"weak subobject order on {o} differs from inclusion")


def weaksub_seed(S: Doctrine, W: Doctrine):
    """The identity-on-base arrow sending a subset to the class of its inclusion."""
    from .doctrine import DoctrineArrow
    from .fincat import identity_functor
    C = S.base
    b = {}
    for o in C.objects:
        L = W.fibers[o]
        cls = []
        for mask in range(len(S.fibers[o])):
            inc = monotone_inclusion(C, o, mask)
            # the class containing inc: the unique class with mutual factorization
            cls.append(_class_of(W, o, inc))
        b[o] = np.array(cls, dtype=np.int64)
    return DoctrineArrow(identity_functor(C), b, "inclusion")


def _class_of(W: Doctrine, o: str, arrow: str) -> int:
    C = W.base
    L = W.fibers[o]
    for k, lab in enumerate(L.elements):
        y = lab[1:-1]
        if _factors(C, arrow, y) and _factors(C, y, arrow):
            return k
    raise WindowError(f"{arrow} lies in no class over {o}")


def _factors(C: CatWindow, x: str, y: str) -> bool:
    hs = C.hom_idx(C.obj_index[C.dom[x]], C.obj_index[C.dom[y]])
    return bool((C.compose_idx(C.index[y], hs) == C.index[x]).any())


# -- posetal doctrines -------------------------------------------------------------

def poset_window(L: InfSemilattice, name: str = "") -> CatWindow:
    """The poset of ``L`` as a category; products are meets."""
    el = L.elements
    arrows, dom, cod, comp = [], {}, {}, {}
    for i, x in enumerate(el):
        for j, y in enumerate(el):
            if L.leq[i, j]:
                a = f"{x}<={y}"
                arrows.append(a)
                dom[a], cod[a] = x, y
    for a in arrows:
        for b in arrows:
            if cod[a] == dom[b]:
                comp[(b, a)] = f"{dom[a]}<={cod[b]}"
    products = {}
    for i, x in enumerate(el):
        for j, y in enumerate(el):
            m = L.meet_table[i, j]
            if m >= 0:
                products[(x, y)] = ProductCell(el[m], f"{el[m]}<={x}", f"{el[m]}<={y}")
    return CatWindow(el, arrows, dom, cod, {x: f"{x}<={x}" for x in el}, comp, products, name=name)


def posetal(L: InfSemilattice, fibers: Mapping[str, InfSemilattice] | None = None,
            reindex: Mapping[tuple[str, str], Sequence[int]] | None = None,
            name: str = "") -> Doctrine:
    """Doctrine over a meet-semilattice base; equality is necessarily top."""
    C = poset_window(L, name=name or f"poset{len(L)}")
    trivial = InfSemilattice(["*"], np.ones((1, 1), dtype=bool), "*")
    fb = {x: (fibers or {}).get(x, trivial) for x in L.elements}
    R = {}
    for a in C.arrows:
        x, y = C.dom[a], C.cod[a]
        if x == y:
            continue
        if reindex and (x, y) in reindex:
            R[a] = np.asarray(reindex[(x, y)], dtype=np.int64)
        elif len(fb[x]) == 1:
            R[a] = np.zeros(len(fb[y]), dtype=np.int64)
        else:
            raise ValueError(f"reindexing along {x} <= {y} not given")
    delta = {x: fb[x].elements[fb[x].top] for x in L.elements}
    P = Doctrine(C, fb, R, delta, name=name or C.name)
    # in a poset the diagonal is an identity, so top <= P_diag(d) forces d = top
    for x in L.elements:
        diag = P.rx(C.diagonal(x))
        forced = [d for d in range(len(fb[x])) if fb[x].leq[fb[x].top, diag[d]]]
        if forced != [fb[x].top]:
            raise WindowError(f"equality on {x} is not forced to top")
    return P


def terminal() -> Doctrine:
    return posetal(InfSemilattice.chain(["*"]), name="terminal")


def two_chain() -> Doctrine:
    return posetal(InfSemilattice.chain(["0", "1"]), name="chain2")


def nonfull_chain() -> Doctrine:
    """0 < 1 with a one-point fiber over 0 and a 3-chain over 1: comprehensions exist but are not full."""
    L = InfSemilattice.chain(["0", "1"])
    fibers = {"0": InfSemilattice.chain(["t"]), "1": InfSemilattice.chain(["bot", "mid", "top"])}
    return posetal(L, fibers, {("0", "1"): [0, 0, 0]}, name="nonfull")


# -- the blur fixture ----------------------------------------------------------------

def blur_window() -> CatWindow:
    """Points 1, a two-point set B and its square BB, with a restricted set of maps.

    B -> B has only the identity and the two constants, so the window is not
    all of FinSet; every other hom-set is generated by pairing.
    """
    sizes = {"1": 1, "B": 2, "BB": 4}
    bb = [("id", (0, 1)), ("ca", (0, 0)), ("cb", (1, 1))]
    to_b = [("p1", (0, 0, 1, 1)), ("p2", (0, 1, 0, 1)), ("ka", (0, 0, 0, 0)), ("kb", (1, 1, 1, 1))]
    arrows = [("id_1", "1", "1", (0,)), ("a", "1", "B", (0,)), ("b", "1", "B", (1,)),
              ("B!", "B", "1", (0, 0)), ("BB!", "BB", "1", (0, 0, 0, 0))]
    arrows += [("id_B" if n == "id" else f"B_{n}", "B", "B", t) for n, t in bb]
    arrows += [(f"BB_{n}", "BB", "B", t) for n, t in to_b]
    for i in range(2):
        for j in range(2):
            arrows.append((f"pt{i}{j}", "1", "BB", (2 * i + j,)))
    for nu, u in bb:
        for nv, v in bb:
            arrows.append((f"<{nu},{nv}>", "B", "BB", tuple(2 * u[k] + v[k] for k in range(2))))
    for nu, u in to_b:
        for nv, v in to_b:
            n = "id_BB" if (nu, nv) == ("p1", "p2") else f"<{nu},{nv}>'"
            arrows.append((n, "BB", "BB", tuple(2 * u[k] + v[k] for k in range(4))))
    products = {
        ("B", "B"): ProductCell("BB", "BB_p1", "BB_p2"),
        ("1", "1"): ProductCell("1", "id_1", "id_1"),
        ("1", "B"): ProductCell("B", "B!", "id_B"),
        ("B", "1"): ProductCell("B", "id_B", "B!"),
        ("1", "BB"): ProductCell("BB", "BB!", "id_BB"),
        ("BB", "1"): ProductCell("BB", "id_BB", "BB!"),
    }
    return function_window(sizes, arrows, products, name="blur")


def blur() -> Doctrine:
    """Two-element chain over every object, identity reindexing, equality top."""
    C = blur_window()
    L = InfSemilattice.chain(["bot", "top"])
    return Doctrine(C, {o: L for o in C.objects}, {a: np.arange(2) for a in C.arrows},
                    {o: "top" for o in C.objects if C.square(o) is not None}, name="blur")

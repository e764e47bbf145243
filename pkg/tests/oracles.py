"""Brute-force reference computations, written without numpy or package internals.

Each function recomputes something the package computes by a different route,
using plain Python sets, tuples and itertools.
"""
from __future__ import annotations

import itertools
from functools import lru_cache


# -- finite sets and functions --------------------------------------------------

def finset_arrows(n: int) -> dict[str, tuple[int, int, tuple[int, ...]]]:
    """name -> (domain size, codomain size, image tuple) for every function between sets of size <= n."""
    out = {}
    for m in range(n + 1):
        for c in range(n + 1):
            for img in itertools.product(range(c), repeat=m):
                out[f"{m}to{c}_" + "".join(map(str, img))] = (m, c, img)
    return out


def compose(g: tuple[int, ...], f: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(g[x] for x in f)


def preimage(f: tuple[int, ...], subset: frozenset) -> frozenset:
    return frozenset(x for x, y in enumerate(f) if y in subset)


def image(f: tuple[int, ...], subset: frozenset) -> frozenset:
    return frozenset(f[x] for x in subset)


def mask_of(subset, n: int) -> int:
    return sum(1 << i for i in subset if i < n)


def subset_of(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def label(subset, n: int) -> str:
    return "s" + "".join("1" if i in subset else "0" for i in range(n))


def diagonal_subset(n: int) -> frozenset:
    """Equality on n, as a subset of n x n in row-major order."""
    return frozenset(i * n + i for i in range(n))


# -- equivalence relations -------------------------------------------------------

def set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    head, rest = items[0], items[1:]
    out = []
    for p in set_partitions(rest):
        out.append([[head]] + p)
        for k in range(len(p)):
            out.append(p[:k] + [[head] + p[k]] + p[k + 1:])
    return out


def bell(n: int) -> int:
    return len(set_partitions(list(range(n))))


@lru_cache(maxsize=None)
def equivalence_relations(n: int) -> tuple[frozenset, ...]:
    """Every reflexive, symmetric, transitive subset of n x n (as row-major cells), by exhaustion."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    out = []
    for bits in range(1 << len(cells)):
        rel = {cells[k] for k in range(len(cells)) if bits >> k & 1}
        if any((i, i) not in rel for i in range(n)):
            continue
        if any((j, i) not in rel for i, j in rel):
            continue
        if any((i, l) not in rel for i, j in rel for k, l in rel if j == k):
            continue
        out.append(frozenset(i * n + j for i, j in rel))
    return tuple(out)


def kernel(f: tuple[int, ...]) -> frozenset:
    m = len(f)
    return frozenset(i * m + j for i in range(m) for j in range(m) if f[i] == f[j])


# -- posets and semilattices ---------------------------------------------------------

def glb(elements, leq, a, b):
    """Greatest lower bound of a, b by scanning, or None."""
    lower = [x for x in elements if leq(x, a) and leq(x, b)]
    best = [x for x in lower if all(leq(y, x) for y in lower)]
    return best[0] if best else None


def meet_preserving(elements, leq, targets, tgt_leq, m) -> bool:
    """m preserves the top and every existing binary glb (as a glb in the target order)."""
    tops = [x for x in elements if all(leq(y, x) for y in elements)]
    tgt = list(targets)
    for a in elements:
        for b in elements:
            g = glb(elements, leq, a, b)
            if g is None:
                continue
            lower = [z for z in tgt if tgt_leq(z, m[a]) and tgt_leq(z, m[b])]
            if m[g] not in lower or not all(tgt_leq(z, m[g]) for z in lower):
                return False
    return all(all(tgt_leq(z, m[t]) for z in tgt) for t in tops)


# -- collapse of parallel arrows in a doctrine with chain fibers -------------------------

def pairing_identifies(P, f: str, g: str) -> bool | None:
    """top <= P_<f,g>(delta_Y) computed directly; None when the pairing or delta is missing."""
    C = P.base
    y = C.cod[f]
    sq = C.square(y)
    if sq is None or y not in P.delta:
        return None
    try:
        pr = C.pair(f, g)
    except Exception:
        return None
    x = C.dom[f]
    Lx, Ly = P.fibers[x], P.fibers[sq]
    pulled = P.R[C.index[pr]][Ly.index[P.delta[y]]]
    return bool(Lx.leq[Lx.top, pulled])


def collapse_oracle(P, x: str, y: str) -> list[set[str]] | None:
    """Classes of hom(x, y) under the identification, through the pairing form or, for a
    product codomain without a square, componentwise through its projections."""
    C = P.base
    hom = C.hom(x, y)

    def same(f, g):
        r = pairing_identifies(P, f, g)
        if r is not None:
            return r
        for (l, rr), cell in C.products.items():
            if cell.apex == y and l != y and rr != y:
                a = same_component(C.compose(cell.pr1, f), C.compose(cell.pr1, g))
                b = same_component(C.compose(cell.pr2, f), C.compose(cell.pr2, g))
                if a is not None and b is not None:
                    return a and b
        return None

    def same_component(f, g):
        return f == g or pairing_identifies(P, f, g)

    classes: list[set[str]] = []
    for f in hom:
        for cl in classes:
            r = same(next(iter(cl)), f)
            if r is None:
                return None
            if r:
                cl.add(f)
                break
        else:
            classes.append({f})
    return classes


# -- completions of subsets of finite sets, from their set-level definitions ----------------

def _functions(m: int, c: int):
    return itertools.product(range(c), repeat=m)


def _respects(f, rho, sigma) -> bool:
    return all((f[x], f[y]) in sigma for x, y in rho)


def _pairs_of(partition) -> frozenset:
    return frozenset((x, y) for block in partition for x in block for y in block)


def quotient_objects(n: int) -> list[tuple[int, frozenset]]:
    """(A, rho) with A x A in the window bounded by n: equivalence relations as pair sets."""
    return [(a, _pairs_of(p)) for a in range(n + 1) if a * a <= n
            for p in set_partitions(list(range(a)))]


def quotient_arrows(n: int) -> int:
    """Arrows f : (A, rho) -> (B, sigma) with rho contained in the pullback of sigma."""
    objs = quotient_objects(n)
    return sum(1 for a, r in objs for b, s in objs for f in _functions(a, b) if _respects(f, r, s))


def graph_objects(n: int) -> list[tuple[int, frozenset]]:
    return [(a, frozenset(s)) for a in range(n + 1)
            for k in range(a + 1) for s in itertools.combinations(range(a), k)]


def graph_arrows(n: int) -> int:
    """Arrows f : (A, alpha) -> (B, beta) with alpha inside the preimage of beta."""
    objs = graph_objects(n)
    return sum(1 for a, al in objs for b, be in objs for f in _functions(a, b)
               if all(f[x] in be for x in al))


def completed_objects(n: int) -> list[tuple[int, frozenset, frozenset]]:
    """(A, alpha, rho): alpha a subset of A with A x A in the window, rho an equivalence on alpha."""
    return [(a, al, _pairs_of(p)) for a, al in graph_objects(n) if a * a <= n
            for p in set_partitions(sorted(al))]


def completed_arrows(n: int) -> int:
    """Classes of arrows between completed objects: f respects alpha and rho, and f ~ g
    when related points go to related points (x rho x' implies f x sigma g x')."""
    objs = completed_objects(n)
    total = 0
    for a, al, r in objs:
        for b, be, s in objs:
            fs = [f for f in _functions(a, b) if all(f[x] in be for x in al) and _respects(f, r, s)]
            classes: list = []
            for f in fs:
                for cl in classes:
                    g = cl[0]
                    if all((f[x], g[y]) in s for x, y in r):
                        cl.append(f)
                        break
                else:
                    classes.append([f])
            total += len(classes)
    return total


def d_objects(n: int) -> list[tuple[int, frozenset, int, tuple[int, ...]]]:
    """(A, alpha, X, c): c : X -> A lands in alpha and hits every point of it (a weak
    comprehension of alpha among finite sets), with A x A and X x X in the window."""
    out = []
    for a, al in graph_objects(n):
        if a * a > n:
            continue
        for x in range(n + 1):
            if x * x > n:
                continue
            for c in _functions(x, a):
                if set(c) == set(al):
                    out.append((a, al, x, c))
    return out


def d_arrows(n: int) -> int:
    """Classes of f : X -> Y preserving the kernels of the comprehensions, f ~ f' when
    c x = c x' implies d f x = d f' x'."""
    objs = d_objects(n)
    total = 0
    for _, _, x, c in objs:
        for _, _, y, d in objs:
            def rel(f, g):
                return all(d[f[i]] == d[g[j]] for i in range(x) for j in range(x) if c[i] == c[j])
            fs = [f for f in _functions(x, y) if rel(f, f)]
            classes: list = []
            for f in fs:
                if not any(rel(cl, f) for cl in classes):
                    classes.append(f)
            total += len(classes)
    return total

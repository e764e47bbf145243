"""Finite inf-semilattices (posets with top and binary meets) and their homomorphisms."""
from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .report import ERROR, FAIL, PASS, Report


class LatticeError(Exception):
    pass


class InfSemilattice:
    """Elements are string labels; order and meets are kept as index tables.

    ``parent`` / ``embed`` record where the elements came from when the
    lattice was carved out of another one (``embed[i]`` is the index in the
    parent).
    """

    def __init__(self, elements: Sequence[str], leq: np.ndarray | Iterable[tuple[str, str]],
                 top: str | None = None, *, parent: "InfSemilattice | None" = None,
                 embed: Sequence[int] | None = None, close: bool = True):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        if isinstance(leq, np.ndarray):
            m = leq.astype(bool).copy()
        else:
            m = np.eye(n, dtype=bool)
            for a, b in leq:
                if a not in self.index or b not in self.index:
                    raise LatticeError(f"order pair ({a}, {b}) names an unknown element")
                m[self.index[a], self.index[b]] = True
            if close:
                m = _transitive_closure(m)
        self.leq = m
        self.top_label = top
        self.top = self.index.get(top, -1) if top is not None else _find_top(m)
        self.parent = parent
        self.embed = None if embed is None else np.asarray(embed, dtype=np.int64)
        self._meet: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"InfSemilattice({len(self)} elements)"

    @property
    def meet_table(self) -> np.ndarray:
        """meet_table[a, b] = glb index, or -1 where no greatest lower bound exists."""
        if self._meet is None:
            self._meet = _glb_table(self.leq)
        return self._meet

    def meet_idx(self, a, b):
        return self.meet_table[a, b]

    def le(self, a: str, b: str) -> bool:
        return bool(self.leq[self.index[a], self.index[b]])

    def same_as(self, other: "InfSemilattice") -> bool:
        return (self.elements == other.elements and np.array_equal(self.leq, other.leq)
                and self.top == other.top)

    def order_pairs(self) -> list[tuple[str, str]]:
        """Non-reflexive pairs of the order, in index order."""
        a, b = np.nonzero(self.leq & ~np.eye(len(self), dtype=bool))
        return [(self.elements[i], self.elements[j]) for i, j in zip(a.tolist(), b.tolist())]

    @classmethod
    def powerset(cls, n: int, label: Callable[[int, int], str] | None = None) -> "InfSemilattice":
        """Subsets of range(n) as bitmasks, ordered by inclusion; index == bitmask."""
        label = label or subset_label
        masks = np.arange(1 << n)
        leq = (masks[:, None] & ~masks[None, :]) == 0
        return cls([label(m, n) for m in range(1 << n)], leq, label((1 << n) - 1, n))

    @classmethod
    def chain(cls, labels: Sequence[str]) -> "InfSemilattice":
        n = len(labels)
        leq = np.arange(n)[:, None] <= np.arange(n)[None, :]
        return cls(labels, leq, labels[-1])


def subset_label(mask: int, n: int) -> str:
    return "s" + "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def _transitive_closure(m: np.ndarray) -> np.ndarray:
    m = m.copy()
    for k in range(len(m)):
        m |= m[:, k:k + 1] & m[k:k + 1, :]
    return m


def _find_top(leq: np.ndarray) -> int:
    if len(leq) == 0:
        return -1
    tops = np.nonzero(leq.all(axis=0))[0]
    return int(tops[0]) if len(tops) else -1


def _glb_table(leq: np.ndarray) -> np.ndarray:
    n = len(leq)
    out = np.full((n, n), -1, dtype=np.int64)
    for a in range(n):
        lower = leq[:, a][:, None] & leq  # lower[c, b]: c <= a and c <= b
        for b in range(n):
            cands = np.nonzero(lower[:, b])[0]
            if len(cands) == 0:
                continue
            # greatest candidate: every other candidate lies below it
            sub = leq[np.ix_(cands, cands)].all(axis=0)
            g = np.nonzero(sub)[0]
            if len(g):
                out[a, b] = cands[g[0]]
    return out


def meet(L: InfSemilattice, a: str, b: str) -> str:
    if a not in L.index or b not in L.index:
        raise LatticeError(f"element not in carrier: {a if a not in L.index else b}")
    m = L.meet_table[L.index[a], L.index[b]]
    if m < 0:
        raise LatticeError(f"no meet of {a} and {b}")
    return L.elements[m]


def check_infsl(L: InfSemilattice) -> Report:
    rep = Report("inf-semilattice")
    n = len(L)
    if L.leq.shape != (n, n):
        rep.add("structure", ERROR, "order table has the wrong shape")
        return rep
    refl = bool(np.diag(L.leq).all())
    rep.ok_if("reflexive", refl, witness=None if refl else L.elements[int(np.argmin(np.diag(L.leq)))])
    anti = L.leq & L.leq.T & ~np.eye(n, dtype=bool)
    rep.ok_if("antisymmetric", not anti.any(),
              witness=None if not anti.any() else [L.elements[i] for i in np.argwhere(anti)[0]])
    trans = (L.leq.astype(np.int64) @ L.leq.astype(np.int64) > 0) & ~L.leq
    rep.ok_if("transitive", not trans.any(),
              witness=None if not trans.any() else [L.elements[i] for i in np.argwhere(trans)[0]])
    top_ok = 0 <= L.top < n and bool(L.leq[:, L.top].all())
    rep.ok_if("top", top_ok, witness=L.top_label)
    mt = _glb_table(L.leq)
    missing = np.argwhere(mt < 0)
    rep.ok_if("meets", len(missing) == 0, "every pair has a greatest lower bound",
              witness=None if len(missing) == 0 else [L.elements[i] for i in missing[0]], checked=n * n)
    return rep


class InfSLHom:
    """An element map ``mapping[i] = j`` from ``src`` to ``tgt`` by index."""

    def __init__(self, src: InfSemilattice, tgt: InfSemilattice, mapping):
        self.src, self.tgt = src, tgt
        self.mapping = np.asarray(mapping, dtype=np.int64)

    @classmethod
    def from_labels(cls, src, tgt, mapping: dict[str, str]) -> "InfSLHom":
        return cls(src, tgt, [tgt.index[mapping[e]] for e in src.elements])

    def __call__(self, label: str) -> str:
        return self.tgt.elements[self.mapping[self.src.index[label]]]

    def as_labels(self) -> dict[str, str]:
        return {e: self.tgt.elements[j] for e, j in zip(self.src.elements, self.mapping)}

    def is_iso(self) -> bool:
        m = self.mapping
        if len(self.src) != len(self.tgt) or len(set(m.tolist())) != len(m):
            return False
        return np.array_equal(self.src.leq, self.tgt.leq[np.ix_(m, m)])


def hom_violation(src: InfSemilattice, tgt: InfSemilattice, m: np.ndarray) -> tuple[str, object] | None:
    """First broken homomorphism law for the index map ``m``, or None."""
    if len(m) != len(src) or (m < 0).any() or (m >= len(tgt)).any():
        return "structure", None
    if m[src.top] != tgt.top:
        return "top", src.elements[src.top]
    mono = ~src.leq | tgt.leq[m[:, None], m[None, :]]
    if not mono.all():
        a, b = np.argwhere(~mono)[0]
        return "monotone", [src.elements[a], src.elements[b]]
    ms, mt = src.meet_table, tgt.meet_table
    img = m[ms]
    want = mt[m[:, None], m[None, :]]
    bad = img != want
    if bad.any():
        a, b = np.argwhere(bad)[0]
        return "meets", [src.elements[a], src.elements[b]]
    return None


def check_hom(h: InfSLHom) -> Report:
    rep = Report("inf-semilattice homomorphism")
    v = hom_violation(h.src, h.tgt, h.mapping)
    if v is None:
        rep.add("homomorphism", PASS, "monotone, top and meets preserved", checked=len(h.src) ** 2)
    elif v[0] == "structure":
        rep.add("structure", ERROR, "map is not total into the target carrier")
    else:
        rep.add(f"homomorphism.{v[0]}", FAIL, witness=v[1])
    return rep


def sub_infsl(L: InfSemilattice, keep: Callable[[int], bool] | Sequence[bool],
              top: int | None = None) -> InfSemilattice:
    """Restriction of ``L`` to the selected carrier.

    ``top`` re-roots the top (used for downsets); otherwise the carrier must
    contain the top of ``L``.  Closure under meets is verified.
    """
    if callable(keep):
        sel = [i for i in range(len(L)) if keep(i)]
    else:
        sel = [i for i, k in enumerate(keep) if k]
    t = L.top if top is None else top
    if t not in sel:
        raise LatticeError("selected carrier does not contain the top")
    sset = set(sel)
    mt = L.meet_table
    for a in sel:
        for b in sel:
            if int(mt[a, b]) not in sset:
                raise LatticeError(f"carrier not closed under meet: {L.elements[a]} ^ {L.elements[b]}")
    idx = np.array(sel, dtype=np.int64)
    out = InfSemilattice([L.elements[i] for i in sel], L.leq[np.ix_(idx, idx)], L.elements[t],
                         parent=L, embed=idx)
    out._meet = np.searchsorted(idx, mt[np.ix_(idx, idx)])
    return out


def enumerate_homs(src: InfSemilattice, tgt: InfSemilattice, limit: int | None = None) -> list[np.ndarray]:
    """All inf-semilattice homomorphisms by backtracking over elements."""
    n = len(src)
    out: list[np.ndarray] = []
    order = list(np.argsort(-src.leq.sum(axis=0), kind="stable"))  # top first
    m = np.full(n, -1, dtype=np.int64)
    ms, mt = src.meet_table, tgt.meet_table

    def consistent(i):
        for j in range(n):
            if m[j] < 0:
                continue
            if src.leq[i, j] and not tgt.leq[m[i], m[j]]:
                return False
            if src.leq[j, i] and not tgt.leq[m[j], m[i]]:
                return False
            k = ms[i, j]
            if m[k] >= 0 and mt[m[i], m[j]] != m[k]:
                return False
        # pairs already assigned whose meet is i
        a, b = np.nonzero(ms == i)
        done = (m[a] >= 0) & (m[b] >= 0)
        return bool((mt[m[a[done]], m[b[done]]] == m[i]).all())

    def go(p):
        if limit is not None and len(out) >= limit:
            return
        if p == n:
            out.append(m.copy())
            return
        i = order[p]
        choices = [tgt.top] if i == src.top else range(len(tgt))
        for c in choices:
            m[i] = c
            if consistent(i):
                go(p + 1)
            m[i] = -1

    go(0)
    return out

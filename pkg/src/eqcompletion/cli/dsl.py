"""Text format for doctrines: a small line-oriented DSL and a versioned JSON schema.

DSL statements (``#`` starts a comment)::

    object A;
    arrow f : A -> B;
    compose g f = h;
    product A B = P [pr1=p, pr2=q];
    fiber A { elems e1 e2; top e2; order e1 <= e2; }
    reindex f { e -> e', ... }
    delta A = e;

Identifiers are runs of ``[A-Za-z0-9_.!'*@~|$%^&+/?]`` or double-quoted strings.
The identity of A is the arrow named ``id_A``; it is synthesized when not
declared, as are composites with identities and reindexing along identities.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..doctrine import Doctrine
from ..fincat import CatWindow, ProductCell, derived_window
from ..infsl import InfSemilattice, LatticeError

SCHEMA = 1


class DSLError(Exception):
    """Syntax, reference or totality problem; ``pos`` is (line, column) when known."""

    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.pos = pos
        super().__init__(f"{pos[0]}:{pos[1]}: {message}" if pos else message)


# -- tokens ------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>->|<=|[;{}\[\],=:])
  | (?P<id>[A-Za-z0-9_.!'*@~|$%^&+/?]+)
""", re.VERBOSE)


@dataclass
class Token:
    kind: str  # id | op | eof
    text: str
    pos: tuple[int, int]


def tokenize(text: str) -> list[Token]:
    out, i, line, col = [], 0, 1, 1
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise DSLError(f"unexpected character {text[i]!r}", (line, col))
        kind, s = m.lastgroup, m.group()
        if kind == "str":
            out.append(Token("id", json.loads(s), (line, col)))
        elif kind in ("op", "id"):
            out.append(Token(kind, s, (line, col)))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    out.append(Token("eof", "", (line, col)))
    return out


# -- document ------------------------------------------------------------------------

@dataclass
class FiberDecl:
    elems: list[str]
    top: str | None
    order: list[tuple[str, str]]
    pos: tuple[int, int]


@dataclass
class DoctrineDocument:
    name: str = ""
    objects: list[str] = field(default_factory=list)
    arrows: dict[str, tuple[str, str]] = field(default_factory=dict)
    compose: dict[tuple[str, str], str] = field(default_factory=dict)
    products: dict[tuple[str, str], ProductCell] = field(default_factory=dict)
    fibers: dict[str, FiberDecl] = field(default_factory=dict)
    reindex: dict[str, dict[str, str]] = field(default_factory=dict)
    delta: dict[str, str] = field(default_factory=dict)
    pos: dict[tuple, tuple[int, int]] = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.k = 0

    def peek(self) -> Token:
        return self.toks[self.k]

    def next(self) -> Token:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.kind != "op" or t.text != text:
            raise DSLError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos)
        return t

    def ident(self, what: str) -> Token:
        t = self.next()
        if t.kind != "id":
            raise DSLError(f"expected {what}, found {t.text or 'end of input'!r}", t.pos)
        return t

    def at_op(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text


def parse(text: str) -> DoctrineDocument:
    p = _Parser(text)
    doc = DoctrineDocument()

    def dup(key, what, pos):
        if key in doc.pos:
            raise DSLError(f"duplicate {what} (first at {doc.pos[key][0]}:{doc.pos[key][1]})", pos)
        doc.pos[key] = pos

    while p.peek().kind != "eof":
        head = p.next()
        if head.kind != "id":
            raise DSLError(f"expected a directive, found {head.text!r}", head.pos)
        d = head.text
        if d == "object":
            a = p.ident("object name")
            dup(("object", a.text), f"object {a.text}", a.pos)
            doc.objects.append(a.text)
            p.expect(";")
        elif d == "arrow":
            f = p.ident("arrow name")
            p.expect(":")
            src = p.ident("domain")
            p.expect("->")
            tgt = p.ident("codomain")
            p.expect(";")
            dup(("arrow", f.text), f"arrow {f.text}", f.pos)
            doc.arrows[f.text] = (src.text, tgt.text)
        elif d == "compose":
            g, f = p.ident("arrow"), p.ident("arrow")
            p.expect("=")
            h = p.ident("arrow")
            p.expect(";")
            dup(("compose", g.text, f.text), f"composition {g.text} {f.text}", g.pos)
            doc.compose[(g.text, f.text)] = h.text
        elif d == "product":
            a, b = p.ident("object"), p.ident("object")
            p.expect("=")
            apex = p.ident("object")
            p.expect("[")
            legs = {}
            for k in range(2):
                key = p.ident("pr1 or pr2")
                if key.text not in ("pr1", "pr2") or key.text in legs:
                    raise DSLError(f"expected pr1/pr2, found {key.text!r}", key.pos)
                p.expect("=")
                legs[key.text] = p.ident("projection").text
                if k == 0:
                    p.expect(",")
            p.expect("]")
            p.expect(";")
            dup(("product", a.text, b.text), f"product {a.text} {b.text}", a.pos)
            doc.products[(a.text, b.text)] = ProductCell(apex.text, legs["pr1"], legs["pr2"])
        elif d == "fiber":
            a = p.ident("object")
            p.expect("{")
            elems, top, order = None, None, []
            while not p.at_op("}"):
                kw = p.ident("elems, top or order")
                if kw.text == "elems":
                    if elems is not None:
                        raise DSLError("duplicate elems", kw.pos)
                    elems = []
                    while not p.at_op(";"):
                        elems.append(p.ident("element").text)
                elif kw.text == "top":
                    if top is not None:
                        raise DSLError("duplicate top", kw.pos)
                    top = p.ident("element").text
                elif kw.text == "order":
                    x = p.ident("element").text
                    p.expect("<=")
                    order.append((x, p.ident("element").text))
                else:
                    raise DSLError(f"unknown fiber statement {kw.text!r}", kw.pos)
                p.expect(";")
            p.expect("}")
            if elems is None:
                raise DSLError(f"fiber {a.text} has no elems", a.pos)
            dup(("fiber", a.text), f"fiber {a.text}", a.pos)
            doc.fibers[a.text] = FiberDecl(elems, top, order, a.pos)
        elif d == "reindex":
            f = p.ident("arrow")
            p.expect("{")
            m: dict[str, str] = {}
            while not p.at_op("}"):
                e = p.ident("element")
                p.expect("->")
                v = p.ident("element")
                if e.text in m:
                    raise DSLError(f"element {e.text} mapped twice", e.pos)
                m[e.text] = v.text
                if not p.at_op("}"):
                    p.expect(",")
            p.expect("}")
            dup(("reindex", f.text), f"reindex {f.text}", f.pos)
            doc.reindex[f.text] = m
        elif d == "delta":
            a = p.ident("object")
            p.expect("=")
            e = p.ident("element")
            p.expect(";")
            dup(("delta", a.text), f"delta {a.text}", a.pos)
            doc.delta[a.text] = e.text
        else:
            raise DSLError(f"unknown directive {d!r}", head.pos)
    return doc


# -- elaboration ------------------------------------------------------------------------

def elaborate(doc: DoctrineDocument, name: str = "") -> Doctrine:
    """Check references and totality, synthesize identities, and build the doctrine."""
    objs = set(doc.objects)

    def where(key):
        return doc.pos.get(key)

    arrows = dict(doc.arrows)
    for f, (a, b) in arrows.items():
        for o in (a, b):
            if o not in objs:
                raise DSLError(f"arrow {f} refers to unknown object {o}", where(("arrow", f)))
    identity = {}
    for o in doc.objects:
        i = f"id_{o}"
        if i in arrows and arrows[i] != (o, o):
            raise DSLError(f"{i} must be an arrow {o} -> {o}", where(("arrow", i)))
        arrows.setdefault(i, (o, o))
        identity[o] = i
    ids = set(identity.values())
    order = [f for f in doc.arrows] + [identity[o] for o in doc.objects if identity[o] not in doc.arrows]
    comp = {}
    for (g, f), h in doc.compose.items():
        pos = where(("compose", g, f))
        for x in (g, f, h):
            if x not in arrows:
                raise DSLError(f"composition refers to unknown arrow {x}", pos)
        if arrows[f][1] != arrows[g][0]:
            raise DSLError(f"{g} {f} are not composable", pos)
        if arrows[h] != (arrows[f][0], arrows[g][1]):
            raise DSLError(f"{h} does not have the type of {g} o {f}", pos)
        if g in ids and h != f or f in ids and h != g:
            raise DSLError(f"composition with an identity must return the other arrow", pos)
        comp[(g, f)] = h
    by_dom: dict[str, list[str]] = {}
    for f in order:
        by_dom.setdefault(arrows[f][0], []).append(f)
    for f in order:
        for g in by_dom.get(arrows[f][1], []):
            if (g, f) in comp:
                continue
            if g in ids:
                comp[(g, f)] = f
            elif f in ids:
                comp[(g, f)] = g
            else:
                raise DSLError(f"composition missing for the pair {g} {f}")
    for (a, b), cell in doc.products.items():
        pos = where(("product", a, b))
        for o in (a, b, cell.apex):
            if o not in objs:
                raise DSLError(f"product refers to unknown object {o}", pos)
        for pr, tgt in ((cell.pr1, a), (cell.pr2, b)):
            if pr not in arrows:
                raise DSLError(f"product refers to unknown arrow {pr}", pos)
            if arrows[pr] != (cell.apex, tgt):
                raise DSLError(f"projection {pr} must be {cell.apex} -> {tgt}", pos)
    C = CatWindow(doc.objects, order, {f: arrows[f][0] for f in order}, {f: arrows[f][1] for f in order},
                  identity, comp, doc.products, name=name or doc.name)
    fibers = {}
    for o in doc.objects:
        if o not in doc.fibers:
            raise DSLError(f"object {o} has no fiber")
        fd = doc.fibers[o]
        if len(set(fd.elems)) != len(fd.elems):
            raise DSLError(f"fiber {o} repeats an element", fd.pos)
        try:
            L = InfSemilattice(fd.elems, fd.order)
        except LatticeError as e:
            raise DSLError(f"fiber {o}: {e}", fd.pos) from None
        if fd.top is not None and (fd.top not in L.index or L.top != L.index[fd.top]):
            raise DSLError(f"fiber {o}: declared top {fd.top} is not the greatest element", fd.pos)
        fibers[o] = L
    for f in doc.fibers:
        if f not in objs:
            raise DSLError(f"fiber for unknown object {f}", doc.fibers[f].pos)
    reindex = {}
    for f in order:
        a, b = arrows[f]
        m = doc.reindex.get(f)
        if m is None:
            if f in ids:
                continue
            raise DSLError(f"reindexing missing for arrow {f}")
        pos = where(("reindex", f))
        La, Lb = fibers[a], fibers[b]
        for e, v in m.items():
            if e not in Lb.index:
                raise DSLError(f"reindex {f}: {e} is not in the fiber of {b}", pos)
            if v not in La.index:
                raise DSLError(f"reindex {f}: {v} is not in the fiber of {a}", pos)
        missing = [e for e in Lb.elements if e not in m]
        if missing:
            raise DSLError(f"reindex {f}: no image for {missing[0]}", pos)
        reindex[f] = np.array([La.index[m[e]] for e in Lb.elements], dtype=np.int64)
    for f in doc.reindex:
        if f not in arrows:
            raise DSLError(f"reindex for unknown arrow {f}", where(("reindex", f)))
    delta = {}
    for o, e in doc.delta.items():
        pos = where(("delta", o))
        if o not in objs:
            raise DSLError(f"delta for unknown object {o}", pos)
        sq = C.square(o)
        if sq is None:
            raise DSLError(f"delta for {o} needs the product {o} x {o}", pos)
        if e not in fibers[sq].index:
            raise DSLError(f"delta {o}: {e} is not in the fiber of {sq}", pos)
        delta[o] = e
    return Doctrine(C, fibers, reindex, delta, name=name or doc.name)


# -- JSON ---------------------------------------------------------------------------------

def _window_json(C: CatWindow) -> dict:
    out = {
        "name": C.name,
        "objects": list(C.objects),
        "arrows": [{"id": a, "dom": C.dom[a], "cod": C.cod[a]} for a in C.arrows],
        "identity": dict(C.identity),
        "products": [{"left": l, "right": r, "apex": c.apex, "pr1": c.pr1, "pr2": c.pr2}
                     for (l, r), c in C.products.items()],
    }
    if C.derived:
        out["derived"] = {
            "root": _window_json(C.root),
            "rep": [C.root.arrows[r] for r in C.rep.tolist()],
            "members": [[C.root.arrows[m] for m in C.members(i).tolist()] for i in range(len(C.arrows))],
        }
    else:
        cd = C.comp_dict()
        out["comp"] = [[g, f, cd[(g, f)]] for g, f in sorted(cd, key=lambda k: (C.index[k[0]], C.index[k[1]]))]
    return out


def to_json(P: Doctrine) -> dict:
    C = P.base
    fibers = {}
    for o in C.objects:
        L = P.fibers[o]
        pairs = [[L.elements[i], L.elements[j]] for i, j in zip(*np.nonzero(L.leq)) if i != j]
        fibers[o] = {"elements": list(L.elements), "order": pairs, "top": L.elements[L.top] if L.top >= 0 else None}
    reindex = {}
    for i, a in enumerate(C.arrows):
        La = P.fibers[C.dom[a]]
        Lb = P.fibers[C.cod[a]]
        reindex[a] = {Lb.elements[k]: La.elements[v] for k, v in enumerate(P.R[i].tolist())}
    return {
        "schema": SCHEMA,
        "name": P.name,
        "window": _window_json(C),
        "fibers": fibers,
        "reindex": reindex,
        "delta": dict(P.delta),
        "provenance": _plain(P.provenance),
    }


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    return x


def _window_from_json(w: dict) -> CatWindow:
    try:
        objects = list(w["objects"])
        arrows = [a["id"] for a in w["arrows"]]
        dom = {a["id"]: a["dom"] for a in w["arrows"]}
        cod = {a["id"]: a["cod"] for a in w["arrows"]}
        products = {(p["left"], p["right"]): ProductCell(p["apex"], p["pr1"], p["pr2"]) for p in w["products"]}
        identity = dict(w["identity"])
        name = w.get("name", "")
        if "derived" in w:
            root = _window_from_json(w["derived"]["root"])
            rep = [root.index[r] for r in w["derived"]["rep"]]
            members = {i: [root.index[m] for m in ms] for i, ms in enumerate(w["derived"]["members"])}
            return derived_window(objects, arrows, dom, cod, identity, products, root, rep, members,
                                  name=name)
        comp = {(g, f): h for g, f, h in w["comp"]}
        return CatWindow(objects, arrows, dom, cod, identity, comp, products, name=name)
    except (KeyError, TypeError, ValueError) as e:
        raise DSLError(f"malformed window in JSON: {e}") from None


def from_json(data: dict | str) -> Doctrine:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise DSLError(f"invalid JSON: {e.msg}", (e.lineno, e.colno)) from None
    if data.get("schema") != SCHEMA:
        raise DSLError(f"unsupported schema version {data.get('schema')!r} (expected {SCHEMA})")
    C = _window_from_json(data["window"])
    fibers = {}
    try:
        for o in C.objects:
            fd = data["fibers"][o]
            fibers[o] = InfSemilattice(fd["elements"], [tuple(p) for p in fd["order"]])
        reindex = {}
        for a in C.arrows:
            m = data["reindex"][a]
            La, Lb = fibers[C.dom[a]], fibers[C.cod[a]]
            reindex[a] = np.array([La.index[m[e]] for e in Lb.elements], dtype=np.int64)
    except (KeyError, LatticeError) as e:
        raise DSLError(f"malformed doctrine in JSON: {e}") from None
    return Doctrine(C, fibers, reindex, dict(data.get("delta", {})), name=data.get("name", ""),
                    provenance=data.get("provenance"))


# -- entry points ------------------------------------------------------------------------

def loads(text: str, name: str = "") -> Doctrine:
    """JSON when the text starts with '{', the DSL otherwise."""
    if text.lstrip().startswith("{"):
        return from_json(text)
    return elaborate(parse(text), name=name)


def load_doctrine(path: str | Path) -> Doctrine:
    p = Path(path)
    return loads(p.read_text(), name=p.stem)

"""Exporters: JSON (schema 1), Graphviz DOT for the base window, and the DSL."""
from __future__ import annotations

import json
import re

import numpy as np

from ..doctrine import Doctrine
from .dsl import DSLError, to_json

_PLAIN = re.compile(r"[A-Za-z0-9_.!'*@~|$%^&+/?]+")


def export_json(P: Doctrine, indent: int | None = None) -> str:
    return json.dumps(to_json(P), indent=indent, sort_keys=False)


def _q(s: str) -> str:
    return s if _PLAIN.fullmatch(s) else json.dumps(s)


def _dot_id(s: str) -> str:
    return json.dumps(s)


def export_dot(P: Doctrine) -> str:
    """One node per object, one edge per non-identity arrow."""
    C = P.base
    ids = set(C.identity.values())
    lines = [f"digraph {_dot_id(C.name or 'window')} {{"]
    for o in C.objects:
        lines.append(f"  {_dot_id(o)} [label={_dot_id(f'{o} ({len(P.fibers[o])})')}];")
    for a in C.arrows:
        if a not in ids:
            lines.append(f"  {_dot_id(C.dom[a])} -> {_dot_id(C.cod[a])} [label={_dot_id(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _covers(leq: np.ndarray) -> list[tuple[int, int]]:
    lt = leq & ~np.eye(len(leq), dtype=bool)
    between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(lt & ~between))]


def export_dsl(P: Doctrine) -> str:
    """DSL text. Identities are written under the DSL name ``id_<object>``."""
    C = P.base
    ids = set(C.identity.values())
    ren = {C.identity[o]: f"id_{o}" for o in C.objects}
    clash = [a for a in C.arrows if a not in ids and a in ren.values()]
    if clash:
        raise DSLError(f"arrow {clash[0]!r} is not an identity but carries an identity name")

    def n(a: str) -> str:
        return _q(ren.get(a, a))

    out = [f"# {P.name}" if P.name else "# doctrine"]
    out += [f"object {_q(o)};" for o in C.objects]
    out += [f"arrow {_q(a)} : {_q(C.dom[a])} -> {_q(C.cod[a])};" for a in C.arrows if a not in ids]
    cd = C.comp_dict()
    for g, f in sorted(cd, key=lambda k: (C.index[k[0]], C.index[k[1]])):
        if g in ids or f in ids:
            continue  # synthesized on load
        out.append(f"compose {n(g)} {n(f)} = {n(cd[(g, f)])};")
    for (l, r), c in C.products.items():
        out.append(f"product {_q(l)} {_q(r)} = {_q(c.apex)} [pr1={n(c.pr1)}, pr2={n(c.pr2)}];")
    for o in C.objects:
        L = P.fibers[o]
        body = [f"elems {' '.join(_q(e) for e in L.elements)};"]
        if L.top >= 0:
            body.append(f"top {_q(L.elements[L.top])};")
        body += [f"order {_q(L.elements[i])} <= {_q(L.elements[j])};" for i, j in _covers(L.leq)]
        out.append(f"fiber {_q(o)} {{ " + " ".join(body) + " }")
    for i, a in enumerate(C.arrows):
        if a in ids:
            continue
        La, Lb = P.fibers[C.dom[a]], P.fibers[C.cod[a]]
        pairs = ", ".join(f"{_q(Lb.elements[k])} -> {_q(La.elements[v])}" for k, v in enumerate(P.R[i].tolist()))
        out.append(f"reindex {_q(a)} {{ {pairs} }}")
    for o, e in P.delta.items():
        out.append(f"delta {_q(o)} = {_q(e)};")
    return "\n".join(out) + "\n"


EXPORTERS = {"json": export_json, "dot": export_dot, "dsl": export_dsl}

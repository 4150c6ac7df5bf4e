"""Canonical signatures and isomorphism testing.

A labelling is fixed by choosing a starting tetrahedron and one of the 24
ways of renaming its vertices; labels then spread breadth-first across the
face gluings.  Each labelling yields an integer sequence

    n, then per tetrahedron (in new order) and face: (target, perm rank),
    then per tetrahedron a 4-bit mask of material corners

and the signature is the lexicographically least sequence, written in a
base-64 style alphabet.  Unglued faces are written as target ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import perm as P
from .perm import Perm4
from .triangulation import GluedTriangulation, relabel

CanonicalSignature = str

ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+-"

_ALL = P.ALL
_COMPOSE = P.COMPOSE_TABLE
_INV = P.INVERSE_TABLE
_IDENTITY_RANK = P.RANK[P.IDENTITY]


class DisconnectedError(ValueError):
    pass


@dataclass(frozen=True)
class _Labelling:
    code: tuple[int, ...]
    order: tuple[int, ...]  # new index -> old tetrahedron
    perms: tuple[int, ...]  # per old tetrahedron: rank of pi (new local k <-> old pi[k])


def _ranked(T: GluedTriangulation):
    n = T.tet_count
    table = []
    for t in range(n):
        row = []
        for f in range(4):
            g = T.gluings[t][f]
            row.append(None if g is None else (g[0], P.RANK[tuple(g[1])]))
        table.append(row)
    material = [[T.is_material(t, v) for v in range(4)] for t in range(n)]
    return table, material


def _run(n, table, material, start, pi, best: Optional[tuple]):
    """Encode one labelling, giving up as soon as it exceeds ``best``."""
    order = [start]
    perms = [-1] * n
    perms[start] = pi
    index = [-1] * n
    index[start] = 0
    code = [n]
    state = 0 if best is not None else -1  # 0: tied with best so far, -1: already smaller
    if best is not None and best[0] != n:
        state = -1 if n < best[0] else 1
        if state == 1:
            return None

    def emit(value):
        nonlocal state
        if state == 0:
            b = best[len(code)]
            if value > b:
                return False
            if value < b:
                state = -1
        code.append(value)
        return True

    i = 0
    while i < len(order):
        t = order[i]
        pt = perms[t]
        images = _ALL[pt]
        for k in range(4):
            g = table[t][images[k]]
            if g is None:
                if not emit(n) or not emit(0):
                    return None
                continue
            u, p = g
            moved = _COMPOSE[p][pt]
            if index[u] < 0:
                index[u] = len(order)
                order.append(u)
                perms[u] = moved
            if not emit(index[u]) or not emit(_COMPOSE[_INV[perms[u]]][moved]):
                return None
        i += 1
    if len(order) != n:
        raise DisconnectedError("triangulation is disconnected")
    for t in order:
        images = _ALL[perms[t]]
        mask = 0
        for k in range(4):
            if material[t][images[k]]:
                mask |= 1 << k
        if not emit(mask):
            return None
    if state == 0:
        return None  # identical to best; keep the earlier one
    return _Labelling(tuple(code), tuple(order), tuple(perms))


def canonical_labelling(T: GluedTriangulation) -> _Labelling:
    if not T.is_connected():
        raise DisconnectedError("triangulation is disconnected")
    n = T.tet_count
    table, material = _ranked(T)
    best: Optional[_Labelling] = None
    for start in range(n):
        for pi in range(24):
            found = _run(n, table, material, start, pi, None if best is None else best.code)
            if found is not None:
                best = found
    assert best is not None
    return best


def _render(code: tuple[int, ...]) -> str:
    top = max(code)
    width = 1
    while 64**width <= top:
        width += 1
    chars = [ALPHABET[width]]
    for value in code:
        digits = []
        for _ in range(width):
            digits.append(ALPHABET[value % 64])
            value //= 64
        chars.extend(reversed(digits))
    return "".join(chars)


def canonical_signature(T: GluedTriangulation) -> CanonicalSignature:
    """Relabelling-invariant string; equal strings mean isomorphic triangulations."""
    return _render(canonical_labelling(T).code)


@dataclass(frozen=True)
class Isomorphism:
    """Tetrahedron ``t`` maps to ``tet_map[t]``; its vertex ``v`` to ``vertex_maps[t][v]``."""

    tet_map: tuple[int, ...]
    vertex_maps: tuple[Perm4, ...]

    def commutes(self, T1: GluedTriangulation, T2: GluedTriangulation) -> bool:
        if T1.tet_count != T2.tet_count or sorted(self.tet_map) != list(range(T1.tet_count)):
            return False
        for t in range(T1.tet_count):
            phi = self.vertex_maps[t]
            for f in range(4):
                g = T1.gluings[t][f]
                h = T2.gluings[self.tet_map[t]][phi[f]]
                if g is None or h is None:
                    if g is not h:
                        return False
                    continue
                u, p = g
                want = P.compose(self.vertex_maps[u], P.compose(p, P.inverse(phi)))
                if h != (self.tet_map[u], want):
                    return False
            for v in range(4):
                if T1.is_material(t, v) != T2.is_material(self.tet_map[t], phi[v]):
                    return False
        return True

    def apply(self, T: GluedTriangulation) -> GluedTriangulation:
        return relabel(T, self.tet_map, self.vertex_maps)

    def inverse(self) -> "Isomorphism":
        n = len(self.tet_map)
        tets = [0] * n
        verts: list[Perm4] = [P.IDENTITY] * n
        for t, image in enumerate(self.tet_map):
            tets[image] = t
            verts[image] = P.inverse(self.vertex_maps[t])
        return Isomorphism(tuple(tets), tuple(verts))


def is_isomorphic(T1: GluedTriangulation, T2: GluedTriangulation) -> tuple[bool, Optional[Isomorphism]]:
    """Decide isomorphism; on success also return a verified mapping ``T1 -> T2``."""
    if T1.tet_count != T2.tet_count:
        return False, None
    if not (T1.is_connected() and T2.is_connected()):
        raise DisconnectedError("triangulation is disconnected")
    a = canonical_labelling(T1)
    b = canonical_labelling(T2)
    if a.code != b.code:
        return False, None
    n = T1.tet_count
    tet_map = [0] * n
    vertex_maps: list[Perm4] = [P.IDENTITY] * n
    for i, t1 in enumerate(a.order):
        t2 = b.order[i]
        tet_map[t1] = t2
        vertex_maps[t1] = P.compose(_ALL[b.perms[t2]], P.inverse(_ALL[a.perms[t1]]))
    iso = Isomorphism(tuple(tet_map), tuple(vertex_maps))
    if not iso.commutes(T1, T2):
        raise AssertionError("equal signatures but the induced mapping does not commute with gluings")
    return True, iso

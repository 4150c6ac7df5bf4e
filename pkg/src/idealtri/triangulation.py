"""Glued triangulations of 3-manifolds: storage, skeleta, validation, text I/O.

Conventions: face ``f`` of a tetrahedron is the face opposite vertex ``f``;
edge ``(i, j)`` joins vertices ``i`` and ``j``.  A gluing ``(t, f) -> (u, p)``
identifies face ``f`` of tetrahedron ``t`` with face ``p[f]`` of ``u`` so
that vertex ``k`` of ``t`` lands on vertex ``p[k]`` of ``u``.

A vertex class whose link is a closed surface other than a sphere is *ideal*
(a cusp).  Everything else (sphere links, and vertices on the boundary of a
triangulated ball) is *material*.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from . import perm as P
from .perm import Perm4

Gluing = Optional[tuple[int, Perm4]]

EDGES: tuple[tuple[int, int], ...] = tuple(combinations(range(4), 2))
IDEAL = "ideal"
MATERIAL = "material"


class TriangulationError(ValueError):
    """Structural defect in a gluing table."""


class ParseError(TriangulationError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.reason = message
        self.line = line
        self.column = column


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller representative so class order is deterministic
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self) -> list[list]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return [sorted(g) for _, g in sorted(groups.items())]


@dataclass(frozen=True)
class EdgeClass:
    index: int
    incidences: tuple[tuple[int, int, int], ...]  # (tet, i, j) with i < j
    boundary: bool

    @property
    def degree(self) -> int:
        return len(self.incidences)


@dataclass(frozen=True)
class VertexClass:
    index: int
    incidences: tuple[tuple[int, int], ...]  # (tet, corner)
    link_euler: int
    link_closed: bool

    @property
    def kind(self) -> str:
        if self.link_closed and self.link_euler != 2:
            return IDEAL
        return MATERIAL

    @property
    def degree(self) -> int:
        return len(self.incidences)


@dataclass(frozen=True)
class GluedTriangulation:
    """Tetrahedra plus face-pairing permutations.

    ``gluings[t][f]`` is ``(u, perm)`` or ``None`` for an unglued face.  The
    instance is immutable; edge, face and vertex classes are computed once
    at construction.  ``shapes`` optionally carries one complex shape
    parameter per tetrahedron (attached to the edge pair 01/23).
    """

    gluings: tuple[tuple[Gluing, Gluing, Gluing, Gluing], ...]
    shapes: Optional[tuple[complex, ...]] = None

    edge_classes: tuple[EdgeClass, ...] = field(init=False, repr=False, compare=False)
    vertex_classes: tuple[VertexClass, ...] = field(init=False, repr=False, compare=False)
    face_classes: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )
    _edge_of: dict = field(init=False, repr=False, compare=False)
    _vertex_of: dict = field(init=False, repr=False, compare=False)
    _face_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.gluings)
        if n == 0:
            raise TriangulationError("a triangulation needs at least one tetrahedron")
        for t, row in enumerate(self.gluings):
            if len(row) != 4:
                raise TriangulationError(f"tetrahedron {t} must list four faces")
            for f, g in enumerate(row):
                if g is None:
                    continue
                u, p = g
                if not 0 <= u < n:
                    raise TriangulationError(f"gluing ({t},{f}) targets missing tetrahedron {u}")
                if not P.is_perm(p):
                    raise TriangulationError(f"gluing ({t},{f}) has invalid permutation {p}")
                if u == t and p[f] == f and all(p[k] == k for k in range(4) if k != f):
                    raise TriangulationError(
                        f"self-identity gluing: face {f} of tetrahedron {t} glued to itself by the identity"
                    )
                back = self.gluings[u][p[f]]
                if back is None or back[0] != t or tuple(back[1]) != P.inverse(p):
                    raise TriangulationError(
                        f"involution violation: ({t},{f}) -> ({u},{p[f]}) is not matched by the reverse gluing"
                    )
        if self.shapes is not None:
            if len(self.shapes) != n:
                raise TriangulationError("shape count does not match tetrahedron count")
        self._compute_skeleton()

    # -- skeleton -----------------------------------------------------------

    def _compute_skeleton(self) -> None:
        n = len(self.gluings)
        edges = _UnionFind((t, i, j) for t in range(n) for i, j in EDGES)
        corners = _UnionFind((t, v) for t in range(n) for v in range(4))
        link_edges = _UnionFind((t, v, f) for t in range(n) for v in range(4) for f in range(4) if f != v)
        link_verts = _UnionFind((t, v, w) for t in range(n) for v in range(4) for w in range(4) if w != v)
        faces = _UnionFind((t, f) for t in range(n) for f in range(4))
        boundary_edges = set()
        for t in range(n):
            for f in range(4):
                g = self.gluings[t][f]
                others = [k for k in range(4) if k != f]
                if g is None:
                    for i, j in combinations(others, 2):
                        boundary_edges.add((t, i, j))
                    continue
                u, p = g
                faces.union((t, f), (u, p[f]))
                for i, j in combinations(others, 2):
                    a, b = sorted((p[i], p[j]))
                    edges.union((t, i, j), (u, a, b))
                for v in others:
                    corners.union((t, v), (u, p[v]))
                    link_edges.union((t, v, f), (u, p[v], p[f]))
                    for w in others:
                        if w != v:
                            link_verts.union((t, v, w), (u, p[v], p[w]))

        edge_classes = []
        edge_of = {}
        for idx, members in enumerate(edges.classes()):
            bdry = any(m in boundary_edges for m in members)
            edge_classes.append(EdgeClass(idx, tuple(members), bdry))
            for m in members:
                edge_of[m] = idx

        # per-corner tallies for link Euler characteristics
        le_roots: dict = {}
        for x in link_edges.parent:
            le_roots.setdefault(link_edges.find(x), []).append(x)
        lv_roots = {link_verts.find(x) for x in link_verts.parent}

        vertex_classes = []
        vertex_of = {}
        for idx, members in enumerate(corners.classes()):
            member_set = set(members)
            n_faces = len(members)
            n_edges = 0
            closed = True
            for root, group in le_roots.items():
                if (root[0], root[1]) in member_set:
                    n_edges += 1
                    if len(group) == 1:
                        closed = False
            n_verts = sum(1 for r in lv_roots if (r[0], r[1]) in member_set)
            vertex_classes.append(VertexClass(idx, tuple(members), n_verts - n_edges + n_faces, closed))
            for m in members:
                vertex_of[m] = idx

        face_classes = []
        face_of = {}
        for idx, members in enumerate(faces.classes()):
            face_classes.append(tuple(members))
            for m in members:
                face_of[m] = idx

        object.__setattr__(self, "edge_classes", tuple(edge_classes))
        object.__setattr__(self, "vertex_classes", tuple(vertex_classes))
        object.__setattr__(self, "face_classes", tuple(face_classes))
        object.__setattr__(self, "_edge_of", edge_of)
        object.__setattr__(self, "_vertex_of", vertex_of)
        object.__setattr__(self, "_face_of", face_of)

    # -- accessors ----------------------------------------------------------

    @property
    def tet_count(self) -> int:
        return len(self.gluings)

    @property
    def closed(self) -> bool:
        return all(g is not None for row in self.gluings for g in row)

    def edge_class(self, t: int, i: int, j: int) -> EdgeClass:
        a, b = sorted((i, j))
        return self.edge_classes[self._edge_of[(t, a, b)]]

    def vertex_class(self, t: int, v: int) -> VertexClass:
        return self.vertex_classes[self._vertex_of[(t, v)]]

    def face_class(self, t: int, f: int) -> tuple[tuple[int, int], ...]:
        return self.face_classes[self._face_of[(t, f)]]

    def is_material(self, t: int, v: int) -> bool:
        return self.vertex_class(t, v).kind == MATERIAL

    def boundary_faces(self) -> list[tuple[int, int]]:
        return [(t, f) for t in range(self.tet_count) for f in range(4) if self.gluings[t][f] is None]

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for g in self.gluings[t]:
                if g is not None and g[0] not in seen:
                    seen.add(g[0])
                    stack.append(g[0])
        return len(seen) == self.tet_count

    def orientation(self) -> Optional[tuple[int, ...]]:
        """Signs per tetrahedron making every gluing orientation-reversing.

        Tetrahedron 0 of each component gets +1.  Returns ``None`` when no
        consistent choice exists.
        """
        n = self.tet_count
        signs: list[int] = [0] * n
        for start in range(n):
            if signs[start]:
                continue
            signs[start] = 1
            stack = [start]
            while stack:
                t = stack.pop()
                for g in self.gluings[t]:
                    if g is None:
                        continue
                    u, p = g
                    want = -signs[t] * P.sign(p)
                    if signs[u] == 0:
                        signs[u] = want
                        stack.append(u)
                    elif signs[u] != want:
                        return None
        return tuple(signs)

    def with_shapes(self, shapes: Optional[Sequence[complex]]) -> "GluedTriangulation":
        return GluedTriangulation(self.gluings, None if shapes is None else tuple(complex(z) for z in shapes))

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_gluings(
        cls,
        tet_count: int,
        gluings: Iterable[tuple[int, int, int, Sequence[int]]],
        shapes: Optional[Sequence[complex]] = None,
    ) -> "GluedTriangulation":
        """Build from ``(t, f, u, perm)`` records; reverse directions are filled in."""
        table: list[list[Gluing]] = [[None] * 4 for _ in range(tet_count)]
        for t, f, u, p in gluings:
            p = tuple(p)
            for (a, fa, b, pa) in ((t, f, u, p), (u, p[f], t, P.inverse(p))):
                current = table[a][fa]
                if current is not None and current != (b, pa):
                    raise TriangulationError(f"face ({a},{fa}) glued twice inconsistently")
                table[a][fa] = (b, pa)
        return cls(
            tuple(tuple(row) for row in table),  # type: ignore[arg-type]
            None if shapes is None else tuple(complex(z) for z in shapes),
        )

    @classmethod
    def from_simplices(cls, simplices: Sequence[Sequence]) -> "GluedTriangulation":
        """Glue tetrahedra given by vertex labels along matching triangles.

        Useful for simplicial balls.  Local vertex ``k`` of tetrahedron ``t``
        is ``simplices[t][k]``.
        """
        seen: dict[frozenset, tuple[int, int]] = {}
        records = []
        for t, simplex in enumerate(simplices):
            if len(set(simplex)) != 4:
                raise TriangulationError(f"simplex {t} does not have four distinct vertices")
            for f in range(4):
                key = frozenset(simplex[k] for k in range(4) if k != f)
                if key in seen:
                    u, fu = seen.pop(key)
                    other = simplices[u]
                    pos = {label: k for k, label in enumerate(other)}
                    p = [0] * 4
                    for k in range(4):
                        p[k] = fu if k == f else pos[simplex[k]]
                    records.append((t, f, u, tuple(p)))
                else:
                    seen[key] = (t, f)
        return cls.from_gluings(len(simplices), records)


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    closed: bool
    orientable: bool
    connected: bool
    cusp_count: int
    edge_classes: tuple[EdgeClass, ...]
    vertex_classes: tuple[VertexClass, ...]
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_dict(self) -> dict:
        return {
            "closed": self.closed,
            "orientable": self.orientable,
            "connected": self.connected,
            "cusp_count": self.cusp_count,
            "edge_classes": [
                {"degree": e.degree, "incidences": [list(x) for x in e.incidences]} for e in self.edge_classes
            ],
            "vertex_classes": [
                {
                    "kind": v.kind,
                    "link_euler": v.link_euler,
                    "degree": v.degree,
                    "incidences": [list(x) for x in v.incidences],
                }
                for v in self.vertex_classes
            ],
            "problems": list(self.problems),
        }


def validate(T: GluedTriangulation) -> ValidationReport:
    """Check the standing hypotheses: closed, connected, orientable, torus cusps."""
    problems = []
    closed = T.closed
    if not closed:
        problems.append(f"{len(T.boundary_faces())} unglued faces")
    connected = T.is_connected()
    if not connected:
        problems.append("triangulation is disconnected")
    orientable = T.orientation() is not None
    if not orientable:
        problems.append("not orientable")
    cusps = [v for v in T.vertex_classes if v.kind == IDEAL]
    for v in cusps:
        if v.link_euler != 0:
            problems.append(f"vertex class {v.index} has link with Euler characteristic {v.link_euler}")
    return ValidationReport(
        closed=closed,
        orientable=orientable,
        connected=connected,
        cusp_count=len(cusps),
        edge_classes=T.edge_classes,
        vertex_classes=T.vertex_classes,
        problems=tuple(problems),
    )


def skeleton_counts(T: GluedTriangulation) -> tuple[int, int, int]:
    """Numbers ``(p1, p2, p3)`` of edges, triangles and tetrahedra."""
    return len(T.edge_classes), len(T.face_classes), T.tet_count


def relabel(T: GluedTriangulation, tet_map: Sequence[int], vertex_maps: Sequence[Perm4]) -> GluedTriangulation:
    """Rename tetrahedron ``t`` to ``tet_map[t]`` and its vertex ``v`` to ``vertex_maps[t][v]``.

    Shapes survive only a pure renumbering of tetrahedra.
    """
    n = T.tet_count
    table: list[list[Gluing]] = [[None] * 4 for _ in range(n)]
    for t in range(n):
        vt = tuple(vertex_maps[t])
        for f in range(4):
            g = T.gluings[t][f]
            if g is None:
                continue
            u, p = g
            q = P.compose(tuple(vertex_maps[u]), P.compose(p, P.inverse(vt)))
            table[tet_map[t]][vt[f]] = (tet_map[u], q)
    shapes = None
    if T.shapes is not None and all(tuple(v) == P.IDENTITY for v in vertex_maps):
        new = [0j] * n
        for t in range(n):
            new[tet_map[t]] = T.shapes[t]
        shapes = tuple(new)
    return GluedTriangulation(tuple(tuple(r) for r in table), shapes)  # type: ignore[arg-type]


# -- text format ---------------------------------------------------------------

_TOKEN = re.compile(r"\S+")


def parse_triangulation(text: str, allow_boundary: bool = False) -> GluedTriangulation:
    """Parse the line-oriented triangulation format.

    Statements: ``tetrahedra <m>``, ``gluing <t> <f> -> <t'> <p0p1p2p3>`` and
    ``shape <t> <re> <im>``; ``#`` starts a comment.
    """
    count: Optional[int] = None
    table: list[list[Gluing]] = []
    origin: dict[tuple[int, int], int] = {}
    shapes: dict[int, complex] = {}

    def fail(msg, lineno, col):
        raise ParseError(msg, lineno, col)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        head, col = tokens[0]

        def integer(k, lo, hi, what):
            if k >= len(tokens):
                fail(f"missing {what}", lineno, len(line) + 1)
            tok, c = tokens[k]
            try:
                value = int(tok)
            except ValueError:
                fail(f"expected integer {what}, got {tok!r}", lineno, c)
            if not lo <= value < hi:
                fail(f"{what} {value} out of range", lineno, c)
            return value

        if head == "tetrahedra":
            if count is not None:
                fail("duplicate 'tetrahedra' statement", lineno, col)
            if len(tokens) != 2:
                fail("expected 'tetrahedra <m>'", lineno, col)
            count = integer(1, 1, 10**9, "tetrahedron count")
            table = [[None] * 4 for _ in range(count)]
        elif head == "gluing":
            if count is None:
                fail("'gluing' before 'tetrahedra'", lineno, col)
            if len(tokens) != 6 or tokens[3][0] != "->":
                fail("expected 'gluing <t> <f> -> <t'> <perm>'", lineno, col)
            t = integer(1, 0, count, "tetrahedron")
            f = integer(2, 0, 4, "face")
            u = integer(4, 0, count, "tetrahedron")
            try:
                p = P.parse(tokens[5][0])
            except ValueError as exc:
                fail(str(exc), lineno, tokens[5][1])
            if u == t and p[f] == f and p == P.IDENTITY:
                fail(f"self-identity gluing on face {f} of tetrahedron {t}", lineno, col)
            for a, fa, b, pa in ((t, f, u, p), (u, p[f], t, P.inverse(p))):
                current = table[a][fa]
                if current is not None and current != (b, pa):
                    first = origin.get((a, fa), lineno)
                    fail(
                        f"involution violation: face ({a},{fa}) already glued (line {first})",
                        lineno,
                        col,
                    )
                if current is None:
                    table[a][fa] = (b, pa)
                    origin[(a, fa)] = lineno
        elif head == "shape":
            if count is None:
                fail("'shape' before 'tetrahedra'", lineno, col)
            if len(tokens) != 4:
                fail("expected 'shape <t> <re> <im>'", lineno, col)
            t = integer(1, 0, count, "tetrahedron")
            if t in shapes:
                fail(f"duplicate shape for tetrahedron {t}", lineno, col)
            try:
                shapes[t] = complex(float(tokens[2][0]), float(tokens[3][0]))
            except ValueError:
                fail("shape components must be real numbers", lineno, tokens[2][1])
        else:
            fail(f"unknown statement {head!r}", lineno, col)

    if count is None:
        raise ParseError("missing 'tetrahedra' statement", 1)
    if not allow_boundary:
        for t in range(count):
            for f in range(4):
                if table[t][f] is None:
                    raise ParseError(f"unglued face: face {f} of tetrahedron {t}", len(text.splitlines()) or 1)
    if shapes and len(shapes) != count:
        missing = min(set(range(count)) - set(shapes))
        raise ParseError(f"shape missing for tetrahedron {missing}", len(text.splitlines()) or 1)
    shape_tuple = tuple(shapes[t] for t in range(count)) if shapes else None
    return GluedTriangulation(tuple(tuple(r) for r in table), shape_tuple)  # type: ignore[arg-type]


def serialize(T: GluedTriangulation) -> str:
    lines = [f"tetrahedra {T.tet_count}"]
    for t in range(T.tet_count):
        for f in range(4):
            g = T.gluings[t][f]
            if g is not None:
                lines.append(f"gluing {t} {f} -> {g[0]} {P.format_perm(g[1])}")
    if T.shapes is not None:
        for t, z in enumerate(T.shapes):
            lines.append(f"shape {t} {z.real!r} {z.imag!r}")
    return "\n".join(lines) + "\n"


def load(path) -> GluedTriangulation:
    with open(path, encoding="utf-8") as fh:
        return parse_triangulation(fh.read())

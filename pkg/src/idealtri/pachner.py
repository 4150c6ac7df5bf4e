"""The four 3-dimensional Pachner moves, shellings, and subdivision counts.

Every move is realised the same way.  Label the five vertices of a 4-simplex
``0..4``; the tetrahedra of its boundary are indexed by the label they miss.
A move replaces the old tetrahedra (missing the labels in ``X``) by the new
ones (missing the labels in the complement ``Y``):

    1-4: X = {4}           2-3: X = {3, 4}
    3-2: X = {2, 3, 4}     4-1: X = {0, 1, 2, 3}

Each old tetrahedron carries a map ``local vertex -> label``; new
tetrahedron ``y`` numbers its labels in increasing order.  Faces between new
tetrahedra are glued by matching labels and outer faces inherit the gluings
of the old ones.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial
from typing import Optional, Sequence

from . import perm as P
from .perm import Perm4
from .triangulation import MATERIAL, GluedTriangulation, TriangulationError

TWO_THREE = "2-3"
THREE_TWO = "3-2"
ONE_FOUR = "1-4"
FOUR_ONE = "4-1"
KINDS = (TWO_THREE, THREE_TWO, ONE_FOUR, FOUR_ONE)

_OLD_LABELS = {
    ONE_FOUR: (4,),
    TWO_THREE: (3, 4),
    THREE_TWO: (2, 3, 4),
    FOUR_ONE: (0, 1, 2, 3),
}
_LOCATION_KEY = {TWO_THREE: "face", THREE_TWO: "edge", ONE_FOUR: "tet", FOUR_ONE: "vertex"}
_DELTA = {TWO_THREE: 1, THREE_TWO: -1, ONE_FOUR: 3, FOUR_ONE: -3}


class MoveError(ValueError):
    """A move cannot be performed at the requested location."""


@dataclass(frozen=True, order=True)
class Move:
    """A Pachner move and where to perform it.

    ``location`` is ``(t, f)`` for 2-3 (a face), ``(t, i, j)`` for 3-2 (an
    edge), ``(t,)`` for 1-4 and ``(t, v)`` for 4-1 (a vertex).
    """

    kind: str
    location: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")
        sizes = {TWO_THREE: 2, THREE_TWO: 3, ONE_FOUR: 1, FOUR_ONE: 2}
        if len(self.location) != sizes[self.kind]:
            raise ValueError(f"{self.kind} location needs {sizes[self.kind]} indices")
        object.__setattr__(self, "location", tuple(int(x) for x in self.location))

    @property
    def tet_delta(self) -> int:
        return _DELTA[self.kind]

    def to_dict(self) -> dict:
        key = _LOCATION_KEY[self.kind]
        value = self.location[0] if self.kind == ONE_FOUR else list(self.location)
        return {"kind": self.kind, key: value}

    @classmethod
    def from_dict(cls, data: dict) -> "Move":
        try:
            kind = data["kind"]
            raw = data[_LOCATION_KEY[kind]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed move {data!r}") from exc
        location = (raw,) if kind == ONE_FOUR else tuple(raw)
        return cls(kind, location)

    def __str__(self) -> str:
        return f"{self.kind}@{','.join(map(str, self.location))}"


@dataclass(frozen=True)
class MoveSequence:
    moves: tuple[Move, ...]
    start_signature: str = ""
    end_signature: str = ""

    def __len__(self) -> int:
        return len(self.moves)

    def replay(self, T: GluedTriangulation) -> GluedTriangulation:
        for move in self.moves:
            T = apply(T, move)
        return T

    def to_dict(self) -> dict:
        return {
            "moves": [m.to_dict() for m in self.moves],
            "start": self.start_signature,
            "end": self.end_signature,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "MoveSequence":
        return cls(
            tuple(Move.from_dict(m) for m in data.get("moves", [])),
            data.get("start", ""),
            data.get("end", ""),
        )


@dataclass(frozen=True)
class MoveResult:
    """Outcome of a move together with how tetrahedra were renumbered."""

    triangulation: GluedTriangulation
    survivors: dict  # old index -> new index, for tetrahedra outside the region
    created: dict  # missing label y -> new index of that tetrahedron
    inverse: Move


# -- region machinery ---------------------------------------------------------


def _new_labels(y: int) -> tuple[int, ...]:
    return tuple(k for k in range(5) if k != y)


def _check_region(T: GluedTriangulation, region: dict[int, tuple[int, tuple[int, ...]]]) -> None:
    tets = [t for t, _ in region.values()]
    if len(set(tets)) != len(tets):
        raise MoveError("tetrahedra of the region are not distinct")
    for x, (t, lam) in region.items():
        for x2, (t2, lam2) in region.items():
            if x2 == x:
                continue
            f = lam.index(x2)
            g = T.gluings[t][f]
            if g is None or g[0] != t2:
                raise MoveError(f"region face ({t},{f}) is not glued to tetrahedron {t2}")
            p = g[1]
            for k in range(4):
                want = lam2.index(x) if k == f else lam2.index(lam[k])
                if p[k] != want:
                    raise MoveError("region is degenerate: internal faces are identified inconsistently")


def _rebuild(T: GluedTriangulation, kind: str, region: dict) -> tuple[GluedTriangulation, dict, dict]:
    _check_region(T, region)
    n = T.tet_count
    old_labels = sorted(region)
    new_labels = [y for y in range(5) if y not in region]
    removed = sorted(t for t, _ in region.values())
    removed_set = set(removed)

    created: dict[int, int] = {}
    survivors: dict[int, int] = {}
    if len(new_labels) >= len(removed):
        slots = removed + list(range(n, n + len(new_labels) - len(removed)))
        for y, slot in zip(new_labels, slots):
            created[y] = slot
        for t in range(n):
            if t not in removed_set:
                survivors[t] = t
        total = n + len(new_labels) - len(removed)
    else:
        for y, slot in zip(new_labels, removed):
            created[y] = slot
        dropped = set(removed[len(new_labels):])
        shift = 0
        for t in range(n):
            if t in dropped:
                shift += 1
            elif t not in removed_set:
                survivors[t] = t - shift
        total = n - len(dropped)
        # new tetrahedra in reused slots also shift past dropped ones
        created = {y: s - sum(1 for d in dropped if d < s) for y, s in created.items()}

    # phi[y][k]: new local k of tetrahedron y -> (old label x, old local) for outer faces
    def to_old(y: int, x: int) -> Perm4:
        """Map new locals of tetrahedron ``y`` to old locals of tetrahedron ``x`` across their shared face."""
        _, lam = region[x]
        mu = _new_labels(y)
        out = [0] * 4
        for k in range(4):
            out[k] = lam.index(y) if mu[k] == x else lam.index(mu[k])
        return tuple(out)  # type: ignore[return-value]

    # where each old outer face ends up: (old tet, old face) -> (new tet, phi)
    outer: dict[tuple[int, int], tuple[int, Perm4]] = {}
    for y in new_labels:
        mu = _new_labels(y)
        for k in range(4):
            x = mu[k]
            if x in region:
                phi = to_old(y, x)
                t, lam = region[x]
                outer[(t, lam.index(y))] = (created[y], phi)

    table: list[list] = [[None] * 4 for _ in range(total)]
    for t in range(n):
        if t in removed_set:
            continue
        for f in range(4):
            g = T.gluings[t][f]
            if g is None:
                continue
            u, p = g
            if u in removed_set:
                new_t, phi = outer[(u, p[f])]
                table[survivors[t]][f] = (new_t, P.compose(P.inverse(phi), p))
            else:
                table[survivors[t]][f] = (survivors[u], p)
    for y in new_labels:
        mu = _new_labels(y)
        me = created[y]
        for k in range(4):
            z = mu[k]
            if z not in region:
                # internal face shared with new tetrahedron z, opposite label y there
                nu = _new_labels(z)
                q = [0] * 4
                for j in range(4):
                    q[j] = nu.index(y) if mu[j] == z else nu.index(mu[j])
                table[me][k] = (created[z], tuple(q))
                continue
            t, lam = region[z]
            f = lam.index(y)
            _, phi = outer[(t, f)]
            g = T.gluings[t][f]
            if g is None:
                continue
            u, p = g
            if u in removed_set:
                other_t, other_phi = outer[(u, p[f])]
                table[me][k] = (other_t, P.compose(P.inverse(other_phi), P.compose(p, phi)))
            else:
                table[me][k] = (survivors[u], P.compose(p, phi))
    try:
        result = GluedTriangulation(tuple(tuple(r) for r in table))  # type: ignore[arg-type]
    except TriangulationError as exc:
        raise MoveError(f"move produces an invalid gluing: {exc}") from exc
    return result, survivors, created


def _sorted_rest(exclude: Sequence[int]) -> list[int]:
    return [k for k in range(4) if k not in exclude]


def _region_for(T: GluedTriangulation, move: Move) -> dict:
    n = T.tet_count
    loc = move.location
    if not all(0 <= x < n for x in loc[:1]):
        raise MoveError(f"tetrahedron {loc[0]} does not exist")
    t = loc[0]
    if move.kind == ONE_FOUR:
        return {4: (t, P.IDENTITY)}
    if move.kind == TWO_THREE:
        f = loc[1]
        if not 0 <= f < 4:
            raise MoveError(f"bad face index {f}")
        g = T.gluings[t][f]
        if g is None:
            raise MoveError("face lies on the boundary")
        u, p = g
        if u == t:
            raise MoveError("both sides of the face lie in the same tetrahedron")
        lam4 = [0] * 4
        lam4[f] = 3
        for label, v in enumerate(_sorted_rest([f])):
            lam4[v] = label
        lam3 = [0] * 4
        lam3[p[f]] = 4
        for v in _sorted_rest([f]):
            lam3[p[v]] = lam4[v]
        return {4: (t, tuple(lam4)), 3: (u, tuple(lam3))}
    if move.kind == THREE_TWO:
        a, b = loc[1], loc[2]
        if not (0 <= a < 4 and 0 <= b < 4) or a == b:
            raise MoveError(f"bad edge ({a},{b})")
        edge = T.edge_class(t, a, b)
        if edge.boundary:
            raise MoveError("edge lies on the boundary")
        if edge.degree != 3:
            raise MoveError(f"edge has degree {edge.degree}, not 3")
        c, d = _sorted_rest([a, b])
        lam2 = [0] * 4
        lam2[a], lam2[b], lam2[c], lam2[d] = 0, 1, 3, 4
        u, p = T.gluings[t][d]  # type: ignore[misc]
        lam4 = [0] * 4
        lam4[p[a]], lam4[p[b]], lam4[p[c]], lam4[p[d]] = 0, 1, 3, 2
        u2, q = T.gluings[t][c]  # type: ignore[misc]
        lam3 = [0] * 4
        lam3[q[a]], lam3[q[b]], lam3[q[d]], lam3[q[c]] = 0, 1, 4, 2
        return {2: (t, tuple(lam2)), 4: (u, tuple(lam4)), 3: (u2, tuple(lam3))}
    if move.kind == FOUR_ONE:
        v = loc[1]
        if not 0 <= v < 4:
            raise MoveError(f"bad vertex index {v}")
        vc = T.vertex_class(t, v)
        if vc.kind != MATERIAL or not vc.link_closed or vc.link_euler != 2:
            raise MoveError("vertex is not an interior material vertex")
        if vc.degree != 4:
            raise MoveError(f"vertex has degree {vc.degree}, not 4")
        lam3 = [0] * 4
        lam3[v] = 4
        for label, w in enumerate(_sorted_rest([v])):
            lam3[w] = label
        region = {3: (t, tuple(lam3))}
        for w in _sorted_rest([v]):
            k = lam3[w]
            u, p = T.gluings[t][w]  # type: ignore[misc]
            lam = [0] * 4
            for x in range(4):
                lam[p[x]] = 3 if x == w else lam3[x]
            region[k] = (u, tuple(lam))
        return region
    raise MoveError(f"unknown move kind {move.kind}")


# -- locations ------------------------------------------------------------------


def normalize(T: GluedTriangulation, move: Move) -> Move:
    """Rewrite ``move`` to use the least incidence of its face/edge/vertex class."""
    loc = move.location
    if move.kind == TWO_THREE:
        return Move(TWO_THREE, min(T.face_class(loc[0], loc[1])))
    if move.kind == THREE_TWO:
        return Move(THREE_TWO, min(T.edge_class(loc[0], loc[1], loc[2]).incidences))
    if move.kind == FOUR_ONE:
        return Move(FOUR_ONE, min(T.vertex_class(loc[0], loc[1]).incidences))
    return move


def _inverse_location(kind: str, created: dict) -> Move:
    if kind == TWO_THREE:
        return Move(THREE_TWO, (created[0], 2, 3))
    if kind == THREE_TWO:
        return Move(TWO_THREE, (created[0], 0))
    if kind == ONE_FOUR:
        return Move(FOUR_ONE, (created[0], 3))
    return Move(ONE_FOUR, (created[4],))


def apply_with_map(T: GluedTriangulation, move: Move) -> MoveResult:
    """Perform ``move``; also report the renumbering and the inverse move."""
    for x in move.location[:1]:
        if not 0 <= x < T.tet_count:
            raise MoveError(f"tetrahedron {x} does not exist")
    region = _region_for(T, move)
    result, survivors, created = _rebuild(T, move.kind, region)
    inverse = normalize(result, _inverse_location(move.kind, created))
    return MoveResult(result, survivors, created, inverse)


def apply(T: GluedTriangulation, move: Move) -> GluedTriangulation:
    return apply_with_map(T, move).triangulation


def invert(move: Move, T_before: GluedTriangulation) -> Move:
    """The move undoing ``move``, expressed on the triangulation it produces."""
    return apply_with_map(T_before, move).inverse


def is_applicable(T: GluedTriangulation, move: Move) -> bool:
    try:
        apply_with_map(T, move)
    except MoveError:
        return False
    return True


def applicable_moves(T: GluedTriangulation) -> list[Move]:
    """All moves that can be performed, one per face/edge/vertex class or tetrahedron."""
    moves: list[Move] = []
    for members in T.face_classes:
        t, f = members[0]
        g = T.gluings[t][f]
        if g is not None and g[0] != t:
            moves.append(Move(TWO_THREE, (t, f)))
    for edge in T.edge_classes:
        if edge.degree != 3 or edge.boundary:
            continue
        if len({inc[0] for inc in edge.incidences}) != 3:
            continue
        move = Move(THREE_TWO, edge.incidences[0])
        if is_applicable(T, move):
            moves.append(move)
    for t in range(T.tet_count):
        moves.append(Move(ONE_FOUR, (t,)))
    for vc in T.vertex_classes:
        if vc.kind != MATERIAL or vc.degree != 4 or not vc.link_closed:
            continue
        if len({inc[0] for inc in vc.incidences}) != 4:
            continue
        move = Move(FOUR_ONE, vc.incidences[0])
        if is_applicable(T, move):
            moves.append(move)
    return moves


# -- shellings --------------------------------------------------------------------


@dataclass(frozen=True)
class ShellingCheck:
    ok: bool
    failure_index: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _glued_faces(ball: GluedTriangulation, t: int, earlier: set) -> list[int]:
    return [f for f in range(4) if ball.gluings[t][f] is not None and ball.gluings[t][f][0] in earlier]


def verify_shelling(ball: GluedTriangulation, ordering: Sequence[int]) -> ShellingCheck:
    """Check that each tetrahedron meets its predecessors in 1, 2 or 3 of its faces.

    The intersection must be exactly the union of those faces: any vertex or
    edge shared with an earlier tetrahedron has to lie in one of them.
    """
    n = ball.tet_count
    if sorted(ordering) != list(range(n)):
        return ShellingCheck(False, 0, "ordering is not a permutation of the tetrahedra")
    earlier = {ordering[0]}
    for j in range(1, n):
        t = ordering[j]
        if t in earlier:
            return ShellingCheck(False, j, "tetrahedron repeated")
        faces = _glued_faces(ball, t, earlier)
        if not 1 <= len(faces) <= 3:
            return ShellingCheck(False, j, f"meets earlier tetrahedra in {len(faces)} faces")
        for v in range(4):
            touches = any(u in earlier for u, _ in ball.vertex_class(t, v).incidences)
            if touches and not any(f != v for f in faces):
                return ShellingCheck(False, j, f"vertex {v} meets earlier tetrahedra outside the shared faces")
        for a in range(4):
            for b in range(a + 1, 4):
                touches = any(u in earlier for u, _, _ in ball.edge_class(t, a, b).incidences)
                if touches and not any(f not in (a, b) for f in faces):
                    return ShellingCheck(
                        False, j, f"edge ({a},{b}) meets earlier tetrahedra outside the shared faces"
                    )
        earlier.add(t)
    return ShellingCheck(True)


def cone_over_boundary(ball: GluedTriangulation) -> GluedTriangulation:
    """The cone from a new interior point over the boundary of ``ball``.

    Boundary face ``(t, f)`` becomes a tetrahedron whose local vertex ``f`` is
    the cone point and whose other vertices are those of ``t``.
    """
    faces = ball.boundary_faces()
    if not faces:
        raise MoveError("triangulation has no boundary")
    index = {bf: i for i, bf in enumerate(faces)}
    records = []
    for (t, f), c in index.items():
        for k in range(4):
            if k == f:
                continue
            a, b = _sorted_rest([f, k])
            # walk around edge (a, b) through the interior to the other boundary face
            s, entry, ea, eb = t, f, a, b
            while True:
                leave = next(x for x in range(4) if x not in (entry, ea, eb))
                g = ball.gluings[s][leave]
                if g is None:
                    break
                u, p = g
                s, entry, ea, eb = u, p[leave], p[ea], p[eb]
            other = index[(s, leave)]
            rest = next(x for x in range(4) if x not in (leave, ea, eb))
            q = [0] * 4
            q[f], q[a], q[b], q[k] = leave, ea, eb, rest
            records.append((c, k, other, tuple(q)))
    return GluedTriangulation.from_gluings(len(faces), records)


def star_shellable_ball(ball: GluedTriangulation, ordering: Sequence[int]) -> MoveSequence:
    """Moves turning a shellable ball into the cone over its boundary.

    One 1-4 move on the first tetrahedron, then for each later tetrahedron a
    2-3, 3-2 or 4-1 move according to whether it meets its predecessors in
    one, two or three faces.  The moves replay on ``ball`` itself.
    """
    check = verify_shelling(ball, ordering)
    if not check:
        raise MoveError(f"not a shelling: fails at index {check.failure_index} ({check.reason})")
    moves: list[Move] = []
    current = ball
    where = {t: t for t in range(ball.tet_count)}

    def step(move: Move) -> None:
        nonlocal current, where
        move = normalize(current, move)
        result = apply_with_map(current, move)
        moves.append(move)
        where = {orig: result.survivors[cur] for orig, cur in where.items() if cur in result.survivors}
        current = result.triangulation

    step(Move(ONE_FOUR, (ordering[0],)))
    earlier = {ordering[0]}
    for t in ordering[1:]:
        faces = _glued_faces(ball, t, earlier)
        here = where[t]
        if len(faces) == 1:
            step(Move(TWO_THREE, (here, faces[0])))
        elif len(faces) == 2:
            a, b = _sorted_rest(faces)
            step(Move(THREE_TWO, (here, a, b)))
        else:
            (v,) = _sorted_rest(faces)
            step(Move(FOUR_ONE, (here, v)))
        earlier.add(t)
    from .canon import canonical_signature

    return MoveSequence(tuple(moves), canonical_signature(ball), canonical_signature(current))


# -- counting ---------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexCounts:
    s0: int = 0
    s1: int = 0
    s2: int = 0
    s3: int = 0

    def __post_init__(self):
        for name in ("s0", "s1", "s2", "s3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)


def derived_counts(counts: SimplexCounts, level: int) -> SimplexCounts:
    """Counts after the partial derived subdivision that keeps the ``level``-skeleton.

    An ``i``-simplex with ``i > level`` is coned over its subdivided boundary
    and so splits into ``(i+1)!/(level+1)!`` pieces; ``level = 0`` is the full
    derived subdivision and ``level = 3`` changes nothing.
    """
    if level not in (0, 1, 2, 3):
        raise ValueError(f"level must be 0, 1, 2 or 3, got {level}")
    values = counts.as_tuple()
    scaled = [v if i <= level else v * (factorial(i + 1) // factorial(level + 1)) for i, v in enumerate(values)]
    return SimplexCounts(*scaled)

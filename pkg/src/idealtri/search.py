"""Budgeted search in the Pachner move graph.

States are triangulations up to isomorphism, keyed by canonical signature.
``connect`` runs a bidirectional breadth-first search; the half of the path
found from the target side is replayed onto the actual triangulation reached
from the source by carrying each inverse move across an isomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .canon import Isomorphism, canonical_signature, is_isomorphic
from .pachner import Move, MoveSequence, apply, apply_with_map, applicable_moves, normalize
from .triangulation import GluedTriangulation


class SearchError(RuntimeError):
    pass


class NoPathFound(SearchError):
    """Search space within the budget was exhausted without meeting."""


class StateCapHit(SearchError):
    """The search stopped because it visited ``max_states`` states."""


@dataclass(frozen=True)
class SearchBudget:
    max_moves: int = 6
    max_tetrahedra: Optional[int] = None
    max_states: int = 20000

    def __post_init__(self):
        if self.max_moves < 0:
            raise ValueError("max_moves must be nonnegative")
        if self.max_tetrahedra is not None and self.max_tetrahedra < 1:
            raise ValueError("max_tetrahedra must be positive")
        if self.max_states < 1:
            raise ValueError("max_states must be positive")

    def tet_cap(self, *triangulations: GluedTriangulation) -> int:
        largest = max(T.tet_count for T in triangulations)
        if self.max_tetrahedra is None:
            return largest + 4
        if self.max_tetrahedra < largest:
            raise ValueError(f"max_tetrahedra={self.max_tetrahedra} is below an endpoint's size {largest}")
        return self.max_tetrahedra


def neighbors(T: GluedTriangulation, budget: SearchBudget) -> list[tuple[Move, GluedTriangulation, str]]:
    """One entry per applicable move whose result fits under the tetrahedron cap."""
    cap = budget.tet_cap(T)
    out = []
    for move in applicable_moves(T):
        if T.tet_count + move.tet_delta > cap:
            continue
        result = apply(T, move)
        out.append((move, result, canonical_signature(result)))
    return out


def _expand(T: GluedTriangulation, cap: int):
    for move in applicable_moves(T):
        if T.tet_count + move.tet_delta > cap:
            continue
        result = apply(T, move)
        yield move, result, canonical_signature(result)


@dataclass
class _Side:
    root: GluedTriangulation
    # signature -> (depth, parent signature, move from parent representative, representative)
    seen: dict = field(default_factory=dict)
    frontier: list = field(default_factory=list)
    depth: int = 0

    def path(self, sig: str) -> list[tuple[GluedTriangulation, Move]]:
        """Steps ``(before, move)`` from the root to the representative of ``sig``."""
        steps = []
        while True:
            _, parent, move, _ = self.seen[sig]
            if parent is None:
                break
            steps.append((self.seen[parent][3], move))
            sig = parent
        steps.reverse()
        return steps


def _transport(move: Move, iso: Isomorphism) -> Move:
    loc = move.location
    t = loc[0]
    image = iso.tet_map[t]
    phi = iso.vertex_maps[t]
    return Move(move.kind, (image,) + tuple(phi[x] for x in loc[1:]))


def _verify(T1: GluedTriangulation, T2: GluedTriangulation, moves: list[Move]) -> MoveSequence:
    seq = MoveSequence(tuple(moves), canonical_signature(T1), canonical_signature(T2))
    end = seq.replay(T1)
    ok, _ = is_isomorphic(end, T2)
    if not ok:
        raise AssertionError("search produced a sequence that does not reach the target")
    return seq


def connect(T1: GluedTriangulation, T2: GluedTriangulation, budget: Optional[SearchBudget] = None) -> MoveSequence:
    """Shortest move sequence from ``T1`` to a triangulation isomorphic to ``T2``.

    Raises ``NoPathFound`` when no path exists within ``max_moves`` moves and
    the tetrahedron cap, and ``StateCapHit`` when ``max_states`` is reached
    first.  The returned sequence is replayed and checked before returning.
    """
    budget = budget or SearchBudget()
    cap = budget.tet_cap(T1, T2)
    s1, s2 = canonical_signature(T1), canonical_signature(T2)
    if s1 == s2:
        return _verify(T1, T2, [])
    a, b = _Side(T1), _Side(T2)
    a.seen[s1] = (0, None, None, T1)
    b.seen[s2] = (0, None, None, T2)
    a.frontier, b.frontier = [s1], [s2]

    meeting = None
    while meeting is None:
        if a.depth + b.depth >= budget.max_moves or not a.frontier or not b.frontier:
            raise NoPathFound(
                f"no sequence of at most {budget.max_moves} moves within {cap} tetrahedra"
            )
        side, other = (a, b) if len(a.frontier) <= len(b.frontier) else (b, a)
        fresh = []
        for sig in sorted(side.frontier):
            rep = side.seen[sig][3]
            for move, result, rsig in _expand(rep, cap):
                if rsig in side.seen:
                    continue
                if len(a.seen) + len(b.seen) >= budget.max_states:
                    raise StateCapHit(f"visited {budget.max_states} states without connecting")
                side.seen[rsig] = (side.depth + 1, sig, move, result)
                fresh.append(rsig)
        side.depth += 1
        side.frontier = fresh
        hits = sorted((other.seen[s][0], s) for s in fresh if s in other.seen)
        if hits:
            meeting = hits[0][1]

    moves = [m for _, m in a.path(meeting)]
    current = a.seen[meeting][3]
    # walk back along the target side, carrying each inverse onto ``current``
    for before, move in reversed(b.path(meeting)):
        step = apply_with_map(before, move)
        ok, iso = is_isomorphic(step.triangulation, current)
        assert ok and iso is not None
        inverse = normalize(current, _transport(step.inverse, iso))
        moves.append(inverse)
        current = apply(current, inverse)
    return _verify(T1, T2, moves)


@dataclass(frozen=True)
class SphereResult:
    counts: dict  # distance -> number of distinct signatures
    truncated: bool

    def to_dict(self) -> dict:
        return {"counts": {str(k): v for k, v in sorted(self.counts.items())}, "truncated": self.truncated}


def sphere(T: GluedTriangulation, radius: int, budget: Optional[SearchBudget] = None) -> SphereResult:
    """Sizes of the breadth-first layers around ``T`` up to ``radius``."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    budget = budget or SearchBudget()
    cap = budget.tet_cap(T)
    start = canonical_signature(T)
    seen = {start: T}
    counts = {0: 1}
    frontier = [start]
    for depth in range(1, radius + 1):
        fresh = []
        for sig in sorted(frontier):
            for _, result, rsig in _expand(seen[sig], cap):
                if rsig in seen:
                    continue
                if len(seen) >= budget.max_states:
                    if fresh:
                        counts[depth] = len(fresh)
                    return SphereResult(counts, True)
                seen[rsig] = result
                fresh.append(rsig)
        if not fresh:
            break
        counts[depth] = len(fresh)
        frontier = fresh
    return SphereResult(counts, False)

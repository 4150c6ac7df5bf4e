"""Permutations of {0, 1, 2, 3}.

A permutation is stored as a plain 4-tuple ``p`` with ``p[k]`` the image of
``k``.  Composition follows function notation: ``compose(p, q)`` applies
``q`` first.  The 24 permutations are ranked in lexicographic order of their
image tuples, which is the order used by canonical signatures.
"""
from __future__ import annotations

from itertools import permutations

Perm4 = tuple[int, int, int, int]

ALL: tuple[Perm4, ...] = tuple(permutations(range(4)))  # type: ignore[assignment]
IDENTITY: Perm4 = (0, 1, 2, 3)
RANK: dict[Perm4, int] = {p: i for i, p in enumerate(ALL)}

# rank-level tables, used by the hot loop of canonical labelling
COMPOSE_TABLE: tuple[tuple[int, ...], ...] = tuple(
    tuple(RANK[tuple(p[q[k]] for k in range(4))] for q in ALL) for p in ALL  # type: ignore[misc]
)
INVERSE_TABLE: tuple[int, ...] = tuple(
    RANK[tuple(p.index(k) for k in range(4))] for p in ALL  # type: ignore[misc]
)


def is_perm(p) -> bool:
    return len(p) == 4 and sorted(p) == [0, 1, 2, 3]


def compose(p: Perm4, q: Perm4) -> Perm4:
    """Return ``p o q``."""
    return (p[q[0]], p[q[1]], p[q[2]], p[q[3]])


def inverse(p: Perm4) -> Perm4:
    inv = [0, 0, 0, 0]
    for k, image in enumerate(p):
        inv[image] = k
    return tuple(inv)  # type: ignore[return-value]


def sign(p: Perm4) -> int:
    """+1 for even permutations, -1 for odd ones."""
    s = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                s = -s
    return s


def transposition(a: int, b: int) -> Perm4:
    p = list(IDENTITY)
    p[a], p[b] = b, a
    return tuple(p)  # type: ignore[return-value]


def parse(text: str) -> Perm4:
    """Parse the four-digit form ``"0132"``."""
    if len(text) != 4 or not text.isdigit():
        raise ValueError(f"bad permutation {text!r}: expected four digits")
    p = tuple(int(c) for c in text)
    if not is_perm(p):
        raise ValueError(f"bad permutation {text!r}: not a bijection of 0..3")
    return p  # type: ignore[return-value]


def format_perm(p: Perm4) -> str:
    return "".join(str(k) for k in p)

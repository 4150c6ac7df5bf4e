"""Hyperbolic geometry of ideal tetrahedra and cusp cross-sections.

A tetrahedron's shape ``z`` (``Im z > 0``) is the edge parameter of edges
01 and 23; edges 02/13 carry ``1/(1-z)`` and edges 03/12 carry
``(z-1)/z``.  That assignment is for tetrahedra that are positively
oriented, with orientations fixed so that tetrahedron 0 is positive.  A
negatively oriented tetrahedron is read through the relabelling that swaps
vertices 2 and 3, which exchanges the two latter parameters.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import perm as P
from .triangulation import IDEAL, GluedTriangulation

PI_OVER_3 = math.pi / 3
THETA_TOL = 1e-9
RESIDUAL_TOL = 1e-9
HOLONOMY_TOL = 1e-9
EPSILON = 0.29  # lower bound for the Margulis number of cusped orientable manifolds


class GeometryError(ValueError):
    pass


# -- Lobachevsky function -------------------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli(count: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for m in range(1, count):
        total = Fraction(0)
        binom = 1
        for k in range(m):
            total += binom * B[k]
            binom = binom * (m + 1 - k) // (k + 1)
        B.append(-total / (m + 1))
    return tuple(B)


@lru_cache(maxsize=None)
def _clausen_coefficients(terms: int = 40) -> tuple[float, ...]:
    B = _bernoulli(2 * terms + 1)
    return tuple(
        float(abs(B[2 * k]) / (2 * k * math.factorial(2 * k + 1))) for k in range(1, terms + 1)
    )


def clausen2(x: float) -> float:
    """Clausen function Cl2 for ``x`` in ``[-pi, pi]`` (series about 0)."""
    if x == 0.0:
        return 0.0
    ax = abs(x)
    total = ax - ax * math.log(ax)
    sq = ax * ax
    power = ax * sq
    for c in _clausen_coefficients():
        term = c * power
        total += term
        if term < 1e-18 * total:
            break
        power *= sq
    return math.copysign(total, x)


def lobachevsky(theta: float) -> float:
    """Lobachevsky function, ``-int_0^theta log|2 sin t| dt``.

    Odd and pi-periodic; evaluated as ``Cl2(2 theta) / 2``.
    """
    r = math.fmod(theta + math.pi / 2, math.pi)
    if r < 0:
        r += math.pi
    r -= math.pi / 2
    return 0.5 * clausen2(2.0 * r)


# -- single tetrahedra --------------------------------------------------------------


def _check_shape(z: complex) -> complex:
    z = complex(z)
    if not z.imag > 0:
        raise GeometryError(f"shape {z} must have positive imaginary part")
    return z


def edge_parameters(z: complex) -> tuple[complex, complex, complex]:
    """``(z, 1/(1-z), (z-1)/z)`` for edge pairs 01/23, 02/13 and 03/12."""
    z = _check_shape(z)
    return z, 1 / (1 - z), (z - 1) / z


def angles_from_shape(z: complex) -> tuple[float, float, float]:
    """Dihedral angles ``(alpha, beta, gamma)`` at edge pairs 01/23, 02/13, 03/12."""
    a, b, c = edge_parameters(z)
    return cmath.phase(a), cmath.phase(b), cmath.phase(c)


def tet_volume(z: complex) -> float:
    return sum(lobachevsky(angle) for angle in angles_from_shape(z))


@lru_cache(maxsize=None)
def v_tet() -> float:
    """Volume of the regular ideal tetrahedron."""
    return tet_volume(cmath.exp(1j * PI_OVER_3))


@dataclass(frozen=True)
class ShapeAssignment:
    shapes: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(_check_shape(z) for z in self.shapes))

    def angles(self) -> list[tuple[float, float, float]]:
        return [angles_from_shape(z) for z in self.shapes]

    def min_angle(self) -> float:
        return min(min(a) for a in self.angles())

    def volume(self) -> float:
        return sum(tet_volume(z) for z in self.shapes)


def _as_shapes(shapes) -> ShapeAssignment:
    if isinstance(shapes, ShapeAssignment):
        return shapes
    if shapes is None:
        raise GeometryError("no shapes supplied")
    return ShapeAssignment(tuple(shapes))


def check_theta0(theta0: float) -> float:
    """Validate ``0 < theta0 <= pi/3``; values within 1e-9 above pi/3 are read as pi/3."""
    if not theta0 > 0:
        raise GeometryError(f"theta0 = {theta0} must be positive")
    if theta0 > PI_OVER_3 + THETA_TOL:
        raise GeometryError(f"theta0 = {theta0} out of range: must be at most pi/3")
    return min(theta0, PI_OVER_3)


@dataclass(frozen=True)
class ThicknessReport:
    is_thick: bool
    min_angle: float
    theta0: float

    def to_dict(self) -> dict:
        return {"is_thick": self.is_thick, "min_angle": self.min_angle, "theta0": self.theta0}


def check_thickness(shapes, theta0: float) -> ThicknessReport:
    """Whether every dihedral angle is at least ``theta0`` (up to 1e-12 rounding)."""
    theta0 = check_theta0(theta0)
    smallest = _as_shapes(shapes).min_angle()
    return ThicknessReport(smallest >= theta0 - 1e-12, smallest, theta0)


# -- gluing equations -----------------------------------------------------------

_SWAP23 = (0, 1, 3, 2)
_PAIR = {frozenset((0, 1)): 0, frozenset((2, 3)): 0, frozenset((0, 2)): 1, frozenset((1, 3)): 1,
         frozenset((0, 3)): 2, frozenset((1, 2)): 2}


def _orientation(T: GluedTriangulation) -> tuple[int, ...]:
    signs = T.orientation()
    if signs is None:
        raise GeometryError("triangulation is not orientable")
    return signs


def _effective(sign: int) -> tuple[int, int, int, int]:
    return P.IDENTITY if sign > 0 else _SWAP23


def edge_parameter(z: complex, sign: int, i: int, j: int) -> complex:
    """Shape parameter of edge ``(i, j)`` of a tetrahedron with orientation ``sign``."""
    L = _effective(sign)
    return edge_parameters(z)[_PAIR[frozenset((L[i], L[j]))]]


def gluing_residual(T: GluedTriangulation, shapes=None) -> float:
    """Largest ``|sum of log edge parameters - 2 pi i|`` over interior edge classes."""
    zs = _as_shapes(shapes if shapes is not None else T.shapes).shapes
    if len(zs) != T.tet_count:
        raise GeometryError("one shape per tetrahedron is required")
    signs = _orientation(T)
    worst = 0.0
    for edge in T.edge_classes:
        if edge.boundary:
            continue
        total = sum(cmath.log(edge_parameter(zs[t], signs[t], i, j)) for t, i, j in edge.incidences)
        worst = max(worst, abs(total - 2j * math.pi))
    return worst


# -- one-variable formulas -----------------------------------------------------------


def ball_volume(r: float) -> float:
    """Volume of a hyperbolic ball of radius ``r``: ``pi (sinh 2r - 2r)``."""
    if r < 0:
        raise GeometryError("radius must be nonnegative")
    if r < 0.05:
        # sinh(x) - x = x^3/6 (1 + x^2/20 + x^4/840 + ...)
        x = 2 * r
        s = x * x
        return math.pi * x * s / 6 * (1 + s / 20 * (1 + s / 42 * (1 + s / 72 * (1 + s / 110))))
    return math.pi * (math.sinh(2 * r) - 2 * r)


def dist_to_vertical(x: float, y: float) -> float:
    """Hyperbolic distance from ``(x, y)`` in the upper half plane to the line ``x = 0``."""
    if not y > 0:
        raise GeometryError("y must be positive")
    if x < 0:
        raise GeometryError("x must be nonnegative")
    return math.asinh(x / y)


# -- cusp cross-sections -------------------------------------------------------------

# even permutations sending 0 to v; they keep the edge-pair structure intact
_KLEIN = {0: (0, 1, 2, 3), 1: (1, 0, 3, 2), 2: (2, 3, 0, 1), 3: (3, 2, 1, 0)}


def corner_triangle(z: complex, sign: int, v: int) -> tuple[dict[int, complex], complex]:
    """Euclidean triangle cut from corner ``v``.

    Returns the positions of the other three vertices (the first two at 0
    and 1) and the triangle's shape, the edge parameter at its first vertex.
    """
    L = _effective(sign)
    Linv = P.inverse(L)
    sigma = _KLEIN[L[v]]
    zeta = edge_parameters(z)[_PAIR[frozenset((sigma[0], sigma[1]))]]
    return {Linv[sigma[1]]: 0j, Linv[sigma[2]]: 1 + 0j, Linv[sigma[3]]: zeta}, zeta


@dataclass(frozen=True)
class CuspCrossSection:
    """Normalised flat torus at a cusp.

    Coordinates are scaled and rotated so the shortest lattice vector is 1.
    ``triangles`` maps each corner ``(t, v)`` to the positions of its three
    vertices in one fundamental domain.
    """

    cusp: int
    lattice: tuple[complex, complex]
    triangles: dict
    edge_lengths: tuple[float, ...]
    area: float
    shortest: float
    corner_shapes: dict

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def to_dict(self) -> dict:
        u, v = self.lattice
        return {
            "cusp": self.cusp,
            "lattice": [u.real, u.imag, v.real, v.imag],
            "area": self.area,
            "shortest": self.shortest,
            "triangle_count": self.triangle_count,
            "edge_lengths": list(self.edge_lengths),
        }


def _lattice_basis(vectors: Sequence[complex]) -> tuple[complex, complex]:
    """A basis of the rank-2 lattice generated by ``vectors``.

    Coordinates against two independent generators are rational; after
    clearing denominators the integer generators are put in echelon form.
    """
    if not vectors:
        raise GeometryError("cusp holonomy is trivial")
    u0 = max(vectors, key=abs)
    v0 = next((w for w in vectors if abs((u0.conjugate() * w).imag) > 1e-7 * abs(u0) * abs(w)), None)
    if v0 is None:
        raise GeometryError("cusp translations are not linearly independent")
    coords = []
    for w in vectors:
        x = (v0.conjugate() * w).imag / (v0.conjugate() * u0).imag
        y = (u0.conjugate() * w).imag / (u0.conjugate() * v0).imag
        fx, fy = Fraction(x).limit_denominator(10**4), Fraction(y).limit_denominator(10**4)
        if abs(fx - x) > 1e-6 or abs(fy - y) > 1e-6:
            raise GeometryError("cusp translations do not form a lattice")
        coords.append((fx, fy))
    denom = 1
    for fx, fy in coords:
        denom = math.lcm(denom, fx.denominator, fy.denominator)
    first: Optional[tuple[int, int]] = None
    second = 0
    for fx, fy in coords:
        r = (int(fx * denom), int(fy * denom))
        if r[0] == 0:
            second = math.gcd(second, r[1])
        elif first is None:
            first = r
        else:
            g, s, t = _egcd(first[0], r[0])
            leftover = (r[0] // g) * first[1] - (first[0] // g) * r[1]
            first = (g, s * first[1] + t * r[1])
            second = math.gcd(second, leftover)
    if first is None or second == 0:
        raise GeometryError("cusp translations do not span a lattice")
    return (first[0] * u0 + first[1] * v0) / denom, (second * v0) / denom


def _egcd(x: int, y: int) -> tuple[int, int, int]:
    """``(g, s, t)`` with ``s x + t y = g = gcd(x, y) > 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while y:
        q = x // y
        x, y = y, x - q * y
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if x < 0:
        x, s0, t0 = -x, -s0, -t0
    return x, s0, t0


def gauss_reduce(u: complex, v: complex) -> tuple[complex, complex]:
    """Lagrange-Gauss reduction: ``u`` becomes a shortest nonzero lattice vector."""
    if abs(u) > abs(v):
        u, v = v, u
    while True:
        k = round((u.conjugate() * v).real / abs(u) ** 2)
        v = v - k * u
        if abs(v) >= abs(u):
            return u, v
        u, v = v, u


def develop_cusp(
    T: GluedTriangulation,
    shapes=None,
    cusp: int = 0,
    tolerance: float = RESIDUAL_TOL,
) -> CuspCrossSection:
    """Develop the flat structure on a cusp torus and normalise it.

    ``cusp`` indexes the ideal vertex classes in order.  The development
    places corner triangles by similarities ``x -> a x + b``; gluings not
    used by the spanning tree give holonomy, which must be a translation.
    """
    zs = _as_shapes(shapes if shapes is not None else T.shapes).shapes
    if len(zs) != T.tet_count:
        raise GeometryError("one shape per tetrahedron is required")
    cusps = [vc for vc in T.vertex_classes if vc.kind == IDEAL]
    if not 0 <= cusp < len(cusps):
        raise GeometryError(f"no cusp {cusp}: triangulation has {len(cusps)} cusps")
    vc = cusps[cusp]
    signs = _orientation(T)
    if vc.link_euler != 0:
        raise GeometryError(f"cusp {cusp} link has Euler characteristic {vc.link_euler}, not a torus")
    residual = gluing_residual(T, zs)
    if residual > tolerance:
        raise GeometryError(f"gluing residual {residual:.3g} exceeds tolerance {tolerance:g}")

    corners = {c: corner_triangle(zs[c[0]], signs[c[0]], c[1]) for c in vc.incidences}
    local = {c: pos for c, (pos, _) in corners.items()}
    placed: dict[tuple[int, int], tuple[complex, complex]] = {}
    start = vc.incidences[0]
    placed[start] = (1 + 0j, 0j)
    queue = [start]
    translations: list[complex] = []
    head = 0
    while head < len(queue):
        t, v = queue[head]
        head += 1
        a, b = placed[(t, v)]
        pos = local[(t, v)]
        for w in range(4):
            if w == v:
                continue
            g = T.gluings[t][w]
            if g is None:
                raise GeometryError("cusp link meets an unglued face")
            u, p = g
            other = (u, p[v])
            x, y = [k for k in range(4) if k not in (v, w)]
            theirs = local[other]
            px, py = a * pos[x] + b, a * pos[y] + b
            qx, qy = theirs[p[x]], theirs[p[y]]
            a2 = (px - py) / (qx - qy)
            b2 = px - a2 * qx
            if other not in placed:
                placed[other] = (a2, b2)
                queue.append(other)
                continue
            a1, b1 = placed[other]
            ratio = a2 / a1
            if abs(ratio - 1) > HOLONOMY_TOL:
                raise GeometryError("cusp holonomy has a rotational part: structure is not complete")
            shift = b2 - b1 * ratio
            if abs(shift) > 1e-9 * max(1.0, abs(b2)):
                translations.append(shift)

    u, v = gauss_reduce(*_lattice_basis(translations))
    norm = u.conjugate() / abs(u) ** 2
    u_n, v_n = 1 + 0j, v * norm
    if v_n.imag < 0:
        v_n = -v_n
    triangles = {}
    lengths = {}
    for c in vc.incidences:
        a, b = placed[c]
        pts = {k: (a * q + b) * norm for k, q in local[c].items()}
        triangles[c] = pts
        t, vv = c
        for w in range(4):
            if w == vv:
                continue
            x, y = [k for k in range(4) if k not in (vv, w)]
            key = min((t, vv, w), _link_edge_partner(T, t, vv, w))
            lengths[key] = abs(pts[x] - pts[y])
    area = abs((u_n.conjugate() * v_n).imag)
    return CuspCrossSection(
        cusp=cusp,
        lattice=(u_n, v_n),
        triangles=triangles,
        edge_lengths=tuple(lengths[k] for k in sorted(lengths)),
        area=area,
        shortest=abs(u_n),
        corner_shapes={c: zeta for c, (_, zeta) in corners.items()},
    )


def _link_edge_partner(T: GluedTriangulation, t: int, v: int, w: int) -> tuple[int, int, int]:
    u, p = T.gluings[t][w]  # type: ignore[misc]
    return (u, p[v], p[w])


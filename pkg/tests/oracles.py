"""Independent reference computations used by the tests.

Nothing here reuses the library's algorithms: isomorphism is decided by
exhaustive labelling search, orientability by trying every sign vector, edge
classes by walking around edges, and numeric quantities by quadrature or
arbitrary precision arithmetic.
"""
from __future__ import annotations

import cmath
import itertools
import math
import random
from pathlib import Path

from idealtri import perm as P
from idealtri.triangulation import GluedTriangulation, load

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> GluedTriangulation:
    return load(FIXTURES / name)


def regular_shapes(n: int) -> list[complex]:
    return [cmath.exp(1j * math.pi / 3)] * n


# -- combinatorics ------------------------------------------------------------------


def random_relabel(T: GluedTriangulation, rng: random.Random):
    """Random tetrahedron renumbering and vertex renamings, applied by hand."""
    n = T.tet_count
    tet_map = list(range(n))
    rng.shuffle(tet_map)
    vmaps = [tuple(rng.sample(range(4), 4)) for _ in range(n)]
    table = [[None] * 4 for _ in range(n)]
    for t in range(n):
        for f in range(4):
            g = T.gluings[t][f]
            if g is None:
                continue
            u, p = g
            q = [0] * 4
            for k in range(4):
                q[vmaps[t][k]] = vmaps[u][p[k]]
            table[tet_map[t]][vmaps[t][f]] = (tet_map[u], tuple(q))
    return GluedTriangulation(tuple(tuple(r) for r in table)), tet_map, vmaps


def random_closed_triangulation(n: int, rng: random.Random, connected: bool = True) -> GluedTriangulation:
    """Random face pairing of ``n`` tetrahedra (a pseudo-manifold, not always a manifold)."""
    while True:
        faces = [(t, f) for t in range(n) for f in range(4)]
        rng.shuffle(faces)
        records = []
        ok = True
        for i in range(0, len(faces), 2):
            (t, f), (u, g) = faces[i], faces[i + 1]
            rest_t = [k for k in range(4) if k != f]
            rest_u = [k for k in range(4) if k != g]
            rng.shuffle(rest_u)
            p = [0] * 4
            p[f] = g
            for a, b in zip(rest_t, rest_u):
                p[a] = b
            records.append((t, f, u, tuple(p)))
        try:
            T = GluedTriangulation.from_gluings(n, records)
        except ValueError:
            ok = False
        if ok and (not connected or T.is_connected()):
            return T


def brute_force_isomorphic(T1: GluedTriangulation, T2: GluedTriangulation) -> bool:
    """Try every tetrahedron bijection and every vertex relabelling.

    The search is exhaustive; partial assignments are abandoned as soon as a
    gluing between already-assigned tetrahedra fails to match.
    """
    n = T1.tet_count
    if n != T2.tet_count:
        return False
    mat1 = [[T1.is_material(t, v) for v in range(4)] for t in range(n)]
    mat2 = [[T2.is_material(t, v) for v in range(4)] for t in range(n)]

    def consistent(sigma, phis, t):
        # check gluings between t and already-labelled tetrahedra (indices < len(phis))
        phi = phis[t]
        for v in range(4):
            if mat1[t][v] != mat2[sigma[t]][phi[v]]:
                return False
        for f in range(4):
            g = T1.gluings[t][f]
            h = T2.gluings[sigma[t]][phi[f]]
            if (g is None) != (h is None):
                return False
            if g is None:
                continue
            u, p = g
            if u >= len(phis):
                continue
            want = tuple(phis[u][p[P.inverse(phi)[k]]] for k in range(4))
            if h != (sigma[u], want):
                return False
        return True

    # assign (image tetrahedron, vertex map) to tetrahedra 0, 1, ... in turn,
    # trying every unused image and all 24 maps
    sigma: list[int] = []

    def extend(phis):
        t = len(phis)
        if t == n:
            return True
        for image in range(n):
            if image in sigma:
                continue
            sigma.append(image)
            for phi in P.ALL:
                phis.append(phi)
                if consistent(sigma, phis, t) and extend(phis):
                    return True
                phis.pop()
            sigma.pop()
        return False

    return extend([])


def brute_orientable(T: GluedTriangulation) -> bool:
    for signs in itertools.product((1, -1), repeat=T.tet_count):
        if all(
            g is None or signs[g[0]] == -signs[t] * P.sign(g[1])
            for t in range(T.tet_count)
            for g in T.gluings[t]
        ):
            return True
    return False


def edge_degrees_by_walking(T: GluedTriangulation) -> list[int]:
    """Degrees of edge classes found by walking around each edge (closed triangulations)."""
    seen = set()
    degrees = []
    for t in range(T.tet_count):
        for a, b in itertools.combinations(range(4), 2):
            if (t, a, b) in seen:
                continue
            c = next(k for k in range(4) if k not in (a, b))
            s, x, y, face = t, a, b, c
            degree = 0
            while True:
                seen.add((s, min(x, y), max(x, y)))
                degree += 1
                u, p = T.gluings[s][face]
                s, x, y, entry = u, p[x], p[y], p[face]
                face = next(k for k in range(4) if k not in (x, y, entry))
                if s == t and {x, y} == {a, b} and face == c:
                    break
            degrees.append(degree)
    return sorted(degrees)


# -- numerics --------------------------------------------------------------------------


def lobachevsky_quad(theta: float) -> float:
    from scipy.integrate import quad

    def integrand(t):
        return -math.log(abs(2 * math.sin(t)))

    # the integrand has log singularities at multiples of pi
    points = [k * math.pi for k in range(-3, 4) if min(0, theta) < k * math.pi < max(0, theta)]
    value, _ = quad(integrand, 0, theta, points=points or None, limit=200, epsabs=1e-13, epsrel=1e-13)
    return value


def mp_bounds(m: int, theta0: float, eps: float = 0.29):
    """Arbitrary precision evaluation of the chain l0 -> a0 -> r0 -> s0 -> f -> N."""
    import mpmath as mp

    t = mp.mpf(theta0)
    digits = 60 + int(2 * abs(float(4 * m * mp.log10(mp.sin(t)))))
    with mp.workdps(digits):
        t = mp.mpf(theta0)
        s = mp.sin(t)
        vt = 3 * mp.clsin(2, 2 * mp.pi / 3) / 2  # 3 Lambda(pi/3), Lambda(x) = Cl2(2x)/2
        eps = mp.mpf(eps)
        l0 = s ** (4 * m) * (mp.sqrt(m * m + 2 * m) - m) / (4 * m)
        z0 = mp.sqrt(2 * m * vt * mp.cot(t)) / (eps * s)
        a0 = mp.asinh(l0 * s / z0)
        r0 = mp.asinh(mp.sinh(a0 / 2) * s)
        s0 = mp.asinh(mp.sinh(a0 / 4) * s)
        f = (4 * mp.pi * vt / (t**2 * (mp.sinh(r0) - r0)) + 1) * m
        n = 2 * mp.pi * vt / (t * mp.pi * (mp.sinh(r0) - r0))
        N = (10752 + 3584 * mp.pi / t) * f + (5 + 8 * mp.pi / t) * m
        simple_s0 = mp.mpf(2) ** -9 * s ** (4 * m + mp.mpf(7) / 2) / mp.mpf(m) ** 1.5
        simple_N = mp.mpf("2.797e12") * mp.mpf(m) ** 5.5 / s ** (12 * m + mp.mpf(27) / 2)
        return {
            "vt": vt,
            "l0": l0,
            "z0": z0,
            "a0": a0,
            "sinh_a0": mp.sinh(a0),
            "r0": r0,
            "s0": s0,
            "f": f,
            "n": n,
            "N": N,
            "s0_simplified": simple_s0,
            "N_simplified": simple_N,
            "dps": digits,
        }


def cross_ratio(p0, p1, p2, p3) -> complex:
    """Edge-01 parameter of a tetrahedron with ideal vertices at ``p0..p3``."""
    return (p3 - p1) * (p2 - p0) / ((p2 - p1) * (p3 - p0))


def solve_mobius(f, target: complex, guess: complex = 0.7 + 0.9j) -> complex:
    """Solve ``f(x) = target`` for a Moebius-type ``f`` by secant iteration."""
    x0, x1 = guess, guess + 0.31 - 0.17j
    f0, f1 = f(x0) - target, f(x1) - target
    for _ in range(100):
        if abs(f1) < 1e-15:
            break
        x0, x1 = x1, x1 - f1 * (x1 - x0) / (f1 - f0)
        f0, f1 = f1, f(x1) - target
    return x1

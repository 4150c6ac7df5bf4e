"""Explicit bounds for thick ideal triangulations.

Several quantities leave double range quickly: ``(sin theta0)^(4m)`` underflows
and the move bound ``N`` overflows for moderate ``m``.  They are computed in
log space and returned as :class:`Magnitude` values; lengths and areas that
stay in range are plain floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Optional, Union

from .hypgeom import EPSILON, GeometryError, check_theta0, v_tet
from .pachner import SimplexCounts

LN10 = math.log(10.0)
N_SIMPLIFIED_CONSTANT = 2.797e12
SMALL_LOG = -20.0  # below this, x is small enough for short series


class BoundsError(ValueError):
    pass


@total_ordering
class Magnitude:
    """A nonnegative real stored by its natural logarithm."""

    __slots__ = ("log",)

    def __init__(self, log: float):
        if math.isnan(log):
            raise ValueError("log is NaN")
        self.log = float(log)

    @classmethod
    def of(cls, x: Union[float, "Magnitude"]) -> "Magnitude":
        if isinstance(x, Magnitude):
            return x
        if x < 0:
            raise ValueError("Magnitude holds nonnegative values only")
        return cls(math.log(x) if x > 0 else -math.inf)

    def __float__(self) -> float:
        if self.log > 709.0:
            return math.inf
        return math.exp(self.log)

    @property
    def log10(self) -> float:
        return self.log / LN10

    def mantissa_exponent(self) -> tuple[float, int]:
        """``(m, e)`` with value ``m * 10**e`` and ``1 <= m < 10``."""
        if self.log == -math.inf:
            return 0.0, 0
        e = math.floor(self.log10)
        m = 10 ** (self.log10 - e)
        if m >= 10.0:
            m, e = m / 10, e + 1
        return m, e

    def __mul__(self, other):
        return Magnitude(self.log + Magnitude.of(other).log)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Magnitude(self.log - Magnitude.of(other).log)

    def __add__(self, other):
        a, b = self.log, Magnitude.of(other).log
        if a < b:
            a, b = b, a
        if b == -math.inf:
            return Magnitude(a)
        return Magnitude(a + math.log1p(math.exp(b - a)))

    __radd__ = __add__

    def __pow__(self, k: float):
        return Magnitude(self.log * k)

    def __eq__(self, other):
        try:
            return self.log == Magnitude.of(other).log
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.log < Magnitude.of(other).log

    def __hash__(self):
        return hash(self.log)

    def __repr__(self) -> str:
        m, e = self.mantissa_exponent()
        return f"Magnitude({m:.6f}e{e:+d})"

    def __str__(self) -> str:
        m, e = self.mantissa_exponent()
        return f"{m:.6g}e{e:+d}"

    def to_dict(self) -> dict:
        m, e = self.mantissa_exponent()
        return {"mantissa": m, "exponent": e, "log": self.log, "value": float(self)}


Real = Union[float, Magnitude]


# -- small-argument helpers, all taking and returning natural logs -------------------


def log_sinh(lx: float) -> float:
    """``log(sinh(x))`` given ``log(x)``."""
    if lx < SMALL_LOG:
        return lx + math.exp(2 * lx) / 6
    x = math.exp(lx)
    if x > 700:
        return x - math.log(2.0)
    return math.log(math.sinh(x))


def log_asinh(lx: float) -> float:
    """``log(asinh(x))`` given ``log(x)``."""
    if lx < SMALL_LOG:
        return lx + math.log1p(-math.exp(2 * lx) / 6)
    return math.log(math.asinh(math.exp(lx)))


def log_sinh_minus_id(lx: float) -> float:
    """``log(sinh(x) - x)`` given ``log(x)``; accurate for tiny ``x``."""
    x = math.exp(lx)
    if x < 0.5:
        s = x * x
        series = 1 + s / 20 * (1 + s / 42 * (1 + s / 72 * (1 + s / 110 * (1 + s / 156))))
        return 3 * lx - math.log(6.0) + math.log(series)
    return math.log(math.sinh(x) - x)


# -- parameters ---------------------------------------------------------------------


@dataclass(frozen=True)
class ThicknessParams:
    m1: int
    m2: int
    theta0: float
    epsilon: float = EPSILON
    vtet: float = 0.0

    def __post_init__(self):
        for name in ("m1", "m2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise BoundsError(f"{name} must be a positive integer")
        try:
            object.__setattr__(self, "theta0", check_theta0(self.theta0))
        except GeometryError as exc:
            raise BoundsError(str(exc)) from exc
        if not EPSILON <= self.epsilon < 1:
            raise BoundsError(f"epsilon = {self.epsilon} must lie in [0.29, 1)")
        if not self.vtet:
            object.__setattr__(self, "vtet", v_tet())
        if not 1 < self.vtet < 1.015:
            raise BoundsError("v_tet outside (1, 1.015)")

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    @classmethod
    def total(cls, m: int, theta0: float, epsilon: float = EPSILON) -> "ThicknessParams":
        """Parameters for a total tetrahedron count ``m`` (split as evenly as possible)."""
        if m < 2:
            raise BoundsError("total tetrahedron count must be at least 2")
        return cls(m - m // 2, m // 2, theta0, epsilon)


def _theta(theta0: float) -> float:
    try:
        return check_theta0(theta0)
    except GeometryError as exc:
        raise BoundsError(str(exc)) from exc


# -- cusp and torus constants ------------------------------------------------------------


def log_l0(n: int, theta0: float) -> float:
    # sqrt(n^2 + 8n) - n rewritten as 8 / (sqrt(1 + 8/n) + 1) to avoid cancellation
    return n * math.log(math.sin(theta0)) + math.log(2.0 / (math.sqrt(1 + 8.0 / n) + 1)) - math.log(n)


def torus_edge_bounds(n: int, A: float, theta0: float) -> tuple[Magnitude, float]:
    """Edge-length window ``(l0(n), L0(A))`` for a thick torus triangulation.

    ``l0(n) = (sin t)^n (sqrt(n^2 + 8n) - n) / (4n)`` and ``L0(A) = 2 sqrt(A cot t)``.
    """
    theta0 = _theta(theta0)
    if n < 1 or int(n) != n:
        raise BoundsError("n must be a positive integer")
    if not A > 0:
        raise BoundsError("A must be positive")
    return Magnitude(log_l0(int(n), theta0)), 2 * math.sqrt(A / math.tan(theta0))


def circumradius_bound(L0: float, theta0: float) -> float:
    if not L0 > 0:
        raise BoundsError("L0 must be positive")
    return L0 / (2 * math.sin(_theta(theta0)))


@dataclass(frozen=True)
class CuspConstants:
    l0: Magnitude
    z0: float
    A0: float
    h0_max: float


def _cusp(m: int, t: float, eps: float, vt: float) -> CuspConstants:
    l0 = Magnitude(log_l0(4 * m, t))
    z0 = math.sqrt(2 * m * vt / math.tan(t)) / (eps * math.sin(t))
    A0 = 2 * m * vt / eps**2
    return CuspConstants(l0, z0, A0, 1 / eps)


def cusp_constants(params: ThicknessParams) -> CuspConstants:
    """``l0`` at ``n = 4m``, the height ``z0``, area cap ``A0`` and cusp height cap ``1/eps``."""
    return _cusp(params.m, params.theta0, params.epsilon, params.vtet)


# -- radii ------------------------------------------------------------------------------


def r_of_t(t: Real, theta0: float) -> Real:
    """``asinh(sinh(t) sin theta0)``; a Magnitude argument gives a Magnitude result."""
    theta0 = _theta(theta0)
    if isinstance(t, Magnitude):
        if t.log == -math.inf:
            return t
        return Magnitude(log_asinh(log_sinh(t.log) + math.log(math.sin(theta0))))
    if t < 0:
        raise BoundsError("t must be nonnegative")
    return math.asinh(math.sinh(t) * math.sin(theta0))


@dataclass(frozen=True)
class Radii:
    a0: Magnitude
    r0: Magnitude
    s0_exact: Magnitude


def _radii(m: int, t: float, eps: float, vt: float) -> Radii:
    c = _cusp(m, t, eps, vt)
    a0 = Magnitude(log_asinh(c.l0.log + math.log(math.sin(t)) - math.log(c.z0)))
    r0 = r_of_t(a0 / 2, t)
    s0 = r_of_t(a0 / 4, t)
    return Radii(a0, r0, s0)  # type: ignore[arg-type]


def thickness_radii(params: ThicknessParams) -> Radii:
    """``a0 = asinh(l0 sin t / z0)``, ``r0 = r(a0/2)`` and ``s0 = r(a0/4)``."""
    return _radii(params.m, params.theta0, params.epsilon, params.vtet)


def systole_bound_simplified(m: int, theta0: float) -> Magnitude:
    """``2^-9 (sin theta0)^(4m + 7/2) / m^(3/2)``."""
    theta0 = _theta(theta0)
    if m < 1 or int(m) != m:
        raise BoundsError("m must be a positive integer")
    return Magnitude(-9 * math.log(2.0) + (4 * m + 3.5) * math.log(math.sin(theta0)) - 1.5 * math.log(m))


def systole_bounds(m: int, theta0: float, epsilon: float = EPSILON) -> tuple[Magnitude, Magnitude]:
    """``(s0_exact, s0_simplified)`` for one triangulation with ``m`` tetrahedra."""
    if m < 1 or int(m) != m:
        raise BoundsError("m must be a positive integer")
    theta0 = _theta(theta0)
    if not EPSILON <= epsilon < 1:
        raise BoundsError(f"epsilon = {epsilon} must lie in [0.29, 1)")
    return _radii(int(m), theta0, epsilon, v_tet()).s0_exact, systole_bound_simplified(m, theta0)


# -- intersection complexity and move counts -------------------------------------------


@dataclass(frozen=True)
class IntersectionBounds:
    n_components: Magnitude
    f: Magnitude


def intersection_bounds(params: ThicknessParams) -> IntersectionBounds:
    t, vt, m = params.theta0, params.vtet, params.m
    r0 = thickness_radii(params).r0
    lball = log_sinh_minus_id(r0.log)  # vol B(r0/2) = pi (sinh r0 - r0)
    n = Magnitude(math.log(2 * vt / t) - lball)
    f = (Magnitude(math.log(4 * math.pi * vt / t**2) - lball) + 1.0) * m
    return IntersectionBounds(n, f)


def move_accounting(s: SimplexCounts, p: SimplexCounts, theta0: float) -> tuple[float, float]:
    """Move counts for starring a complex, without and with its own counts ``p``.

    ``(4 pi/t) s1 + 2 s2 + s3`` and
    ``(8 pi/t) s1 + 12 s2 + 24 s3 + (4 pi/t) p1 + 2 p2 + p3``.
    """
    t = _theta(theta0)
    k = math.pi / t
    lem35 = 4 * k * s.s1 + 2 * s.s2 + s.s3
    full = 8 * k * s.s1 + 12 * s.s2 + 24 * s.s3 + 4 * k * p.s1 + 2 * p.s2 + p.s3
    return lem35, full


@dataclass(frozen=True)
class PachnerBound:
    N_exact: Magnitude
    N_simplified: Optional[Magnitude]
    s_cap: Magnitude
    simplified_applicable: bool


def N_from_f(f: Real, m: int, theta0: float) -> Magnitude:
    """``(10752 + 3584 pi/t) f + (5 + 8 pi/t) m``."""
    k = math.pi / theta0
    return Magnitude.of(f) * (10752 + 3584 * k) + (5 + 8 * k) * m


def N_simplified(m: int, theta0: float) -> Magnitude:
    """``2.797e12 m^(11/2) / (sin theta0)^(12m + 27/2)``."""
    theta0 = _theta(theta0)
    return Magnitude(
        math.log(N_SIMPLIFIED_CONSTANT) + 5.5 * math.log(m) - (12 * m + 13.5) * math.log(math.sin(theta0))
    )


def pachner_bound(params: ThicknessParams) -> PachnerBound:
    m = params.m
    if m < 2:
        raise BoundsError("need m >= 2")
    f = intersection_bounds(params).f
    exact = N_from_f(f, m, params.theta0)
    applicable = m >= 4
    simplified = N_simplified(m, params.theta0) if applicable else None
    return PachnerBound(exact, simplified, f * 112, applicable)


# -- report -----------------------------------------------------------------------------

REFERENCES = {
    "l0": "Remark constants: l0 = (sin t)^(4m) (sqrt(m^2+2m) - m)/(4m)",
    "L0": "Lemma torusedgebounds: L0(A) = 2 sqrt(A cot t)",
    "circumradius_bound": "Lemma circumrad: L0/(2 sin t)",
    "z0": "Remark constants: z0 = sqrt(2 m v_tet cot t)/(eps sin t)",
    "A0": "Remark constants: A0 = 2 m v_tet/eps^2",
    "h0_max": "Lemma cuspbounds: h0(c) <= 1/eps",
    "a0": "Lemma edgeball: a0 = asinh(l0 sin t/z0)",
    "r0": "Lemma sectorvol: r0 = asinh(sinh(a0/2) sin t)",
    "s0_exact": "Lemma mainlem3: s0 = asinh(sinh(a0/4) sin t)",
    "s0_simplified": "Theorem 3: 2^-9 (sin t)^(4m+7/2)/m^(3/2)",
    "n_components": "Lemma finiteint: n <= 2 pi v_tet/(t vol B(r0/2))",
    "f": "Theorem mainsubthm: f = (4 pi v_tet/(t^2 (sinh r0 - r0)) + 1) m",
    "N_exact": "Lemma mainlem1: N = (10752 + 3584 pi/t) f + (5 + 8 pi/t) m",
    "N_simplified": "Theorem 1: 2.797e12 m^(11/2)/(sin t)^(12m+27/2)",
    "lem35_bound": "Lemma Lem3.5: (4 pi/t) s1 + 2 s2 + s3 with s1, s2 <= 2s, s3 <= s",
    "pachnerlem_bound": "Lemma Pachnerlem applied to both triangulations (proof of Lemma mainlem1)",
    "s_cap": "Lemma polycount: s <= 112 f",
}


@dataclass(frozen=True)
class BoundsReport:
    params: ThicknessParams
    l0: Magnitude
    L0: float
    circumradius_bound: float
    z0: float
    A0: float
    h0_max: float
    a0: Magnitude
    r0: Magnitude
    s0_exact: Magnitude
    s0_simplified: Magnitude
    n_components: Magnitude
    f: Magnitude
    N_exact: Magnitude
    N_simplified: Optional[Magnitude]
    lem35_bound: Magnitude
    pachnerlem_bound: Magnitude
    s_cap: Magnitude

    def to_dict(self) -> dict:
        out: dict = {
            "m1": self.params.m1,
            "m2": self.params.m2,
            "m": self.params.m,
            "theta0": self.params.theta0,
            "epsilon": self.params.epsilon,
            "v_tet": self.params.vtet,
            "N_simplified_applicable": self.N_simplified is not None,
            "fields": {},
        }
        for name, ref in REFERENCES.items():
            value = getattr(self, name)
            if value is None:
                entry = {"value": None}
            elif isinstance(value, Magnitude):
                entry = value.to_dict()
            else:
                entry = {"value": value}
            entry["reference"] = ref
            out["fields"][name] = entry
        return out


def bounds_report(m1: int, m2: int, theta0: float, epsilon: float = EPSILON) -> BoundsReport:
    params = ThicknessParams(m1, m2, theta0, epsilon)
    c = cusp_constants(params)
    _, L0 = torus_edge_bounds(4 * params.m, c.A0, params.theta0)
    radii = thickness_radii(params)
    inter = intersection_bounds(params)
    pb = pachner_bound(params)
    # counts entering the starring bounds: s3 <= s, s2 <= 2 s, s1 <= 2 s with
    # s <= 112 f; each triangulation has p1 <= 2 m_i, p2 = 2 m_i, p3 = m_i
    s = pb.s_cap
    k = math.pi / params.theta0
    lem35 = s * (4 * k * 2 + 2 * 2 + 1)
    per_side = s * (8 * k * 2 + 12 * 2 + 24)
    pachnerlem = per_side * 2 + (4 * k * 2 + 2 * 2 + 1) * params.m
    return BoundsReport(
        params=params,
        l0=c.l0,
        L0=L0,
        circumradius_bound=circumradius_bound(L0, params.theta0),
        z0=c.z0,
        A0=c.A0,
        h0_max=c.h0_max,
        a0=radii.a0,
        r0=radii.r0,
        s0_exact=radii.s0_exact,
        s0_simplified=systole_bound_simplified(params.m, params.theta0),
        n_components=inter.n_components,
        f=inter.f,
        N_exact=pb.N_exact,
        N_simplified=pb.N_simplified,
        lem35_bound=lem35,
        pachnerlem_bound=pachnerlem,
        s_cap=pb.s_cap,
    )

"""Gauss map of a base vertex with three incident 60-degree dome triangles.

The star at a base vertex b (placed at the origin, base in z = 0) has edge
rays ``r1`` (base edge, along +x), ``s1``, ``s2`` and ``r3`` (base edge at the
base angle beta). Triangles ``t1 = (r1, s1)``, ``t2 = (s1, s2)`` and
``t3 = (s2, r3)`` each have a 60-degree angle at b. Fixing beta leaves one
degree of freedom, parameterized here by the dihedral ``delta1`` along r1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import OutOfRange, Unrealizable

__all__ = [
    "VertexStar",
    "GaussMapReport",
    "solve_arc",
    "solve_arc_y",
    "spherical_angle",
    "arc_length",
    "make_star",
    "realizable_interval",
    "symmetric_star",
    "analyze_vertex_star",
    "sample_stars",
]

_COS_EPS = 1e-12
N0 = np.array([0.0, 0.0, -1.0])


def _deg(x: float) -> float:
    return math.degrees(x)


def arc_length(p: np.ndarray, q: np.ndarray) -> float:
    """Great-circle distance between unit vectors, degrees."""
    return _deg(math.atan2(np.linalg.norm(np.cross(p, q)), float(np.dot(p, q))))


def spherical_angle(at: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    """Angle at ``at`` between the great arcs towards p and q, degrees."""
    tp = p - np.dot(p, at) * at
    tq = q - np.dot(q, at) * at
    return _deg(math.atan2(np.linalg.norm(np.cross(tp, tq)), float(np.dot(tp, tq))))


def _clip_cos(value: float, what: str) -> float:
    if value < -1.0 - _COS_EPS or value > 1.0 + _COS_EPS:
        raise OutOfRange(f"cos {what} = {value} outside [-1, 1]")
    return min(1.0, max(-1.0, value))


def solve_arc(A: float, C: float) -> float:
    """|x| from the spherical cosine law with a 120-degree angle at n3."""
    if not (0.0 < A < 180.0 and 0.0 < C < 180.0):
        raise OutOfRange(f"angles must lie in (0, 180): A={A}, C={C}")
    a, c = math.radians(A), math.radians(C)
    val = (-0.5 + math.cos(a) * math.cos(c)) / (math.sin(a) * math.sin(c))
    return _deg(math.acos(_clip_cos(val, "|x|")))


def solve_arc_y(B: float, D: float) -> float:
    """|y| from the spherical cosine law with a 120-degree angle at n1."""
    if not (0.0 < B < 180.0 and 0.0 < D < 180.0):
        raise OutOfRange(f"angles must lie in (0, 180): B={B}, D={D}")
    b, d = math.radians(B), math.radians(D)
    val = (math.cos(b) - 0.5 * math.cos(d)) / (math.sin(math.radians(120.0)) * math.sin(d))
    return _deg(math.acos(_clip_cos(val, "|y|")))


@dataclass(frozen=True)
class VertexStar:
    beta: float
    # dihedrals along r1, s1, s2, r3 (interior, degrees)
    dihedrals: tuple[float, float, float, float]
    rays: np.ndarray = field(repr=False)  # r1, s1, s2, r3 as rows
    normals: np.ndarray = field(repr=False)  # n1, n2, n3 (outward) as rows
    n0: np.ndarray = field(default_factory=lambda: N0.copy(), repr=False)

    @property
    def delta1(self) -> float:
        return self.dihedrals[0]

    @property
    def delta3(self) -> float:
        return self.dihedrals[3]


@dataclass
class GaussMapReport:
    arc_x_deg: float
    arc_y_deg: float
    A: float
    B: float
    C: float
    D: float
    n2_up: bool
    n1_or_n3_down: bool
    n1_down: bool
    n3_down: bool
    swapped: bool  # t1 and t3 exchanged to get A >= B
    arc_x_direct: float
    arc_y_direct: float
    formula_agrees: bool


def _face_dihedral(edge: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ua = a - np.dot(a, edge) * edge
    ub = b - np.dot(b, edge) * edge
    return _deg(math.atan2(np.linalg.norm(np.cross(ua, ub)), float(np.dot(ua, ub))))


def _convex_star(rays: np.ndarray) -> tuple[bool, tuple[float, ...], np.ndarray]:
    """Check that the cone over the rays (plus the base) is convex."""
    r1, s1, s2, r3 = rays
    inside = unit(r1 + s1 + s2 + r3)
    pairs = [(r1, s1), (s1, s2), (s2, r3)]
    normals = []
    for a, b in pairs:
        n = unit(np.cross(a, b))
        if np.dot(n, inside) > 0:
            n = -n
        normals.append(n)
    normals = np.array(normals)
    # convex iff every ray is on the inner side of every face plane
    all_rays = np.vstack([rays])
    ok = bool(np.all(all_rays @ normals.T <= 1e-12)) and bool(np.all(rays[:, 2] >= -1e-12))
    # interior dihedrals via the opposite ray of each neighbour
    d1 = _face_dihedral(r1, s1, _base_dir(r1, r3))
    d2 = _face_dihedral(s1, r1, s2)
    d3 = _face_dihedral(s2, s1, r3)
    d4 = _face_dihedral(r3, s2, _base_dir(r3, r1))
    return ok, (d1, d2, d3, d4), normals


def _base_dir(edge: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Direction inside the base face, perpendicular to ``edge``."""
    v = other - np.dot(other, edge) * edge
    return v


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def make_star(beta: float, delta1: float) -> VertexStar:
    """Star with base angle ``beta`` and dihedral ``delta1`` along r1 (degrees)."""
    if not (0.0 < beta < 180.0):
        raise Unrealizable(f"base angle {beta} outside (0, 180)")
    b, d = math.radians(beta), math.radians(delta1)
    r1 = np.array([1.0, 0.0, 0.0])
    r3 = np.array([math.cos(b), math.sin(b), 0.0])
    w = np.array([0.0, math.cos(d), math.sin(d)])
    s1 = 0.5 * r1 + (math.sqrt(3.0) / 2.0) * w
    c = float(np.dot(s1, r3))
    alpha = 1.0 / (2.0 * (1.0 + c))
    cross = np.cross(s1, r3)
    denom = 1.0 - c * c
    g2 = (1.0 - 2.0 * alpha * alpha * (1.0 + c)) / denom if denom > 0 else -1.0
    if g2 < -1e-12:
        raise Unrealizable(f"no 60-degree triangle t2 for beta={beta}, delta1={delta1}")
    g = math.sqrt(max(g2, 0.0))
    best = None
    for sign in (1.0, -1.0):
        s2 = alpha * (s1 + r3) + sign * g * cross
        rays = np.array([r1, s1, s2, r3])
        ok, dih, normals = _convex_star(rays)
        if ok and all(0.0 < x <= 180.0 + 1e-9 for x in dih):
            best = VertexStar(beta, tuple(float(x) for x in dih), rays, normals)
            break
    if best is None:
        raise Unrealizable(f"no convex star for beta={beta}, delta1={delta1}")
    return best


def realizable_interval(beta: float) -> tuple[float, float]:
    """Closed range of delta1 (degrees) for which the star is convex.

    Equals ``arccos(k) .. arccos(-k)`` with ``k = cot(beta/2)/sqrt(3)``; the
    closed form is cross-checked against :func:`make_star` in the tests.
    """
    if not (0.0 < beta < 180.0):
        raise Unrealizable(f"base angle {beta} outside (0, 180)")
    k = 1.0 / (math.tan(math.radians(beta) / 2.0) * math.sqrt(3.0))
    if k > 1.0:
        raise Unrealizable(f"base angle {beta} leaves no realizable star")
    return _deg(math.acos(k)), _deg(math.acos(-k))


def symmetric_star(beta: float) -> VertexStar:
    """The star with delta1 == delta3 (A == B on the sphere)."""
    lo, hi = realizable_interval(beta)
    pad = 1e-9 * (hi - lo)

    def gap(d):
        s = make_star(beta, d)
        return s.delta1 - s.delta3

    d = brentq(gap, lo + pad, hi - pad, xtol=1e-13)
    return make_star(beta, d)


def analyze_vertex_star(star: VertexStar) -> GaussMapReport:
    """Spherical quantities of the star and the up/down signs of its normals."""
    n1, n2, n3 = star.normals
    n0 = star.n0
    A = spherical_angle(n2, n3, n0)
    B = spherical_angle(n2, n1, n0)
    C = spherical_angle(n0, n3, n2)
    D = spherical_angle(n0, n1, n2)
    swapped = A < B
    if swapped:
        A, B, C, D = B, A, D, C
        side, other = n3, n1
    else:
        side, other = n1, n3
    x = solve_arc(A, C)
    y = solve_arc_y(B, D)
    x_direct = arc_length(n0, n2)
    y_direct = arc_length(n0, side)
    n2_up = bool(n2[2] > 0.0)
    n1_down, n3_down = bool(n1[2] < 0.0), bool(n3[2] < 0.0)
    # formula: |x| > 90 means n2 above the equator; |y| < 90 means side below
    agrees = (x > 90.0) == n2_up and (y < 90.0) == bool(side[2] < 0.0)
    return GaussMapReport(
        arc_x_deg=x,
        arc_y_deg=y,
        A=A,
        B=B,
        C=C,
        D=D,
        n2_up=n2_up,
        n1_or_n3_down=n1_down or n3_down,
        n1_down=n1_down,
        n3_down=n3_down,
        swapped=swapped,
        arc_x_direct=x_direct,
        arc_y_direct=y_direct,
        formula_agrees=agrees,
    )


def sample_stars(count: int, seed: int = 0, beta_range=(120.0, 180.0)) -> list[VertexStar]:
    """Random realizable stars with beta uniform in ``[lo, hi)``."""
    rng = np.random.default_rng(seed)
    out = []
    lo_b, hi_b = beta_range
    while len(out) < count:
        beta = float(rng.uniform(lo_b, hi_b))
        if beta >= 180.0 - 1e-6:
            continue
        lo, hi = realizable_interval(beta)
        # stay off the exact endpoints, where a dihedral reaches 180
        d = float(rng.uniform(lo, hi))
        if hi - lo < 1e-9 or min(d - lo, hi - d) < 1e-7:
            continue
        out.append(make_star(beta, d))
    return out

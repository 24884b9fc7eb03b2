"""Equiangular integer polygons: embedding, closure and edge-length conditions.

Closure of an equiangular integer polygon is decided exactly. With
``w = exp(2*pi*i/n)`` the polygon closes iff ``sum(e_k * w**k) == 0``, which
holds iff the cyclotomic polynomial ``Phi_n`` divides ``sum(e_k * x**k)``.
Reducing ``x**k`` modulo ``Phi_n`` gives an integer matrix whose kernel is
exactly the set of closing edge vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import NonConvex, NotClosed
from .geom import DEFAULT_TOL, Tolerances

__all__ = [
    "DOMEABLE_N",
    "PolygonSpec",
    "EmbeddedPolygon",
    "ConditionReport",
    "cyclotomic",
    "closes",
    "embed",
    "embed_with_angles",
    "check_conditions",
    "is_polyiamond_polygon",
    "enumerate_equiangular",
]

DOMEABLE_N = frozenset({3, 4, 5, 6, 8, 10, 12})


@dataclass(frozen=True)
class PolygonSpec:
    """Cyclic list of positive integer edge lengths.

    Angles are implied equiangular unless a caller supplies them explicitly
    (see :func:`embed_with_angles`). Closure is *not* checked here.
    """

    edges: tuple[int, ...]

    def __post_init__(self):
        edges = tuple(self.edges)
        if len(edges) < 3:
            raise ValueError("a polygon needs at least 3 edges")
        for e in edges:
            if isinstance(e, bool) or int(e) != e or e < 1:
                raise ValueError(f"edge lengths must be positive integers, got {e!r}")
        object.__setattr__(self, "edges", tuple(int(e) for e in edges))

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def base_angle(self) -> float:
        return (self.n - 2) * 180.0 / self.n

    @property
    def is_regular(self) -> bool:
        return len(set(self.edges)) == 1

    def rotated(self, k: int) -> "PolygonSpec":
        k %= self.n
        return PolygonSpec(self.edges[k:] + self.edges[:k])

    def reflected(self) -> "PolygonSpec":
        return PolygonSpec(tuple(reversed(self.edges)))

    def to_json(self) -> dict:
        return {"edges": list(self.edges)}

    @classmethod
    def from_json(cls, data: dict) -> "PolygonSpec":
        if not isinstance(data, dict) or "edges" not in data:
            raise ValueError('polygon JSON must be an object with an "edges" list')
        edges = data["edges"]
        if not isinstance(edges, list):
            raise ValueError('"edges" must be a list of integers')
        return cls(tuple(edges))

    def __str__(self) -> str:
        return ",".join(map(str, self.edges))


@dataclass(frozen=True)
class EmbeddedPolygon:
    """Planar convex polygon in z = 0, counter-clockwise seen from +z."""

    vertices: np.ndarray = field(repr=False)
    angles: tuple[float, ...]
    edges: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def interior_angle(self) -> float:
        """The common interior angle; only meaningful for equiangular input."""
        return self.angles[0]

    @property
    def is_equiangular(self) -> bool:
        return max(self.angles) - min(self.angles) < 1e-9


@dataclass(frozen=True)
class ConditionReport:
    n_admissible: bool
    odd_edges_equal: bool
    even_edges_condition: bool
    detail: str
    # offset of the first "odd" edge (0 or 1) when the even-n conditions hold
    parity: int | None = None

    @property
    def domeable(self) -> bool:
        return self.n_admissible and self.odd_edges_equal and self.even_edges_condition

    def to_json(self) -> dict:
        return {
            "n_admissible": self.n_admissible,
            "odd_edges_equal": self.odd_edges_equal,
            "even_edges_condition": self.even_edges_condition,
            "parity": self.parity,
            "detail": self.detail,
        }


# -- exact closure ---------------------------------------------------------


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # coefficient lists, lowest degree first; den is monic
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    rem = num[: len(den) - 1]
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@lru_cache(maxsize=None)
def _closure_matrix(n: int) -> np.ndarray:
    """Integer matrix R with R @ e == 0 iff the equiangular polygon closes."""
    phi = cyclotomic(n)
    deg = len(phi) - 1
    cols = []
    for k in range(n):
        mono = [0] * k + [1]
        if k < deg:
            col = mono + [0] * (deg - len(mono))
        else:
            _, col = _poly_divmod(mono, list(phi))
        cols.append(col[:deg])
    m = np.array(cols, dtype=np.int64).T
    m.setflags(write=False)
    return m


def closes(edges: Sequence[int]) -> bool:
    """Exact test that integer edges close an equiangular polygon."""
    e = np.asarray(edges, dtype=np.int64)
    return not np.any(_closure_matrix(len(e)) @ e)


def _turning_vertices(lengths: Sequence[float], turns_deg: Sequence[float]) -> np.ndarray:
    """Walk the edges, turning left by ``turns_deg[i]`` after edge i."""
    pts = np.zeros((len(lengths) + 1, 3))
    heading = 0.0
    for i, ln in enumerate(lengths):
        pts[i + 1, 0] = pts[i, 0] + ln * math.cos(heading)
        pts[i + 1, 1] = pts[i, 1] + ln * math.sin(heading)
        heading += math.radians(turns_deg[i])
    return pts


def embed(spec: PolygonSpec, tol: Tolerances = DEFAULT_TOL) -> EmbeddedPolygon:
    """Equiangular embedding: first vertex at the origin, first edge along +x."""
    if not closes(spec.edges):
        raise NotClosed(f"edges {spec} do not close an equiangular {spec.n}-gon")
    beta = spec.base_angle
    return _finish(spec.edges, [beta] * spec.n, tol)


def embed_with_angles(
    edges: Sequence[int], angles: Sequence[float], tol: Tolerances = DEFAULT_TOL
) -> EmbeddedPolygon:
    """Embed a polygon with explicit interior angles (degrees).

    ``angles[i]`` is the interior angle at vertex i, where edge i starts.
    """
    if len(angles) != len(edges):
        raise ValueError("need one angle per edge")
    if any(not (0.0 < a < 180.0 + tol.eps_angle_deg) for a in angles):
        raise NonConvex(f"interior angles must lie in (0, 180]: {list(angles)}")
    return _finish(tuple(edges), list(angles), tol)


def _finish(edges, angles, tol: Tolerances) -> EmbeddedPolygon:
    n = len(edges)
    # vertex i+1 turns by the exterior angle there
    turns = [180.0 - angles[(i + 1) % n] for i in range(n)]
    if abs(sum(turns) - 360.0) > tol.eps_angle_deg:
        raise NonConvex(f"exterior angles sum to {sum(turns)}, not 360")
    pts = _turning_vertices(edges, turns)
    gap = float(np.linalg.norm(pts[-1] - pts[0]))
    if gap > tol.eps_construct * max(1.0, sum(edges)):
        raise NotClosed(f"polygon fails to close by {gap:.3e}")
    return EmbeddedPolygon(
        vertices=pts[:-1], angles=tuple(float(a) for a in angles), edges=tuple(edges)
    )


# -- edge-length conditions ------------------------------------------------


def _alternating(edges: Sequence[int], start: int) -> tuple[int, ...]:
    return tuple(edges[start::2])


def check_conditions(spec: PolygonSpec) -> ConditionReport:
    """Evaluate the per-n edge-length conditions for domeability.

    For n in {8, 10, 12} both parities are tried; "odd" edges are whichever
    alternating class has all lengths equal while the other class closes as
    an equiangular n/2-gon.
    """
    if not closes(spec.edges):
        raise NotClosed(f"edges {spec} do not close an equiangular {spec.n}-gon")
    n = spec.n
    if n in (3, 4, 5, 6):
        return ConditionReport(True, True, True, f"every closing equiangular {n}-gon qualifies")
    admissible = n in DOMEABLE_N
    if n % 2:
        return ConditionReport(False, False, False, f"n={n} not in {{3,4,5,6,8,10,12}}")

    best = None
    for p in (0, 1):
        odd, even = _alternating(spec.edges, p), _alternating(spec.edges, 1 - p)
        odd_eq = len(set(odd)) == 1
        even_ok = closes(even)
        score = (odd_eq and even_ok, odd_eq)
        if best is None or score > best[0]:
            best = (score, p, odd_eq, even_ok, odd, even)
    _, p, odd_eq, even_ok, odd, even = best
    if not admissible:
        detail = f"n={n} not in {{3,4,5,6,8,10,12}}"
    elif odd_eq and even_ok:
        detail = f"odd edges all {odd[0]}; even edges {list(even)} close as an equiangular {n // 2}-gon"
    elif not odd_eq:
        detail = "no alternating edge class has equal lengths"
    else:
        detail = f"even edges {list(even)} do not form an equiangular {n // 2}-gon"
    return ConditionReport(admissible, odd_eq, even_ok, detail, p if odd_eq else None)


def is_polyiamond_polygon(
    spec: PolygonSpec | Sequence[int], angles: Sequence[float], tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True iff every angle is 60 or 120 degrees and the polygon closes."""
    try:
        edges = spec.edges if isinstance(spec, PolygonSpec) else tuple(spec)
        if len(edges) != len(angles) or len(edges) < 3:
            return False
        if any(int(e) != e or e < 1 for e in edges):
            return False
        if not all(
            abs(a - 60.0) <= tol.eps_angle_deg or abs(a - 120.0) <= tol.eps_angle_deg
            for a in angles
        ):
            return False
        snapped = [60.0 if abs(a - 60.0) < 1.0 else 120.0 for a in angles]
        embed_with_angles(edges, snapped, tol)
        return True
    except Exception:
        return False


# -- enumeration -------------------------------------------------------------


def enumerate_equiangular(n: int, max_edge: int) -> np.ndarray:
    """All closing equiangular integer n-gons with edges in [1, max_edge].

    Returns an (m, n) integer array of edge tuples (every rotation and
    reflection is listed separately). Columns k < deg(Phi_n) of the closure
    matrix form an identity block, so the remaining edges are free and the
    first ones are solved exactly.
    """
    r = _closure_matrix(n)
    deg = r.shape[0]
    free = n - deg
    values = np.arange(1, max_edge + 1, dtype=np.int64)
    if free == 0:
        return np.empty((0, n), dtype=np.int64)
    grid = np.array(list(itertools.product(values, repeat=free)), dtype=np.int64)
    pivots = -(grid @ r[:, deg:].T)
    keep = np.all((pivots >= 1) & (pivots <= max_edge), axis=1)
    return np.hstack([pivots[keep], grid[keep]])


def iter_specs(ns: Iterable[int], max_edge: int) -> Iterator[PolygonSpec]:
    for n in ns:
        for row in enumerate_equiangular(n, max_edge):
            yield PolygonSpec(tuple(int(x) for x in row))

"""Vector primitives and tolerance-aware predicates.

All lengths are in units of the unit triangle edge. Angles leave this module
in degrees.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateEdge, DegenerateFace, DegenerateWedge, NonPlanarFace

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "default_tolerances",
    "as_point",
    "unit",
    "dihedral_angle",
    "face_normal",
    "angle_at",
    "polygon_angles",
    "polygon_area",
    "planarity_error",
]

EPS_ENV = "DELTADOME_EPS"


@dataclass(frozen=True)
class Tolerances:
    eps_construct: float = 1e-9
    eps_verify: float = 1e-6
    eps_angle_deg: float = 1e-6

    def __post_init__(self):
        vals = (self.eps_construct, self.eps_verify, self.eps_angle_deg)
        if not all(math.isfinite(v) and v > 0 for v in vals):
            raise ValueError("tolerances must be finite and positive")
        if self.eps_construct > self.eps_verify:
            raise ValueError("eps_construct must not exceed eps_verify")


DEFAULT_TOL = Tolerances()


def default_tolerances() -> Tolerances:
    """Default tolerances, with ``DELTADOME_EPS`` overriding ``eps_verify``."""
    raw = os.environ.get(EPS_ENV)
    if not raw:
        return DEFAULT_TOL
    eps = float(raw)
    return Tolerances(
        eps_construct=min(DEFAULT_TOL.eps_construct, eps), eps_verify=eps
    )


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite coordinates: {a}")
    return a


def unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return v / n


def _perp(v: np.ndarray, axis: np.ndarray) -> np.ndarray:
    return v - np.dot(v, axis) * axis


def dihedral_angle(
    shared_edge: tuple, face_a_apex, face_b_apex, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Interior dihedral angle (degrees, in (0, 360)) along ``shared_edge``.

    Face A is taken to traverse the edge as given, ``p -> q``, with its apex
    completing an outward counter-clockwise triangle; face B traverses it as
    ``q -> p``. Angles above 180 mean the edge is reflex.
    """
    p, q = as_point(shared_edge[0]), as_point(shared_edge[1])
    a, b = as_point(face_a_apex), as_point(face_b_apex)
    e = q - p
    length = np.linalg.norm(e)
    if length <= tol.eps_construct:
        raise DegenerateEdge(f"edge endpoints coincide: {p} {q}")
    e = e / length
    ua, ub = _perp(a - p, e), _perp(b - p, e)
    na, nb = np.linalg.norm(ua), np.linalg.norm(ub)
    if na <= tol.eps_construct or nb <= tol.eps_construct:
        raise DegenerateEdge("apex lies on the edge line")
    ua, ub = ua / na, ub / nb
    cos_t = float(np.clip(np.dot(ua, ub), -1.0, 1.0))
    theta = math.degrees(math.acos(cos_t))
    # outward normal of face A; B sitting on its outer side means reflex
    outward_a = np.cross(e, ua)
    if np.dot(ub, outward_a) > 0.0:
        return 360.0 - theta
    return theta


def _newell(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    return np.array(
        [
            np.sum((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])),
            np.sum((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])),
            np.sum((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])),
        ]
    )


def planarity_error(pts: np.ndarray, normal: np.ndarray) -> float:
    """Largest distance of any vertex from the best plane with ``normal``."""
    d = (pts - pts.mean(axis=0)) @ normal
    return float(np.max(np.abs(d)))


def face_normal(face_vertices: Sequence, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unit normal of a planar polygon, right-hand rule on the vertex order."""
    pts = np.asarray(face_vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 3:
        raise DegenerateFace("a face needs at least three 3D vertices")
    n = _newell(pts)
    norm = np.linalg.norm(n)
    scale = max(1.0, float(np.max(np.abs(pts - pts[0]))))
    if norm <= tol.eps_construct * scale * scale:
        raise DegenerateFace("vertices are collinear")
    n = n / norm
    if planarity_error(pts, n) > tol.eps_verify:
        raise NonPlanarFace(f"face deviates from its plane by {planarity_error(pts, n):.3e}")
    return n


def angle_at(vertex, prev, next, tol: Tolerances = DEFAULT_TOL) -> float:
    """Planar angle of the wedge ``prev - vertex - next`` in degrees."""
    v, a, b = as_point(vertex), as_point(prev), as_point(next)
    u, w = a - v, b - v
    nu, nw = np.linalg.norm(u), np.linalg.norm(w)
    if nu <= tol.eps_construct or nw <= tol.eps_construct:
        raise DegenerateWedge("wedge arm has zero length")
    # atan2 form keeps precision near 0 and 180 degrees
    return math.degrees(math.atan2(np.linalg.norm(np.cross(u, w)), np.dot(u, w)))


def polygon_angles(pts: np.ndarray) -> np.ndarray:
    """Interior angles (degrees) at each vertex of a convex planar polygon."""
    prev = np.roll(pts, 1, axis=0) - pts
    nxt = np.roll(pts, -1, axis=0) - pts
    cross = np.linalg.norm(np.cross(prev, nxt), axis=1)
    dot = np.einsum("ij,ij->i", prev, nxt)
    return np.degrees(np.arctan2(cross, dot))


def polygon_area(pts: np.ndarray) -> float:
    return 0.5 * float(np.linalg.norm(_newell(np.asarray(pts, dtype=float))))

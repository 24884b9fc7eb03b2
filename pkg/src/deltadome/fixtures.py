"""Fixture corpus: deltahedra, the hexagonal antiprism, slice domes and the
constructed figure domes.

Everything is computed from standard solid coordinates; ``python3 -m
deltadome.fixtures`` regenerates the shipped JSON files.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull

from .mesh import Mesh, drop_straight_vertices, merge_coplanar, orient_outward, place_base
from .polygon import PolygonSpec

__all__ = [
    "DELTAHEDRA",
    "fixture_names",
    "generate",
    "load_fixture",
    "load_all",
    "hull_mesh",
    "slice_dome",
    "write_fixtures",
]

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def _hull_faces(pts: np.ndarray) -> Mesh:
    hull = ConvexHull(pts)
    faces = orient_outward(pts, [tuple(s) for s in hull.simplices])
    # no face is protected from merging yet; the base is chosen afterwards
    merged, _ = merge_coplanar(pts, faces, -1)
    return drop_straight_vertices(pts, merged, 0)


def hull_mesh(points, base_face: int = 0) -> Mesh:
    """Convex hull with coplanar triangles merged, base face placed in z = 0."""
    pts = np.asarray(points, dtype=float)
    mesh = _hull_faces(pts)
    verts = place_base(mesh.vertices, mesh.faces, base_face)
    return Mesh(verts, mesh.faces, base_face)


def _ring(n: int, radius: float, z: float, phase: float = 0.0) -> np.ndarray:
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.stack([radius * np.cos(t), radius * np.sin(t), np.full(n, z)], axis=1)


def tetrahedron() -> np.ndarray:
    return np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float) / (2 * math.sqrt(2))


def triangular_bipyramid() -> np.ndarray:
    h = math.sqrt(2.0 / 3.0)
    return np.vstack([_ring(3, 1 / math.sqrt(3), 0.0), [[0, 0, h], [0, 0, -h]]])


def octahedron() -> np.ndarray:
    e = np.eye(3) / math.sqrt(2)
    return np.vstack([e, -e])


def pentagonal_bipyramid() -> np.ndarray:
    R = 1 / (2 * math.sin(math.pi / 5))
    h = math.sqrt(1 - R * R)
    return np.vstack([_ring(5, R, 0.0), [[0, 0, h], [0, 0, -h]]])


def snub_disphenoid() -> np.ndarray:
    # q is the positive root of 2x^3 + 11x^2 + 4x - 1 (edge length 2 below)
    q = brentq(lambda x: 2 * x**3 + 11 * x**2 + 4 * x - 1, 0.0, 1.0, xtol=1e-15)
    r, s, t = math.sqrt(q), math.sqrt((1 - q) / (2 * q)), math.sqrt(2 - 2 * q)
    pts = [(t, r, 0), (-t, r, 0), (0, s, 1), (0, s, -1), (1, -s, 0), (-1, -s, 0), (0, -r, t), (0, -r, -t)]
    return np.array(pts, float) / 2.0


def triaugmented_triangular_prism() -> np.ndarray:
    tri = _ring(3, 1 / math.sqrt(3), 0.0)
    prism = np.vstack([tri + [0, 0, 0.5], tri + [0, 0, -0.5]])
    caps = []
    for k in range(3):
        a, b = tri[k], tri[(k + 1) % 3]
        mid = (a + b) / 2
        caps.append(mid + mid / np.linalg.norm(mid) * (1 / math.sqrt(2)))
    return np.vstack([prism, caps])


def _square_antiprism(side: float = 1.0) -> tuple[np.ndarray, float]:
    R = side / math.sqrt(2)
    gap = 2 * R * math.sin(math.pi / 8)
    h = math.sqrt(side * side - gap * gap)
    return np.vstack([_ring(4, R, -h / 2), _ring(4, R, h / 2, math.pi / 4)]), h


def gyroelongated_square_bipyramid(side: float = 1.0) -> np.ndarray:
    band, h = _square_antiprism(side)
    cap = h / 2 + side / math.sqrt(2)
    return np.vstack([band, [[0, 0, cap], [0, 0, -cap]]])


def icosahedron(side: float = 1.0) -> np.ndarray:
    """Icosahedron with a five-fold axis along z (vertex at the bottom)."""
    raw = []
    for a in (-1, 1):
        for b in (-PHI, PHI):
            raw += [(0, a, b), (a, b, 0), (b, 0, a)]
    pts = np.array(raw, float) * (side / 2.0)
    axis = pts[int(np.argmin(pts[:, 2] + 1e-3 * pts[:, 0]))]
    axis = axis / np.linalg.norm(axis)
    # rotate ``axis`` onto -z
    target = np.array([0.0, 0.0, -1.0])
    v = np.cross(axis, target)
    c = float(axis @ target)
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    rot = np.eye(3) + vx + vx @ vx / (1 + c)
    return pts @ rot.T


def hexagonal_antiprism(side: float = 1.0) -> np.ndarray:
    gap = 2 * side * math.sin(math.pi / 12)
    h = math.sqrt(side * side - gap * gap)
    return np.vstack([_ring(6, side, -h / 2), _ring(6, side, h / 2, math.pi / 6)])


DELTAHEDRA: dict[str, Callable[[], np.ndarray]] = {
    "tetrahedron": tetrahedron,
    "triangular_bipyramid": triangular_bipyramid,
    "octahedron": octahedron,
    "pentagonal_bipyramid": pentagonal_bipyramid,
    "snub_disphenoid": snub_disphenoid,
    "triaugmented_triangular_prism": triaugmented_triangular_prism,
    "gyroelongated_square_bipyramid": gyroelongated_square_bipyramid,
    "icosahedron": icosahedron,
}


def slice_dome(points: np.ndarray, z0: float) -> Mesh:
    """Part of a convex solid above the plane z = z0, cut face as the base."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    edges = set()
    for s in hull.simplices:
        for k in range(3):
            a, b = s[k], s[(k + 1) % 3]
            edges.add((min(a, b), max(a, b)))
    on = np.abs(pts[:, 2] - z0) <= 1e-9
    pts = pts.copy()
    pts[on, 2] = z0
    keep = [p for p in pts if p[2] > z0]
    for a, b in edges:
        za, zb = pts[a, 2] - z0, pts[b, 2] - z0
        if za * zb < 0:
            t = za / (za - zb)
            keep.append(pts[a] + t * (pts[b] - pts[a]))
    keep += list(pts[on])
    cut = np.unique(np.round(np.array(keep), 12), axis=0)
    mesh = _hull_faces(cut)
    base = next(i for i, f in enumerate(mesh.faces)
                if np.all(np.abs(mesh.vertices[list(f), 2] - z0) < 1e-9))
    verts = place_base(mesh.vertices, mesh.faces, base)
    return Mesh(verts, mesh.faces, base)


def _band_fraction_plane(points: np.ndarray, lower: float, upper: float, t: float) -> float:
    """Height at fraction t of the way from the lower to the upper ring."""
    zs = np.unique(np.round(points[:, 2], 9))
    lo = zs[np.argmin(np.abs(zs - lower))]
    hi = zs[np.argmin(np.abs(zs - upper))]
    return float(brentq(lambda z: (z - lo) / (hi - lo) - t, lo, hi))


def _icosa_rings(side: float) -> tuple[float, float]:
    pts = icosahedron(side)
    zs = np.sort(np.unique(np.round(pts[:, 2], 9)))
    return zs[1], zs[2]  # lower and upper pentagon heights


def generate() -> dict[str, Mesh]:
    """Compute every fixture."""
    from . import constructors as c

    out: dict[str, Mesh] = {}
    for name, fn in DELTAHEDRA.items():
        out[name] = hull_mesh(fn())
    # antiprism dome over its bottom hexagon
    hexa = hexagonal_antiprism()
    out["hexagonal_antiprism"] = slice_dome(hexa, float(hexa[:, 2].min()))
    # slices
    gsb = gyroelongated_square_bipyramid(2.0)
    out["slice_octagon_gyroelongated_bipyramid"] = slice_dome(gsb, 0.0)
    out["slice_decagon_icosahedron"] = slice_dome(icosahedron(2.0), 0.0)
    out["slice_12gon_hexagonal_antiprism"] = slice_dome(hexagonal_antiprism(2.0), 0.0)
    lower, upper = _icosa_rings(1.0)
    out["slice_pentagon_icosahedron"] = slice_dome(icosahedron(1.0), lower)
    ico4 = icosahedron(4.0)
    lower, upper = _icosa_rings(4.0)
    out["slice_decagon_1_3_icosahedron"] = slice_dome(ico4, _band_fraction_plane(ico4, lower, upper, 0.25))
    # constructed figure domes
    octa = PolygonSpec((1, 4, 1, 2, 1, 4, 1, 2))
    out["octagon_4x2_layered"] = c.build(octa, c.decide(octa))
    pepa = PolygonSpec((1, 1, 1, 2, 1, 1, 1, 1, 1, 2, 1, 1))
    out["twelve_gon_hexagon_lid"] = c.build(pepa, c.decide(pepa))
    out["nine_gon_one_story"] = c.nine_gon_dome()
    out["eleven_gon_one_story"] = c.eleven_gon_dome()
    rect = PolygonSpec((3, 1, 3, 1))
    out["roof_3x1"] = c.build(rect, c.decide(rect))
    return out


def _data_dir() -> Path:
    return Path(str(resources.files("deltadome") / "data" / "fixtures"))


def write_fixtures(directory: Path | None = None) -> list[Path]:
    directory = directory or _data_dir()
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, mesh in generate().items():
        p = directory / f"{name}.json"
        p.write_text(json.dumps({"name": name, **mesh.to_json()}, indent=1) + "\n")
        paths.append(p)
    return paths


def fixture_names() -> list[str]:
    return sorted(p.stem for p in _data_dir().glob("*.json"))


@lru_cache(maxsize=None)
def load_fixture(name: str) -> Mesh:
    data = json.loads((_data_dir() / f"{name}.json").read_text())
    return Mesh(np.array(data["vertices"]), data["faces"], data["base_face"])


def load_all() -> dict[str, Mesh]:
    return {n: load_fixture(n) for n in fixture_names()}


if __name__ == "__main__":
    for path in write_fixtures():
        print(path)
